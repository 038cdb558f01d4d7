// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsgd::data {

inline constexpr int kByteVocabSize = 256;

// Identity byte -> id mapping.
std::vector<std::int32_t> tokenize_bytes(std::string_view text);

// Inverse of tokenize_bytes. Throws DataError for ids outside [0, 256).
std::string detokenize_bytes(std::span<const std::int32_t> ids);

}  // namespace lsgd::data
