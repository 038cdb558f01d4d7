// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/data/tokenizer.hpp"

#include "lsgd/core/error.hpp"

namespace lsgd::data {

std::vector<std::int32_t> tokenize_bytes(std::string_view text) {
  std::vector<std::int32_t> ids;
  ids.reserve(text.size());
  for (char c : text) ids.push_back(static_cast<std::int32_t>(static_cast<unsigned char>(c)));
  return ids;
}

std::string detokenize_bytes(std::span<const std::int32_t> ids) {
  std::string out;
  out.reserve(ids.size());
  for (std::int32_t id : ids) {
    if (id < 0 || id >= kByteVocabSize) throw DataError("id " + std::to_string(id) + " is not a byte");
    out.push_back(static_cast<char>(static_cast<unsigned char>(id)));
  }
  return out;
}

}  // namespace lsgd::data
