// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace lsgd::model {

// Row-major [rows x seq_len] inputs and next-token targets.
struct TokenBatch {
  int rows = 0;
  int seq_len = 0;
  std::vector<std::int32_t> inputs;
  std::vector<std::int32_t> targets;

  std::int64_t token_count() const { return static_cast<std::int64_t>(rows) * seq_len; }

  // Throws DataError on empty batches, ragged storage, or ids outside [0, vocab_size).
  void validate(int vocab_size) const;

  bool operator==(const TokenBatch&) const = default;
};

// Concatenates batches row-wise; all must share seq_len.
TokenBatch concatenate(const std::vector<TokenBatch>& batches);

}  // namespace lsgd::model
