// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/model/token_batch.hpp"

#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::model {

void TokenBatch::validate(int vocab_size) const {
  if (rows <= 0 || seq_len <= 0) throw DataError("empty batch");
  const auto n = static_cast<std::size_t>(token_count());
  if (inputs.size() != n || targets.size() != n) {
    throw DataError("batch storage holds " + std::to_string(inputs.size()) + "/" + std::to_string(targets.size()) +
                    " ids, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (inputs[i] < 0 || inputs[i] >= vocab_size || targets[i] < 0 || targets[i] >= vocab_size) {
      throw DataError("token id out of range [0, " + std::to_string(vocab_size) + ") at position " +
                      std::to_string(i));
    }
  }
}

TokenBatch concatenate(const std::vector<TokenBatch>& batches) {
  TokenBatch out;
  if (batches.empty()) return out;
  out.seq_len = batches.front().seq_len;
  for (const auto& b : batches) {
    if (b.seq_len != out.seq_len) throw DataError("cannot concatenate batches with different seq_len");
    out.rows += b.rows;
    out.inputs.insert(out.inputs.end(), b.inputs.begin(), b.inputs.end());
    out.targets.insert(out.targets.end(), b.targets.begin(), b.targets.end());
  }
  return out;
}

}  // namespace lsgd::model
