// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scalar-generic forward/backward passes. Instantiated for double (training)
// and long double (gradient checking). Internal to the model library.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsgd/model/model_config.hpp"
#include "lsgd/model/parameter_vector.hpp"
#include "lsgd/model/token_batch.hpp"

namespace lsgd::model::detail {

struct BlockOffsets {
  std::size_t ln1_gain, ln1_bias;
  std::size_t qkv_weight, qkv_bias;
  std::size_t attn_proj_weight, attn_proj_bias;
  std::size_t ln2_gain, ln2_bias;
  std::size_t fc_weight, fc_bias;
  std::size_t mlp_proj_weight, mlp_proj_bias;
};

struct HiddenOffsets {
  std::size_t weight, bias;
};

// Flat offsets of every tensor, in the order segments are laid out.
struct NetworkLayout {
  std::vector<Segment> segments;
  std::size_t tok_emb = 0;
  std::size_t pos_emb = 0;                // transformer only
  std::vector<BlockOffsets> blocks;       // transformer only
  std::vector<HiddenOffsets> hidden;      // mlp only
  std::size_t lnf_gain = 0, lnf_bias = 0; // transformer only
  std::size_t lm_head = 0;                // untied only
};

NetworkLayout make_network_layout(const ModelConfig& config);

// Returns the mean loss. When `grad` is non-empty it is overwritten with the
// gradient (same flat layout as `params`).
template <typename T>
T network_loss(std::span<const T> params, const NetworkLayout& layout, const ModelConfig& config,
               const TokenBatch& batch, std::span<T> grad);

extern template double network_loss<double>(std::span<const double>, const NetworkLayout&, const ModelConfig&,
                                            const TokenBatch&, std::span<double>);
extern template long double network_loss<long double>(std::span<const long double>, const NetworkLayout&,
                                                      const ModelConfig&, const TokenBatch&, std::span<long double>);

}  // namespace lsgd::model::detail
