// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable language models over a flat ParameterVector.
//
// Transformer: decoder-only, pre-norm LayerNorm, learned positional
// embeddings, causal multi-head attention, GELU MLP with expansion 4,
// final LayerNorm and a bias-free vocabulary head.
//
// MLP: next-token predictor from the current token only: token embedding,
// n_layers of (d x d affine + GELU), bias-free vocabulary head.

#pragma once

#include <cstdint>

#include "lsgd/model/model_config.hpp"
#include "lsgd/model/parameter_vector.hpp"
#include "lsgd/model/token_batch.hpp"

namespace lsgd::model {

struct LossAndGradient {
  double loss = 0.0;
  ParameterVector gradient;
};

// Zero-filled parameters with the segment map for `config`.
ParameterVector build_layout(const ModelConfig& config);

// Deterministic initialisation. Normal(0, 0.02) for embeddings and weights,
// output projections of each residual branch scaled by 1/sqrt(2 n_layers),
// zero biases, unit norm gains. MLP hidden weights use 1/sqrt(d_model).
ParameterVector build_model(const ModelConfig& config, std::uint64_t seed);

// Mean next-token cross entropy in nats.
double forward_loss(const ParameterVector& params, const ModelConfig& config, const TokenBatch& batch);

// Exact gradient of forward_loss, same layout as params.
ParameterVector backward(const ParameterVector& params, const ModelConfig& config, const TokenBatch& batch);

LossAndGradient loss_and_gradient(const ParameterVector& params, const ModelConfig& config,
                                  const TokenBatch& batch);

// 6 N B: forward plus backward FLOPs for one update over B tokens.
double flops_per_step(std::int64_t non_embedding_params, double batch_tokens);

}  // namespace lsgd::model
