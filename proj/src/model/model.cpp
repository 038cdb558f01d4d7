// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/model/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "lsgd/core/error.hpp"
#include "network.hpp"

namespace lsgd::model {

namespace {

constexpr double kInitStd = 0.02;

void check_inputs(const ParameterVector& params, const detail::NetworkLayout& layout, const ModelConfig& config,
                  const TokenBatch& batch) {
  if (params.segments() != layout.segments) {
    throw ShapeError("parameter layout does not match the model configuration");
  }
  batch.validate(config.vocab_size);
  if (config.arch == Architecture::transformer && batch.seq_len > config.seq_len) {
    throw DataError("batch seq_len " + std::to_string(batch.seq_len) + " exceeds model.seq_len " +
                    std::to_string(config.seq_len));
  }
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

ParameterVector build_layout(const ModelConfig& config) {
  auto layout = detail::make_network_layout(config);
  return ParameterVector(std::make_shared<const SegmentLayout>(std::move(layout.segments)));
}

ParameterVector build_model(const ModelConfig& config, std::uint64_t seed) {
  ParameterVector params = build_layout(config);
  std::mt19937_64 rng(seed);
  const double residual_scale = 1.0 / std::sqrt(2.0 * config.n_layers);
  auto values = params.values();
  for (const auto& s : params.segments()) {
    auto seg = values.subspan(s.offset, s.length);
    if (ends_with(s.name, ".gain")) {
      std::fill(seg.begin(), seg.end(), 1.0);
      continue;
    }
    if (ends_with(s.name, ".bias")) continue;
    double std_dev = kInitStd;
    if (ends_with(s.name, "proj.weight")) std_dev *= residual_scale;
    if (config.arch == Architecture::mlp && ends_with(s.name, "fc.weight")) {
      std_dev = 1.0 / std::sqrt(static_cast<double>(config.d_model));
    }
    std::normal_distribution<double> normal(0.0, std_dev);
    for (double& v : seg) v = normal(rng);
  }
  return params;
}

double forward_loss(const ParameterVector& params, const ModelConfig& config, const TokenBatch& batch) {
  const auto layout = detail::make_network_layout(config);
  check_inputs(params, layout, config, batch);
  return detail::network_loss<double>(params.values(), layout, config, batch, {});
}

LossAndGradient loss_and_gradient(const ParameterVector& params, const ModelConfig& config,
                                  const TokenBatch& batch) {
  const auto layout = detail::make_network_layout(config);
  check_inputs(params, layout, config, batch);
  LossAndGradient out{0.0, ParameterVector::zeros_like(params)};
  out.loss = detail::network_loss<double>(params.values(), layout, config, batch, out.gradient.values());
  return out;
}

ParameterVector backward(const ParameterVector& params, const ModelConfig& config, const TokenBatch& batch) {
  return loss_and_gradient(params, config, batch).gradient;
}

double flops_per_step(std::int64_t non_embedding_params, double batch_tokens) {
  return 6.0 * static_cast<double>(non_embedding_params) * batch_tokens;
}

}  // namespace lsgd::model
