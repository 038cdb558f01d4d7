// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/optim/nesterov.hpp"

#include "lsgd/core/error.hpp"

namespace lsgd::optim {

NesterovState NesterovState::zeros_like(const model::ParameterVector& params, const NesterovHyper& hyper) {
  return {model::ParameterVector::zeros_like(params), hyper};
}

void nesterov_step(model::ParameterVector& params, const model::ParameterVector& pseudo_grad, NesterovState& state) {
  model::require_same_layout(params, pseudo_grad, "nesterov_step pseudo-gradient");
  model::require_same_layout(params, state.velocity, "nesterov_step velocity");
  auto theta = params.values();
  const auto g = pseudo_grad.values();
  auto v = state.velocity.values();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    nesterov_update(theta[i], v[i], g[i], state.hyper.lr, state.hyper.momentum);
  }
}

}  // namespace lsgd::optim
