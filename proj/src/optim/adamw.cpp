// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/optim/adamw.hpp"

#include <cmath>

#include "lsgd/core/error.hpp"

namespace lsgd::optim {

AdamWState AdamWState::zeros_like(const model::ParameterVector& params, const AdamWHyper& hyper) {
  return {model::ParameterVector::zeros_like(params), model::ParameterVector::zeros_like(params), 0, hyper};
}

void adamw_step(model::ParameterVector& params, const model::ParameterVector& grad, AdamWState& state, double lr) {
  model::require_same_layout(params, grad, "adamw_step gradient");
  model::require_same_layout(params, state.first_moment, "adamw_step first moment");
  model::require_same_layout(params, state.second_moment, "adamw_step second moment");
  if (!(lr >= 0.0)) throw ArgumentError("adamw_step: lr must be non-negative");

  const auto& h = state.hyper;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(h.beta1, t);
  const double bias2 = 1.0 - std::pow(h.beta2, t);
  const double decay = 1.0 - lr * h.weight_decay;

  auto theta = params.values();
  const auto g = grad.values();
  auto m = state.first_moment.values();
  auto v = state.second_moment.values();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g[i];
    v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    theta[i] = theta[i] * decay - lr * (m_hat / (std::sqrt(v_hat) + h.eps));
  }
}

}  // namespace lsgd::optim
