// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/optim/sgd.hpp"

#include "lsgd/core/error.hpp"

namespace lsgd::optim {

void sgd_step(model::ParameterVector& params, const model::ParameterVector& grad, SgdState& state, double lr) {
  model::require_same_layout(params, grad, "sgd_step gradient");
  if (!(lr >= 0.0)) throw ArgumentError("sgd_step: lr must be non-negative");
  auto theta = params.values();
  const auto g = grad.values();
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * g[i];
  state.step_count += 1;
}

}  // namespace lsgd::optim
