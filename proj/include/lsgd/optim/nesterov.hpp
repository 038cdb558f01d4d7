// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lsgd/model/parameter_vector.hpp"

namespace lsgd::optim {

struct NesterovHyper {
  double lr = 0.7;
  double momentum = 0.9;

  bool operator==(const NesterovHyper&) const = default;
};

struct NesterovState {
  model::ParameterVector velocity;
  NesterovHyper hyper;

  static NesterovState zeros_like(const model::ParameterVector& params, const NesterovHyper& hyper);
};

// Scalar Nesterov update, in the form used by mainstream frameworks:
//   v' = mu v + g
//   theta' = theta - lr (g + mu v')
// With lr = 1 and mu = 0 this is exactly theta - g.
template <typename T>
inline void nesterov_update(T& theta, T& velocity, T grad, T lr, T momentum) {
  velocity = momentum * velocity + grad;
  theta = theta - lr * (grad + momentum * velocity);
}

// Throws ShapeError when params, pseudo_grad and velocity disagree in layout.
void nesterov_step(model::ParameterVector& params, const model::ParameterVector& pseudo_grad, NesterovState& state);

}  // namespace lsgd::optim
