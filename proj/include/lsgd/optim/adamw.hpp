// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "lsgd/model/parameter_vector.hpp"

namespace lsgd::optim {

struct AdamWHyper {
  double lr_peak = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.95;
  double eps = 1e-8;
  double weight_decay = 0.1;

  bool operator==(const AdamWHyper&) const = default;
};

struct AdamWState {
  model::ParameterVector first_moment;
  model::ParameterVector second_moment;
  std::int64_t step_count = 0;
  AdamWHyper hyper;

  static AdamWState zeros_like(const model::ParameterVector& params, const AdamWHyper& hyper);
};

// One AdamW step with bias-corrected moments and decoupled weight decay:
//   theta <- theta * (1 - lr * wd) - lr * m_hat / (sqrt(v_hat) + eps)
// Throws ShapeError on layout mismatch, ArgumentError when lr < 0.
void adamw_step(model::ParameterVector& params, const model::ParameterVector& grad, AdamWState& state, double lr);

}  // namespace lsgd::optim
