// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "lsgd/model/parameter_vector.hpp"

namespace lsgd::optim {

// Plain SGD, theta <- theta - lr * g. Exists so that the local SGD engine can
// be compared exactly against synchronous data parallelism.
struct SgdState {
  std::int64_t step_count = 0;
};

void sgd_step(model::ParameterVector& params, const model::ParameterVector& grad, SgdState& state, double lr);

}  // namespace lsgd::optim
