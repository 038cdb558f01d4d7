// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "lsgd/model/model.hpp"

namespace lsgd::model {

struct GradCheckOptions {
  double epsilon = 1e-5;
  std::size_t min_coordinates = 256;
  std::uint64_t seed = 0;
};

struct SegmentCheck {
  std::string name;
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
  std::vector<SegmentCheck> segments;
};

// Compares the analytic gradient with central differences, both evaluated in
// long double. Coordinates are sampled so that every segment is represented.
// Relative error: |a - n| / max(1e-12, |a| + |n|).
// Throws ArgumentError when epsilon <= 0.
GradCheckReport grad_check(const ParameterVector& params, const ModelConfig& config, const TokenBatch& batch,
                           const GradCheckOptions& options = {});

}  // namespace lsgd::model
