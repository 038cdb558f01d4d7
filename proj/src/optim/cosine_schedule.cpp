// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/optim/cosine_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lsgd/core/error.hpp"

namespace lsgd::optim {

void CosineSchedule::validate() const {
  if (!(std::isfinite(lr_peak) && lr_peak >= 0.0)) throw ArgumentError("schedule: lr_peak must be finite and >= 0");
  if (total_steps <= 0) throw ArgumentError("schedule: total_steps must be positive");
  if (!(final_fraction > 0.0 && final_fraction <= 1.0)) {
    throw ArgumentError("schedule: final_fraction must lie in (0, 1]");
  }
  if (warmup_steps < 0) throw ArgumentError("schedule: warmup_steps must be non-negative");
}

double cosine_lr(const CosineSchedule& s, std::int64_t step) {
  if (step < s.warmup_steps) {
    return s.lr_peak * static_cast<double>(step + 1) / static_cast<double>(s.warmup_steps + 1);
  }
  double progress = 1.0;
  if (s.total_steps > s.warmup_steps) {
    progress = static_cast<double>(step - s.warmup_steps) / static_cast<double>(s.total_steps - s.warmup_steps);
  }
  progress = std::clamp(progress, 0.0, 1.0);
  const double f = s.final_fraction;
  return s.lr_peak * (f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
}

}  // namespace lsgd::optim
