// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace lsgd::optim {

// Linear warmup followed by cosine decay to final_fraction * lr_peak.
//   step < warmup:  lr_peak * (step + 1) / (warmup + 1)
//   otherwise:      lr_peak * (f + (1 - f) * 0.5 * (1 + cos(pi * p)))
//                   p = clamp((step - warmup) / (total - warmup), 0, 1)
struct CosineSchedule {
  double lr_peak = 1e-3;
  std::int64_t total_steps = 1;
  double final_fraction = 0.1;
  std::int64_t warmup_steps = 0;

  // Throws ArgumentError on out-of-range fields.
  void validate() const;
  bool operator==(const CosineSchedule&) const = default;
};

double cosine_lr(const CosineSchedule& schedule, std::int64_t step);

}  // namespace lsgd::optim
