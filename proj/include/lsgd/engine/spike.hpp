// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

namespace lsgd::engine {

struct SpikeEvent {
  std::size_t index = 0;
  double loss = 0.0;
  double median = 0.0;
  double threshold = 0.0;
  // Within `window` steps after an outer sync.
  bool post_sync = false;
  // Loss came back to the pre-spike median before the next sync.
  bool recovered = false;

  bool operator==(const SpikeEvent&) const = default;
};

// Index i holds the loss of inner step i + 1; syncs follow every s steps.
// Point i >= window is a spike when it exceeds the median of the previous
// `window` points by more than k times their median absolute deviation.
// Throws ArgumentError for window < 2, s < 1, or a series shorter than window.
std::vector<SpikeEvent> spike_scan(const std::vector<double>& losses, std::size_t window, double k, int s);

}  // namespace lsgd::engine
