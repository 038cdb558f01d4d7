// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/engine/spike.hpp"

#include <algorithm>
#include <cmath>

#include "lsgd/core/error.hpp"

namespace lsgd::engine {

namespace {

double median_of(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

std::vector<SpikeEvent> spike_scan(const std::vector<double>& losses, std::size_t window, double k, int s) {
  if (window < 2) throw ArgumentError("spike_scan: window must be >= 2");
  if (s < 1) throw ArgumentError("spike_scan: s must be >= 1");
  if (losses.size() < window) throw ArgumentError("spike_scan: series shorter than window");

  const auto period = static_cast<std::size_t>(s);
  std::vector<SpikeEvent> events;
  for (std::size_t i = window; i < losses.size(); ++i) {
    std::vector<double> trailing(losses.begin() + static_cast<std::ptrdiff_t>(i - window),
                                 losses.begin() + static_cast<std::ptrdiff_t>(i));
    const double median = median_of(trailing);
    for (double& x : trailing) x = std::fabs(x - median);
    const double mad = median_of(trailing);
    const double threshold = median + k * mad;
    if (!(losses[i] > threshold)) continue;

    SpikeEvent e;
    e.index = i;
    e.loss = losses[i];
    e.median = median;
    e.threshold = threshold;
    e.post_sync = i >= period && (i % period) < window;
    const std::size_t round_end = std::min(losses.size(), (i / period + 1) * period);
    for (std::size_t j = i + 1; j < round_end; ++j) {
      if (losses[j] <= median) {
        e.recovered = true;
        break;
      }
    }
    events.push_back(e);
  }
  return events;
}

}  // namespace lsgd::engine
