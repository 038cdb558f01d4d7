// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/model/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lsgd/core/error.hpp"
#include "network.hpp"

namespace lsgd::model {

namespace {

// Every segment contributes at least min(length, floor) coordinates; the rest
// of the budget is spread proportionally to segment length.
std::vector<std::size_t> sample_coordinates(const ParameterVector& params, std::size_t budget, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& segments = params.segments();
  const std::size_t floor_per_segment = std::max<std::size_t>(4, budget / (2 * segments.size()));
  const double total = static_cast<double>(params.size());
  std::vector<std::size_t> picked;
  for (const auto& s : segments) {
    if (s.length == 0) continue;
    const auto proportional = static_cast<std::size_t>(std::ceil(static_cast<double>(budget) * s.length / total));
    const std::size_t want = std::min(s.length, std::max(floor_per_segment, proportional));
    std::vector<std::size_t> idx(s.length);
    for (std::size_t i = 0; i < s.length; ++i) idx[i] = s.offset + i;
    std::shuffle(idx.begin(), idx.end(), rng);
    picked.insert(picked.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(want));
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

}  // namespace

GradCheckReport grad_check(const ParameterVector& params, const ModelConfig& config, const TokenBatch& batch,
                           const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw ArgumentError("grad_check: epsilon must be positive");
  const auto layout = detail::make_network_layout(config);
  if (params.segments() != layout.segments) throw ShapeError("grad_check: parameter layout mismatch");
  batch.validate(config.vocab_size);

  std::vector<long double> wide(params.values().begin(), params.values().end());
  std::vector<long double> analytic(wide.size());
  detail::network_loss<long double>(wide, layout, config, batch, analytic);

  const auto coords = sample_coordinates(params, options.min_coordinates, options.seed);
  const long double eps = options.epsilon;

  GradCheckReport report;
  for (const auto& s : params.segments()) report.segments.push_back({s.name, 0, 0.0});

  for (std::size_t idx : coords) {
    const long double saved = wide[idx];
    wide[idx] = saved + eps;
    const long double plus = detail::network_loss<long double>(wide, layout, config, batch, {});
    wide[idx] = saved - eps;
    const long double minus = detail::network_loss<long double>(wide, layout, config, batch, {});
    wide[idx] = saved;
    const long double numeric = (plus - minus) / (2 * eps);
    const long double a = analytic[idx];
    const long double denom = std::max(1e-12L, std::fabs(a) + std::fabs(numeric));
    const double rel = static_cast<double>(std::fabs(a - numeric) / denom);

    const auto& seg = params.layout()->segment_of(idx);
    for (auto& sc : report.segments) {
      if (sc.name == seg.name) {
        ++sc.coordinates;
        sc.max_relative_error = std::max(sc.max_relative_error, rel);
      }
    }
    report.max_relative_error = std::max(report.max_relative_error, rel);
    ++report.coordinates;
  }
  return report;
}

}  // namespace lsgd::model
