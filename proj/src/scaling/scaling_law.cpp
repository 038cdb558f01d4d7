// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/scaling/scaling_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::scaling {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
};

// Centred ordinary least squares of y on x.
LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

double r_squared_of(double ss_res, double ss_tot) {
  if (ss_tot > 0.0) return 1.0 - ss_res / ss_tot;
  return ss_res == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view to_string(Axis axis) {
  switch (axis) {
    case Axis::N: return "N";
    case Axis::D: return "D";
    case Axis::C: return "C";
  }
  return "N";
}

Axis axis_from_string(std::string_view name) {
  if (name == "N") return Axis::N;
  if (name == "D") return Axis::D;
  if (name == "C") return Axis::C;
  throw ArgumentError("unknown axis '" + std::string(name) + "' (expected N, D or C)");
}

double PowerLawFit::predict(double x) const {
  if (!(x > 0.0)) throw DomainError("power law evaluated at non-positive x");
  return std::pow(X_c / x, alpha);
}

PowerLawFit fit_power_law(const std::vector<PowerLawPoint>& points, Axis axis) {
  std::vector<double> lx, ly;
  std::set<double> distinct;
  for (const auto& p : points) {
    if (!(p.x > 0.0) || !(p.loss > 0.0) || !std::isfinite(p.x) || !std::isfinite(p.loss)) {
      throw DomainError("power-law fit needs positive finite x and loss");
    }
    lx.push_back(std::log(p.x));
    ly.push_back(std::log(p.loss));
    distinct.insert(p.x);
  }
  if (distinct.size() < 2) throw RankError("power-law fit needs at least two distinct x values");
  const auto line = least_squares(lx, ly);
  if (!(line.slope < 0.0)) throw DomainError("fitted exponent is not positive: loss does not decrease with x");
  PowerLawFit fit;
  fit.axis = axis;
  fit.alpha = -line.slope;
  fit.X_c = std::exp(line.intercept / fit.alpha);
  fit.r_squared = line.r_squared;
  fit.n_points = static_cast<int>(points.size());
  return fit;
}

double predict_L_of_N(const PowerLawFit& fit, double N) { return fit.predict(N); }

double StepPenaltyFit::predict(double s, double N) const {
  if (!(s < valid_below)) throw RangeError("local steps " + std::to_string(s) + " outside the linear regime");
  return alpha_s * s + base.predict(N);
}

StepPenaltyFit fit_step_penalty(const std::vector<StepPenaltyPoint>& points, const PowerLawFit& base) {
  std::set<double> distinct;
  std::vector<double> s, excess;
  for (const auto& p : points) {
    if (!(p.s < kMaxLocalSteps)) {
      throw RangeError("local steps " + std::to_string(p.s) + " outside the linear regime (s < 1024)");
    }
    if (!(p.s >= 0.0)) throw DomainError("local steps must be non-negative");
    s.push_back(p.s);
    excess.push_back(p.loss - base.predict(p.N));
    distinct.insert(p.s);
  }
  double sss = 0.0, ssr = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sss += s[i] * s[i];
    ssr += s[i] * excess[i];
  }
  if (distinct.size() < 2 || sss == 0.0) throw RankError("step-penalty fit needs at least two distinct s values");

  StepPenaltyFit fit;
  fit.base = base;
  fit.alpha_s = ssr / sss;
  const auto free = least_squares(s, excess);
  fit.free_slope = free.slope;
  fit.free_intercept = free.intercept;
  for (std::size_t i = 0; i < s.size(); ++i) fit.residuals.push_back(excess[i] - fit.alpha_s * s[i]);

  std::map<double, std::pair<double, double>> by_size;
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto& acc = by_size[points[i].N];
    acc.first += s[i] * s[i];
    acc.second += s[i] * excess[i];
  }
  for (const auto& [N, acc] : by_size) {
    if (acc.first > 0.0) fit.per_size.push_back({N, acc.second / acc.first});
  }
  return fit;
}

double predict_L_of_K_N(const PowerLawFit& base, double lambda, double K, double N) {
  if (!(K >= 0.0 && K < 1.0)) throw ArgumentError("K must lie in [0, 1)");
  return lambda * K / (1.0 - K) + base.predict(N);
}

GoodnessReport goodness_report(const PowerLawFit& fit, const std::vector<PowerLawPoint>& holdout) {
  if (holdout.empty()) throw ArgumentError("goodness report needs at least one holdout point");
  GoodnessReport report;
  double mean = 0.0;
  for (const auto& p : holdout) mean += p.loss;
  mean /= static_cast<double>(holdout.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (const auto& p : holdout) {
    const double predicted = fit.predict(p.x);
    const double residual = p.loss - predicted;
    report.rows.push_back({p.x, p.loss, predicted, residual});
    report.max_abs_residual = std::max(report.max_abs_residual, std::fabs(residual));
    ss_res += residual * residual;
    ss_tot += (p.loss - mean) * (p.loss - mean);
  }
  report.r_squared = r_squared_of(ss_res, ss_tot);
  return report;
}

}  // namespace lsgd::scaling
