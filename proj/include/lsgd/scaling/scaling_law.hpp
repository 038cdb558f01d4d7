// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Power laws L(X) = (X_c / X)^alpha fitted by least squares in log-log space,
// the linear local-step penalty L(s, N) = alpha_s s + L(N), and the combined
// L(K, N) = lambda K / (1 - K) + L(N).
//
// The compute axis assumes batches well below the critical batch size; that
// is not checked here.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace lsgd::scaling {

enum class Axis { N, D, C };

std::string_view to_string(Axis axis);
Axis axis_from_string(std::string_view name);

struct PowerLawPoint {
  double x = 0.0;
  double loss = 0.0;
};

struct PowerLawFit {
  Axis axis = Axis::N;
  double X_c = 1.0;
  double alpha = 0.0;
  double r_squared = 1.0;
  int n_points = 0;

  double predict(double x) const;
};

// Throws DomainError for non-positive inputs or a non-positive fitted
// exponent, RankError with fewer than two distinct x values.
PowerLawFit fit_power_law(const std::vector<PowerLawPoint>& points, Axis axis = Axis::N);

// (X_c / N)^alpha. Throws DomainError for N <= 0.
double predict_L_of_N(const PowerLawFit& fit, double N);

inline constexpr double kMaxLocalSteps = 1024.0;

struct StepPenaltyPoint {
  double s = 0.0;
  double N = 0.0;
  double loss = 0.0;
};

struct PerSizeSlope {
  double N = 0.0;
  double alpha_s = 0.0;
};

struct StepPenaltyFit {
  // Slope through the origin of L - L(N) against s.
  double alpha_s = 0.0;
  PowerLawFit base;
  // Free-intercept least squares on the same data, for diagnostics.
  double free_slope = 0.0;
  double free_intercept = 0.0;
  std::vector<double> residuals;
  std::vector<PerSizeSlope> per_size;
  double valid_below = kMaxLocalSteps;

  // Throws RangeError for s >= valid_below.
  double predict(double s, double N) const;
};

// Throws RangeError for s >= 1024, DomainError for s < 0 or N <= 0, RankError
// with fewer than two distinct s values or no non-zero s.
StepPenaltyFit fit_step_penalty(const std::vector<StepPenaltyPoint>& points, const PowerLawFit& base);

// lambda K / (1 - K) + (N_c / N)^alpha. Throws ArgumentError unless 0 <= K < 1.
double predict_L_of_K_N(const PowerLawFit& base, double lambda, double K, double N);

struct GoodnessRow {
  double x = 0.0;
  double actual = 0.0;
  double predicted = 0.0;
  double residual = 0.0;  // actual - predicted, nats
};

struct GoodnessReport {
  double r_squared = 1.0;
  double max_abs_residual = 0.0;
  std::vector<GoodnessRow> rows;
};

// Residuals on points that were not used for the fit. Throws ArgumentError
// when `holdout` is empty.
GoodnessReport goodness_report(const PowerLawFit& fit, const std::vector<PowerLawPoint>& holdout);

}  // namespace lsgd::scaling
