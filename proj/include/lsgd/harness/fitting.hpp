// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Scaling-law fits over run outputs. Families:
//   LN, LD, LC  L(X) = (X_c / X)^alpha for X = N, D or C = 6 N D
//   LsN         L(s, N) = L(N) + alpha_s * s
//   LKN         L(K, N) = L(N) + lambda * K / (1 - K)
//
// Inputs are run directories (summary.json, config.json) or CSV tables. A CSV
// needs the axis column (N, D, C or x) and one of loss, final_eval_loss,
// eval_loss; LsN additionally needs s. Tables with an s column contribute only
// their smallest-s rows to the LN/LD/LC families.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lsgd/harness/config.hpp"
#include "lsgd/scaling/scaling_law.hpp"

namespace lsgd::harness {

enum class FitFamily { LN, LD, LC, LsN, LKN };

std::string_view to_string(FitFamily family);
// Throws ArgumentError.
FitFamily fit_family_from_string(std::string_view name);

struct FitRequest {
  FitFamily family = FitFamily::LN;
  std::vector<std::filesystem::path> inputs;
  // Axis value (or N for LsN) excluded from the fit and scored afterwards;
  // "max" selects the largest.
  std::string holdout;
  std::optional<double> base_alpha;
  std::optional<double> base_nc;
  std::optional<double> lambda;
  std::optional<double> alpha_s;
  // Topology and batch size used to turn alpha_s into lambda.
  std::optional<ExperimentConfig> config;
  std::vector<double> k_values{0.5, 0.8, 0.9, 0.95, 0.99};
  std::vector<double> n_values;
};

struct FitResult {
  std::string json;    // machine-readable, pretty printed
  std::string report;  // human-readable
};

std::vector<scaling::PowerLawPoint> load_power_points(const std::vector<std::filesystem::path>& inputs,
                                                      scaling::Axis axis);
std::vector<scaling::StepPenaltyPoint> load_step_points(const std::vector<std::filesystem::path>& inputs);

// Throws ArgumentError for missing inputs or flags, and the fitting errors of
// the scaling library.
FitResult run_fit(const FitRequest& request);

}  // namespace lsgd::harness
