// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lsgd/perf/perfmodel.hpp"

namespace lsgd::perf {

struct SweepGrid {
  std::string name = "custom";
  std::vector<int> m;
  std::vector<int> n;
  std::vector<double> C_d;
  std::vector<double> W;  // bytes/s
  std::vector<double> B;
  std::vector<int> s;
  double bytes_per_param = 2.0;
  // Only scales the reported times; K does not depend on it.
  double n_params = 1e9;
};

struct ScenarioRow {
  int m = 1;
  int n = 1;
  double C_d = 0.0;
  double W = 0.0;
  double B = 0.0;
  int s = 1;
  double K = 1.0;
  double t_comm = 0.0;
  double t_comp_round = 0.0;
};

// Powers of two from 1 to 1024.
std::vector<int> default_s_values();

// Built-in grids 1-3. Throws ArgumentError for any other id.
SweepGrid scenario_preset(int id);

// Cartesian product in the order m, n, C_d, W, B, s (s fastest).
// Throws ArgumentError when a dimension is empty or a value is invalid.
std::vector<ScenarioRow> sweep_scenarios(const SweepGrid& grid);

inline constexpr const char* kScenarioCsvHeader = "m,n,C_d_flops,W_bytes_per_s,B_tokens,s,K,t_comm_s,t_comp_round_s";

void write_scenario_csv(std::ostream& out, const std::vector<ScenarioRow>& rows);
void write_scenario_jsonl(std::ostream& out, const std::vector<ScenarioRow>& rows);
std::vector<ScenarioRow> read_scenario_csv(const std::filesystem::path& path);

}  // namespace lsgd::perf
