// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/perf/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "lsgd/core/error.hpp"

namespace lsgd::perf {

std::vector<int> default_s_values() {
  std::vector<int> s;
  for (int v = 1; v <= 1024; v *= 2) s.push_back(v);
  return s;
}

SweepGrid scenario_preset(int id) {
  SweepGrid g;
  g.B = {4e6};
  g.s = default_s_values();
  switch (id) {
    case 1:
      g.name = "scenario1";
      g.m = {2, 8};
      g.n = {8};
      g.C_d = {1.5e14, 3e14};
      g.W = {gbps_to_bytes_per_s(0.08), gbps_to_bytes_per_s(0.8), gbps_to_bytes_per_s(8.0)};
      break;
    case 2:
      g.name = "scenario2";
      g.m = {2, 8};
      g.n = {1024};
      g.C_d = {1.5e14, 3e14};
      g.W = {gbps_to_bytes_per_s(0.8), gbps_to_bytes_per_s(8.0), gbps_to_bytes_per_s(40.0)};
      break;
    case 3:
      g.name = "scenario3";
      g.m = {1024};
      g.n = {8};
      g.C_d = {1.5e14};
      g.W = {gbps_to_bytes_per_s(0.08), gbps_to_bytes_per_s(0.8)};
      break;
    default:
      throw ArgumentError("unknown scenario preset " + std::to_string(id) + " (expected 1, 2 or 3)");
  }
  return g;
}

std::vector<ScenarioRow> sweep_scenarios(const SweepGrid& grid) {
  if (grid.m.empty() || grid.n.empty() || grid.C_d.empty() || grid.W.empty() || grid.B.empty() || grid.s.empty()) {
    throw ArgumentError("sweep grid '" + grid.name + "' has an empty dimension");
  }
  std::vector<ScenarioRow> rows;
  rows.reserve(grid.m.size() * grid.n.size() * grid.C_d.size() * grid.W.size() * grid.B.size() * grid.s.size());
  for (int m : grid.m) {
    for (int n : grid.n) {
      for (double C_d : grid.C_d) {
        for (double W : grid.W) {
          const Topology topo{m, n, C_d, W, grid.bytes_per_param};
          for (double B : grid.B) {
            for (int s : grid.s) {
              const auto p = efficiency_point(topo, grid.n_params, B, s);
              rows.push_back({m, n, C_d, W, B, s, p.K, p.t_comm_round, p.t_compute_round});
            }
          }
        }
      }
    }
  }
  return rows;
}

void write_scenario_csv(std::ostream& out, const std::vector<ScenarioRow>& rows) {
  out << kScenarioCsvHeader << '\n';
  std::ostringstream line;
  line.precision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.m << ',' << r.n << ',' << r.C_d << ',' << r.W << ',' << r.B << ',' << r.s << ',' << r.K << ','
         << r.t_comm << ',' << r.t_comp_round << '\n';
    out << line.str();
  }
}

void write_scenario_jsonl(std::ostream& out, const std::vector<ScenarioRow>& rows) {
  for (const auto& r : rows) {
    nlohmann::ordered_json j;
    j["m"] = r.m;
    j["n"] = r.n;
    j["C_d_flops"] = r.C_d;
    j["W_bytes_per_s"] = r.W;
    j["B_tokens"] = r.B;
    j["s"] = r.s;
    j["K"] = r.K;
    j["t_comm_s"] = r.t_comm;
    j["t_comp_round_s"] = r.t_comp_round;
    out << j.dump() << '\n';
  }
}

std::vector<ScenarioRow> read_scenario_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kScenarioCsvHeader) {
    throw DataError(path.string() + ": expected header " + kScenarioCsvHeader);
  }
  std::vector<ScenarioRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    ScenarioRow r;
    char c1, c2, c3, c4, c5, c6, c7, c8;
    ss >> r.m >> c1 >> r.n >> c2 >> r.C_d >> c3 >> r.W >> c4 >> r.B >> c5 >> r.s >> c6 >> r.K >> c7 >> r.t_comm >> c8 >>
        r.t_comp_round;
    if (!ss) throw DataError(path.string() + ": malformed row '" + line + "'");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace lsgd::perf
