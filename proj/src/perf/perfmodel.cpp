// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/perf/perfmodel.hpp"

#include <cmath>
#include <string>

#include "lsgd/core/error.hpp"

namespace lsgd::perf {

namespace {

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ArgumentError(std::string(what) + " must be positive and finite");
}

}  // namespace

void Topology::validate() const {
  if (m < 1) throw ArgumentError("topology.m must be >= 1");
  if (n < 1) throw ArgumentError("topology.n must be >= 1");
  require_positive(C_d, "topology.C_d");
  require_positive(W, "topology.W");
  require_positive(bytes_per_param, "topology.bytes_per_param");
}

double compute_time_per_step(double N, double B, const Topology& topo) {
  topo.validate();
  require_positive(N, "N");
  require_positive(B, "B");
  return 6.0 * N * (B / topo.m) / (topo.n * topo.C_d);
}

double comm_time_per_sync(double N_total, const Topology& topo) {
  topo.validate();
  require_positive(N_total, "N_total");
  if (topo.m == 1) return 0.0;
  return topo.bytes_per_param * N_total * 2.0 * (topo.m - 1) / (topo.m * topo.W);
}

double overhead_ratio(const Topology& topo, double B, double s) {
  topo.validate();
  require_positive(B, "B");
  require_positive(s, "s");
  return topo.bytes_per_param * (topo.m - 1) * topo.n * topo.C_d / (3.0 * B * s * topo.W);
}

double scaling_efficiency(const Topology& topo, double B, double s) {
  return 1.0 / (1.0 + overhead_ratio(topo, B, s));
}

EfficiencyPoint efficiency_point(const Topology& topo, double N, double B, int s) {
  EfficiencyPoint p;
  p.s = s;
  p.K = scaling_efficiency(topo, B, s);
  p.t_compute_round = s * compute_time_per_step(N, B, topo);
  p.t_comm_round = comm_time_per_sync(N, topo);
  return p;
}

double min_bandwidth(double K_target, const Topology& topo, double B, double s) {
  if (!(K_target > 0.0 && K_target < 1.0)) throw ArgumentError("min_bandwidth: K_target must lie in (0, 1)");
  if (topo.m < 2) throw ArgumentError("min_bandwidth: a single cluster needs no bandwidth");
  Topology unit = topo;
  unit.W = 1.0;
  // overhead(W) = overhead(1) / W and K = 1 / (1 + overhead).
  return overhead_ratio(unit, B, s) * K_target / (1.0 - K_target);
}

double lambda_coeff(double alpha_s, const Topology& topo, double B) {
  topo.validate();
  require_positive(B, "B");
  if (!std::isfinite(alpha_s)) throw ArgumentError("alpha_s must be finite");
  const double ratio = topo.bytes_per_param * topo.n * topo.C_d * (topo.m - 1) / (3.0 * topo.W * B);
  return ratio * alpha_s;
}

}  // namespace lsgd::perf
