// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Analytic compute/communication model for m clusters of n devices that sync
// a full model every s steps with a bandwidth-only ring allreduce.

#pragma once

namespace lsgd::perf {

inline constexpr double kBitsPerByte = 8.0;

inline double gbps_to_bytes_per_s(double gbps) { return gbps * 1e9 / kBitsPerByte; }
inline double bytes_per_s_to_gbps(double bytes_per_s) { return bytes_per_s * kBitsPerByte / 1e9; }

struct Topology {
  int m = 1;                     // clusters
  int n = 1;                     // devices per cluster
  double C_d = 1.5e14;           // FLOP/s per device
  double W = 1e8;                // inter-cluster bandwidth, bytes/s
  double bytes_per_param = 2.0;  // sync payload per parameter

  // Throws ArgumentError unless every field is strictly positive.
  void validate() const;
  bool operator==(const Topology&) const = default;
};

// 6 N (B / m) / (n C_d), seconds.
double compute_time_per_step(double N, double B, const Topology& topo);

// bytes_per_param * N_total * 2 (m - 1) / (m W), seconds; 0 for m = 1.
double comm_time_per_sync(double N_total, const Topology& topo);

// Communication overhead relative to one round of compute:
// bytes_per_param (m - 1) n C_d / (3 B s W). N cancels.
double overhead_ratio(const Topology& topo, double B, double s);

// 1 / (1 + overhead_ratio).
double scaling_efficiency(const Topology& topo, double B, double s);

struct EfficiencyPoint {
  int s = 1;
  double K = 1.0;
  double t_compute_round = 0.0;
  double t_comm_round = 0.0;
};

EfficiencyPoint efficiency_point(const Topology& topo, double N, double B, int s);

// Bandwidth (bytes/s) at which scaling_efficiency equals K_target.
// topo.W is ignored. Throws ArgumentError unless 0 < K_target < 1 and m >= 2.
double min_bandwidth(double K_target, const Topology& topo, double B, double s);

// Loss-penalty coefficient alpha_s bytes_per_param n C_d (m - 1) / (3 W B).
double lambda_coeff(double alpha_s, const Topology& topo, double B);

}  // namespace lsgd::perf
