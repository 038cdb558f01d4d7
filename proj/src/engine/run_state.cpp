// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/engine/run_state.hpp"

#include "lsgd/core/error.hpp"
#include "lsgd/model/model.hpp"

namespace lsgd::engine {

InnerState InnerState::fresh(InnerKind kind, const model::ParameterVector& params, const optim::AdamWHyper& hyper) {
  InnerState state;
  state.kind = kind;
  if (kind == InnerKind::adamw) state.adamw = optim::AdamWState::zeros_like(params, hyper);
  state.adamw.hyper = hyper;
  return state;
}

RunState init_run(const model::ModelConfig& config, int m, const SyncPolicy& policy, const RunSeeds& seeds) {
  if (m < 1) throw ConfigError("topology.m must be >= 1, got " + std::to_string(m));
  policy.validate();
  RunState run;
  run.model = config;
  run.policy = policy;
  run.seeds = seeds;
  run.global_params = model::build_model(config, seeds.model);
  run.outer_state = optim::NesterovState::zeros_like(run.global_params, policy.outer);
  run.replicas.reserve(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    run.replicas.push_back({run.global_params, InnerState::fresh(policy.inner, run.global_params, policy.adamw), r});
  }
  return run;
}

bool replicas_synchronized(const RunState& run) {
  for (const auto& replica : run.replicas) {
    if (!(replica.params == run.global_params)) return false;
  }
  return true;
}

}  // namespace lsgd::engine
