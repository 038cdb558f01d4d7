// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "lsgd/engine/sync_policy.hpp"
#include "lsgd/model/model_config.hpp"
#include "lsgd/model/parameter_vector.hpp"
#include "lsgd/optim/adamw.hpp"
#include "lsgd/optim/nesterov.hpp"
#include "lsgd/optim/sgd.hpp"

namespace lsgd::engine {

struct InnerState {
  InnerKind kind = InnerKind::adamw;
  optim::AdamWState adamw;  // kind == adamw
  optim::SgdState sgd;      // kind == sgd

  static InnerState fresh(InnerKind kind, const model::ParameterVector& params, const optim::AdamWHyper& hyper);
  std::int64_t step_count() const { return kind == InnerKind::adamw ? adamw.step_count : sgd.step_count; }
};

struct Replica {
  model::ParameterVector params;
  InnerState inner;
  int shard_id = 0;
};

struct RunSeeds {
  std::uint64_t model = 0;
  std::uint64_t data = 0;

  bool operator==(const RunSeeds&) const = default;
};

struct RunState {
  model::ModelConfig model;
  SyncPolicy policy;
  RunSeeds seeds;
  model::ParameterVector global_params;
  std::vector<Replica> replicas;
  optim::NesterovState outer_state;
  std::int64_t step = 0;
  std::int64_t round = 0;

  int m() const { return static_cast<int>(replicas.size()); }
  std::int64_t steps_into_round() const { return step - round * policy.effective_s(); }
};

// Throws ConfigError for m < 1 or an invalid policy/model.
RunState init_run(const model::ModelConfig& config, int m, const SyncPolicy& policy, const RunSeeds& seeds);

// True when every replica equals global_params bitwise.
bool replicas_synchronized(const RunState& run);

}  // namespace lsgd::engine
