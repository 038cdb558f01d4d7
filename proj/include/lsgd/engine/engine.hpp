// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lsgd/core/error.hpp"
#include "lsgd/data/token_stream.hpp"
#include "lsgd/engine/metrics.hpp"
#include "lsgd/engine/run_state.hpp"
#include "lsgd/optim/cosine_schedule.hpp"

namespace lsgd::engine {

// Raised when a loss or gradient stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t step, int replica, std::string segment);
  std::int64_t step() const { return step_; }
  int replica() const { return replica_; }
  const std::string& segment() const { return segment_; }

 private:
  std::int64_t step_;
  int replica_;
  std::string segment_;
};

struct InnerPhaseResult {
  std::int64_t steps = 0;
  bool exhausted = false;
};

struct StepContext {
  data::ShardPlan plan;
  optim::CosineSchedule schedule;
  int threads = 1;
};

// Global minus replica. Throws ShapeError on layout mismatch.
model::ParameterVector pseudo_gradient(const model::ParameterVector& replica, const model::ParameterVector& global);

// Runs up to `s_steps` inner steps on every replica, drawing one global batch
// per step. Appends one inner record per step. Stops early when the stream
// runs dry.
InnerPhaseResult inner_phase(RunState& run, data::TokenStream& stream, const StepContext& ctx, int s_steps,
                             std::vector<MetricsRecord>& metrics);

// Averages pseudo-gradients in replica order, applies the outer step and
// broadcasts. Throws IntegrityError on replica layout divergence.
void outer_sync(RunState& run);

// One synchronous data-parallel step: gradients averaged, identical inner
// update on every replica.
bool ddp_step(RunState& run, data::TokenStream& stream, const StepContext& ctx, std::vector<MetricsRecord>& metrics);

double evaluate(const model::ParameterVector& params, const model::ModelConfig& config,
                const std::vector<model::TokenBatch>& batches);

struct TrainOptions {
  StepContext context;
  std::int64_t total_rounds = 0;
  // 0 evaluates after every round.
  std::int64_t eval_every_steps = 0;
  std::vector<model::TokenBatch> eval_batches;
  std::function<void(const RunState&, const data::TokenStream&)> on_round_end;
};

struct TrainResult {
  std::vector<MetricsRecord> metrics;
  bool exhausted = false;
  // Last round ran fewer than s steps.
  bool truncated = false;
};

// Continues from run.step; an initial eval is recorded when starting at step 0.
TrainResult train(RunState& run, data::TokenStream& stream, const TrainOptions& options);

}  // namespace lsgd::engine
