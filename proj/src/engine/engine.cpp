// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/engine/engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "lsgd/model/model.hpp"

namespace lsgd::engine {

namespace {

using wide = __float128;

// Runs fn(i) for i in [0, n) on up to `threads` threads. Exceptions are
// rethrown in index order so failures do not depend on scheduling.
template <typename Fn>
void for_each_replica(int n, int threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  auto run_one = [&](int i) {
    try {
      fn(i);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  };
  const int workers = std::clamp(threads, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int i = w; i < n; i += workers) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void apply_inner(InnerState& state, model::ParameterVector& params, const model::ParameterVector& grad, double lr) {
  if (state.kind == InnerKind::adamw) {
    optim::adamw_step(params, grad, state.adamw, lr);
  } else {
    optim::sgd_step(params, grad, state.sgd, lr);
  }
}

void check_finite(double loss, const model::ParameterVector& params, const model::ParameterVector& grad,
                  std::int64_t step, int replica) {
  if (std::isfinite(loss)) {
    if (auto bad = grad.first_non_finite()) throw DivergenceError(step, replica, bad->segment);
    return;
  }
  if (auto bad = params.first_non_finite()) throw DivergenceError(step, replica, bad->segment);
  if (auto bad = grad.first_non_finite()) throw DivergenceError(step, replica, bad->segment);
  throw DivergenceError(step, replica, "loss");
}

double mean_in_order(const std::vector<double>& values) {
  long double sum = 0.0L;
  for (double v : values) sum += v;
  return static_cast<double>(sum / static_cast<long double>(values.size()));
}

MetricsRecord record(const RunState& run, const StepContext& ctx, Phase phase, double lr) {
  MetricsRecord r;
  r.step = run.step;
  r.round = run.round;
  r.phase = phase;
  r.lr_inner = lr;
  r.tokens_seen = ctx.plan.global_batch_tokens * run.step;
  return r;
}

}  // namespace

DivergenceError::DivergenceError(std::int64_t step, int replica, std::string segment)
    : Error("non-finite value at step " + std::to_string(step) + ", replica " + std::to_string(replica) +
            ", segment " + segment),
      step_(step),
      replica_(replica),
      segment_(std::move(segment)) {}

model::ParameterVector pseudo_gradient(const model::ParameterVector& replica, const model::ParameterVector& global) {
  model::require_same_layout(global, replica, "pseudo_gradient");
  auto delta = model::ParameterVector::zeros_like(global);
  const auto g = global.values();
  const auto r = replica.values();
  auto d = delta.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = g[i] - r[i];
  return delta;
}

InnerPhaseResult inner_phase(RunState& run, data::TokenStream& stream, const StepContext& ctx, int s_steps,
                             std::vector<MetricsRecord>& metrics) {
  if (ctx.plan.m != run.m()) throw ConfigError("shard plan has m=" + std::to_string(ctx.plan.m) + " but run has " +
                                               std::to_string(run.m()) + " replicas");
  InnerPhaseResult result;
  std::vector<std::vector<model::TokenBatch>> shards;
  for (int j = 0; j < s_steps; ++j) {
    auto next = data::next_global_batch(stream, ctx.plan);
    if (!next) {
      result.exhausted = true;
      break;
    }
    shards.push_back(std::move(*next));
  }
  const auto steps = static_cast<int>(shards.size());
  result.steps = steps;
  if (steps == 0) return result;

  std::vector<double> lrs(static_cast<std::size_t>(steps));
  for (int j = 0; j < steps; ++j) lrs[static_cast<std::size_t>(j)] = optim::cosine_lr(ctx.schedule, run.step + j);

  const int m = run.m();
  std::vector<std::vector<double>> losses(static_cast<std::size_t>(steps), std::vector<double>(static_cast<std::size_t>(m)));
  for_each_replica(m, ctx.threads, [&](int r) {
    auto& replica = run.replicas[static_cast<std::size_t>(r)];
    for (int j = 0; j < steps; ++j) {
      const auto& batch = shards[static_cast<std::size_t>(j)][static_cast<std::size_t>(replica.shard_id)];
      auto lg = model::loss_and_gradient(replica.params, run.model, batch);
      check_finite(lg.loss, replica.params, lg.gradient, run.step + j + 1, r);
      apply_inner(replica.inner, replica.params, lg.gradient, lrs[static_cast<std::size_t>(j)]);
      losses[static_cast<std::size_t>(j)][static_cast<std::size_t>(r)] = lg.loss;
    }
  });

  for (int j = 0; j < steps; ++j) {
    run.step += 1;
    auto r = record(run, ctx, Phase::inner, lrs[static_cast<std::size_t>(j)]);
    r.train_loss = mean_in_order(losses[static_cast<std::size_t>(j)]);
    metrics.push_back(r);
  }
  return result;
}

void outer_sync(RunState& run) {
  for (std::size_t r = 0; r < run.replicas.size(); ++r) {
    if (!run.replicas[r].params.same_layout(run.global_params)) {
      throw IntegrityError("outer_sync: replica " + std::to_string(r) + " layout diverged from global parameters");
    }
  }
  model::require_same_layout(run.global_params, run.outer_state.velocity, "outer_sync velocity");

  auto theta = run.global_params.values();
  auto velocity = run.outer_state.velocity.values();
  const wide inv_m = wide(1) / wide(run.m());
  const wide lr = run.outer_state.hyper.lr;
  const wide mu = run.outer_state.hyper.momentum;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const wide t = theta[i];
    wide sum = 0;
    for (const auto& replica : run.replicas) sum += t - wide(replica.params.values()[i]);
    wide th = t;
    wide v = velocity[i];
    optim::nesterov_update<wide>(th, v, sum * inv_m, lr, mu);
    theta[i] = static_cast<double>(th);
    velocity[i] = static_cast<double>(v);
  }

  for (auto& replica : run.replicas) {
    replica.params = run.global_params;
    if (run.policy.reset_inner_state) {
      replica.inner = InnerState::fresh(run.policy.inner, run.global_params, run.policy.adamw);
    }
  }
  run.round += 1;
}

bool ddp_step(RunState& run, data::TokenStream& stream, const StepContext& ctx, std::vector<MetricsRecord>& metrics) {
  if (ctx.plan.m != run.m()) throw ConfigError("shard plan has m=" + std::to_string(ctx.plan.m) + " but run has " +
                                               std::to_string(run.m()) + " replicas");
  auto shards = data::next_global_batch(stream, ctx.plan);
  if (!shards) return false;
  const int m = run.m();
  const double lr = optim::cosine_lr(ctx.schedule, run.step);

  std::vector<model::ParameterVector> grads(static_cast<std::size_t>(m));
  std::vector<double> losses(static_cast<std::size_t>(m));
  for_each_replica(m, ctx.threads, [&](int r) {
    const auto& replica = run.replicas[static_cast<std::size_t>(r)];
    auto lg = model::loss_and_gradient(replica.params, run.model, (*shards)[static_cast<std::size_t>(replica.shard_id)]);
    check_finite(lg.loss, replica.params, lg.gradient, run.step + 1, r);
    losses[static_cast<std::size_t>(r)] = lg.loss;
    grads[static_cast<std::size_t>(r)] = std::move(lg.gradient);
  });

  auto mean_grad = model::ParameterVector::zeros_like(run.global_params);
  auto out = mean_grad.values();
  const wide inv_m = wide(1) / wide(m);
  for (std::size_t i = 0; i < out.size(); ++i) {
    wide sum = 0;
    for (const auto& g : grads) sum += wide(g.values()[i]);
    out[i] = static_cast<double>(sum * inv_m);
  }
  for_each_replica(m, ctx.threads, [&](int r) {
    auto& replica = run.replicas[static_cast<std::size_t>(r)];
    apply_inner(replica.inner, replica.params, mean_grad, lr);
  });
  run.global_params = run.replicas.front().params;

  run.step += 1;
  auto inner = record(run, ctx, Phase::inner, lr);
  inner.train_loss = mean_in_order(losses);
  metrics.push_back(inner);
  run.round += 1;
  metrics.push_back(record(run, ctx, Phase::outer, lr));
  return true;
}

double evaluate(const model::ParameterVector& params, const model::ModelConfig& config,
                const std::vector<model::TokenBatch>& batches) {
  if (batches.empty()) throw ArgumentError("evaluate: no batches");
  long double weighted = 0.0L;
  long double tokens = 0.0L;
  for (const auto& b : batches) {
    const auto n = static_cast<long double>(b.token_count());
    weighted += n * static_cast<long double>(model::forward_loss(params, config, b));
    tokens += n;
  }
  return static_cast<double>(weighted / tokens);
}

TrainResult train(RunState& run, data::TokenStream& stream, const TrainOptions& options) {
  const auto& ctx = options.context;
  const int s = run.policy.effective_s();
  TrainResult result;
  auto& metrics = result.metrics;
  std::int64_t last_eval_step = -1;

  auto eval_now = [&] {
    if (options.eval_batches.empty()) return;
    auto r = record(run, ctx, Phase::eval, optim::cosine_lr(ctx.schedule, std::max<std::int64_t>(run.step - 1, 0)));
    r.eval_loss = evaluate(run.global_params, run.model, options.eval_batches);
    metrics.push_back(r);
    last_eval_step = run.step;
  };

  if (run.step == 0) eval_now();

  for (std::int64_t k = 0; k < options.total_rounds; ++k) {
    const std::int64_t before = run.step;
    if (run.policy.mode == SyncMode::ddp_baseline) {
      if (!ddp_step(run, stream, ctx, metrics)) {
        result.exhausted = true;
        break;
      }
    } else {
      const auto phase = inner_phase(run, stream, ctx, s, metrics);
      if (phase.steps == 0) {
        result.exhausted = true;
        break;
      }
      outer_sync(run);
      metrics.push_back(record(run, ctx, Phase::outer, optim::cosine_lr(ctx.schedule, run.step - 1)));
      if (phase.exhausted) {
        result.exhausted = true;
        result.truncated = phase.steps < s;
      }
    }
    const auto every = options.eval_every_steps;
    if (every <= 0 || before / every < run.step / every) eval_now();
    if (options.on_round_end) options.on_round_end(run, stream);
    if (result.exhausted) break;
  }
  if (last_eval_step != run.step) eval_now();
  return result;
}

}  // namespace lsgd::engine
