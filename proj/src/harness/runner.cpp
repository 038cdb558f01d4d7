// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/harness/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "lsgd/core/error.hpp"
#include "lsgd/engine/checkpoint.hpp"
#include "lsgd/engine/engine.hpp"
#include "lsgd/harness/digest.hpp"
#include "lsgd/harness/version.hpp"
#include "lsgd/model/model.hpp"

namespace lsgd::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json summary_json(const RunSummary& s) {
  json j;
  j["final_train_loss"] = optional_json(s.final_train_loss);
  j["final_eval_loss"] = optional_json(s.final_eval_loss);
  j["N"] = s.non_embedding_params;
  j["N_total"] = s.total_params;
  j["D"] = s.tokens;
  j["steps"] = s.steps;
  j["rounds"] = s.rounds;
  j["exhausted"] = s.exhausted;
  j["truncated"] = s.truncated;
  j["wall_seconds"] = s.wall_seconds;
  j["tokens_per_s"] = s.tokens_per_s;
  return j;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, const std::string& started,
                    const std::string& finished) {
  json j;
  j["config_hash"] = config_hash(config);
  j["code_version"] = kVersion;
  j["started_at"] = started;
  j["finished_at"] = finished;
  j["seeds"] = {{"master", config.master_seed}, {"data", config.data.seed}};
  json files = json::array();
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    const auto rel = fs::relative(p, dir).generic_string();
    // The summary carries wall-clock throughput, so its bytes vary run to run.
    if (rel == "summary.json") {
      files.push_back({{"path", rel}, {"volatile", true}});
    } else {
      files.push_back({{"path", rel}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
    }
  }
  j["files"] = files;
  write_json(dir / "manifest.json", j);
}

std::string checkpoint_name(std::int64_t round) {
  std::ostringstream out;
  out << "round_" << std::setw(6) << std::setfill('0') << round << ".ckpt";
  return out.str();
}

}  // namespace

fs::path resolve_output_dir(const ExperimentConfig& config, const fs::path& override_dir) {
  if (!override_dir.empty()) return override_dir;
  fs::path dir = config.output_dir;
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootVariable); root != nullptr && *root != '\0') dir = fs::path(root) / dir;
  }
  return dir;
}

RunOutcome run_training(const ExperimentConfig& config, const fs::path& dir, const RunOptions& options) {
  config.validate();
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  const data::Corpus corpus(config.resolved_corpus());
  if (corpus.vocab_size() > config.model.vocab_size) {
    throw ConfigError("model.vocab_size (" + std::to_string(config.model.vocab_size) +
                      ") is smaller than the corpus vocabulary (" + std::to_string(corpus.vocab_size()) + ")");
  }
  auto stream = corpus.train_stream();

  engine::RunState run;
  std::vector<engine::MetricsRecord> previous;
  if (!options.resume_from.empty()) {
    auto ck = engine::load_checkpoint(options.resume_from);
    if (!(ck.run.model == config.model) || !(ck.run.policy == config.policy) || ck.run.m() != config.topology.m) {
      throw ConfigError("checkpoint " + options.resume_from.string() + " does not match the configuration");
    }
    run = std::move(ck.run);
    stream.seek(ck.stream_position);
    if (options.write_files && fs::exists(dir / "metrics.jsonl")) previous = engine::read_metrics(dir / "metrics.jsonl");
    std::erase_if(previous, [&](const engine::MetricsRecord& r) { return r.step > run.step; });
  } else {
    run = engine::init_run(config.model, config.topology.m, config.policy, {config.master_seed, config.data.seed});
  }

  engine::TrainOptions train;
  train.context = {data::make_shard_plan(config.topology.m, config.schedule.batch_tokens, config.model.seq_len),
                   config.inner_schedule(), config.threads};
  train.total_rounds = std::max<std::int64_t>(config.schedule.total_rounds - run.round, 0);
  train.eval_every_steps = config.eval.every_steps;
  if (config.eval.budget_tokens > 0) {
    train.eval_batches = data::fixed_batches(corpus.validation_stream(), config.eval.budget_tokens,
                                             config.model.seq_len, config.eval.rows_per_batch);
  }

  if (options.write_files) {
    fs::create_directories(dir / "checkpoints");
    save_config(dir / "config.json", config);
    fs::remove(dir / "abort.json");
  }
  if (options.write_files && config.checkpoint_every_rounds > 0) {
    train.on_round_end = [&](const engine::RunState& state, const data::TokenStream& s) {
      if (state.round % config.checkpoint_every_rounds == 0) {
        engine::save_checkpoint(dir / "checkpoints" / checkpoint_name(state.round), state, s.position());
      }
    };
  }
  if (options.verbose) {
    std::cerr << "training " << model::to_string(config.model.arch) << " d_model=" << config.model.d_model
              << " m=" << config.topology.m << " mode=" << engine::to_string(config.policy.mode)
              << " s=" << config.policy.effective_s() << " rounds=" << train.total_rounds << " -> " << dir.string()
              << '\n';
  }

  engine::TrainResult result;
  try {
    result = engine::train(run, stream, train);
  } catch (const engine::DivergenceError& e) {
    if (options.write_files) {
      json abort;
      abort["error"] = e.what();
      abort["step"] = e.step();
      abort["replica"] = e.replica();
      abort["segment"] = e.segment();
      write_json(dir / "abort.json", abort);
    }
    throw;
  }

  RunOutcome outcome;
  outcome.dir = dir;
  outcome.metrics = std::move(previous);
  outcome.metrics.insert(outcome.metrics.end(), result.metrics.begin(), result.metrics.end());

  auto& s = outcome.summary;
  for (const auto& r : outcome.metrics) {
    if (r.phase == engine::Phase::inner) s.final_train_loss = r.train_loss;
    if (r.phase == engine::Phase::eval) s.final_eval_loss = r.eval_loss;
  }
  s.non_embedding_params = model::count_non_embedding(run.global_params);
  s.total_params = static_cast<std::int64_t>(run.global_params.size());
  s.steps = run.step;
  s.rounds = run.round;
  s.tokens = config.schedule.batch_tokens * run.step;
  s.exhausted = result.exhausted;
  s.truncated = result.truncated;
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto trained = static_cast<double>(config.schedule.batch_tokens * std::max<std::int64_t>(filter_phase(result.metrics, engine::Phase::inner).size(), 0));
  s.tokens_per_s = s.wall_seconds > 0.0 ? trained / s.wall_seconds : 0.0;

  if (options.write_files) {
    engine::write_metrics(dir / "metrics.jsonl", outcome.metrics);
    engine::save_checkpoint(dir / "checkpoints" / "final.ckpt", run, stream.position());
    write_json(dir / "summary.json", summary_json(s));
    write_manifest(dir, config, started, utc_now());
  }
  if (options.verbose) {
    std::cerr << "done: steps=" << s.steps << " eval_loss="
              << (s.final_eval_loss ? std::to_string(*s.final_eval_loss) : std::string("n/a"))
              << " tokens/s=" << static_cast<long long>(s.tokens_per_s) << '\n';
  }
  return outcome;
}

ExperimentConfig with_mode(const ExperimentConfig& config, engine::SyncMode mode) {
  auto out = config;
  const auto steps = config.total_steps();
  out.policy.mode = mode;
  out.schedule.total_rounds = steps / out.policy.effective_s();
  return out;
}

ExperimentConfig with_local_steps(const ExperimentConfig& config, int s) {
  if (s < 1) throw ConfigError("s must be >= 1");
  const auto steps = config.total_steps();
  if (steps % s != 0) {
    throw ConfigError("s=" + std::to_string(s) + " does not divide the total step count " + std::to_string(steps));
  }
  auto out = config;
  out.policy.mode = engine::SyncMode::local_sgd;
  out.policy.s = s;
  out.schedule.total_rounds = steps / s;
  return out;
}

ExperimentConfig with_d_model(const ExperimentConfig& config, int d_model) {
  auto out = config;
  out.model.d_model = d_model;
  return out;
}

std::vector<SweepRow> sweep_s(const ExperimentConfig& config, const std::vector<int>& s_list,
                              const std::vector<int>& d_models, const fs::path& root, const RunOptions& options) {
  if (s_list.empty()) throw ConfigError("sweep needs at least one s value");
  const std::vector<int> sizes = d_models.empty() ? std::vector<int>{config.model.d_model} : d_models;
  std::vector<ExperimentConfig> cells;
  for (int d : sizes) {
    for (int s : s_list) {
      auto cell = with_local_steps(with_d_model(config, d), s);
      cell.validate();
      cells.push_back(cell);
    }
  }
  std::vector<SweepRow> rows;
  for (const auto& cell : cells) {
    const auto dir = root / ("d" + std::to_string(cell.model.d_model) + "_s" + std::to_string(cell.policy.s));
    auto outcome = run_training(cell, dir, options);
    if (!outcome.summary.final_eval_loss) throw ConfigError("sweep runs need eval.budget_tokens > 0");
    rows.push_back({cell.policy.s, outcome.summary.non_embedding_params, *outcome.summary.final_eval_loss, dir});
  }
  if (options.write_files) {
    fs::create_directories(root);
    std::ofstream out(root / "sweep_s.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write " + (root / "sweep_s.csv").string());
    out << kSweepCsvHeader << '\n' << std::setprecision(17);
    for (const auto& r : rows) out << r.s << ',' << r.N << ',' << r.final_eval_loss << '\n';
  }
  return rows;
}

}  // namespace lsgd::harness
