// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run directory layout:
//   config.json      the configuration as run
//   metrics.jsonl    one record per line, see lsgd/engine/metrics.hpp
//   checkpoints/     round_NNNNNN.ckpt at the configured cadence, final.ckpt
//   summary.json     final losses, N, D, throughput
//   manifest.json    config hash, version, timestamps, seeds, file inventory
//   abort.json       only when training diverged

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lsgd/engine/metrics.hpp"
#include "lsgd/harness/config.hpp"

namespace lsgd::harness {

inline constexpr const char* kOutputRootVariable = "LSGD_OUTPUT_ROOT";

// `override_dir` wins when non-empty; otherwise config.output_dir, placed
// under $LSGD_OUTPUT_ROOT when that is set and the path is relative.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::filesystem::path& override_dir);

struct RunSummary {
  std::optional<double> final_train_loss;
  std::optional<double> final_eval_loss;
  std::int64_t non_embedding_params = 0;
  std::int64_t total_params = 0;
  std::int64_t tokens = 0;  // D = B * steps
  std::int64_t steps = 0;
  std::int64_t rounds = 0;
  bool exhausted = false;
  bool truncated = false;
  double wall_seconds = 0.0;
  double tokens_per_s = 0.0;
};

struct RunOutcome {
  RunSummary summary;
  std::vector<engine::MetricsRecord> metrics;
  std::filesystem::path dir;
};

struct RunOptions {
  std::filesystem::path resume_from;  // checkpoint to continue from
  bool write_files = true;
  bool verbose = false;
};

// Trains one configuration. Throws ConfigError for invalid configs and
// engine::DivergenceError after writing abort.json.
RunOutcome run_training(const ExperimentConfig& config, const std::filesystem::path& dir,
                        const RunOptions& options = {});

// Same total inner steps, different synchronization mode.
ExperimentConfig with_mode(const ExperimentConfig& config, engine::SyncMode mode);
// Same total inner steps, different s. Throws ConfigError when s does not
// divide the step count.
ExperimentConfig with_local_steps(const ExperimentConfig& config, int s);
ExperimentConfig with_d_model(const ExperimentConfig& config, int d_model);

struct SweepRow {
  int s = 1;
  std::int64_t N = 0;
  double final_eval_loss = 0.0;
  std::filesystem::path run_dir;
};

inline constexpr const char* kSweepCsvHeader = "s,N,final_eval_loss";

// One run per (d_model, s); writes <root>/sweep_s.csv.
std::vector<SweepRow> sweep_s(const ExperimentConfig& config, const std::vector<int>& s_list,
                              const std::vector<int>& d_models, const std::filesystem::path& root,
                              const RunOptions& options = {});

}  // namespace lsgd::harness
