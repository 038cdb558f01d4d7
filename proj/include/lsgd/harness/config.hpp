// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration. The file format is JSON with the sections
// model, topology, policy, schedule, data, eval plus a few top-level keys;
// see configs/ for annotated examples. Unknown keys are rejected.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "lsgd/data/token_stream.hpp"
#include "lsgd/engine/sync_policy.hpp"
#include "lsgd/model/model_config.hpp"
#include "lsgd/optim/cosine_schedule.hpp"
#include "lsgd/perf/perfmodel.hpp"

namespace lsgd::harness {

struct ScheduleConfig {
  std::int64_t batch_tokens = 1 << 16;  // B, global tokens per step
  std::int64_t total_rounds = 32;
  double lr_peak = 1e-3;
  std::int64_t warmup_steps = 0;
  double final_fraction = 0.1;

  bool operator==(const ScheduleConfig&) const = default;
};

struct EvalConfig {
  // 0 evaluates after every round.
  std::int64_t every_steps = 0;
  std::int64_t budget_tokens = 200000;
  int rows_per_batch = 32;

  bool operator==(const EvalConfig&) const = default;
};

inline data::CorpusSpec auto_sized_corpus() {
  data::CorpusSpec spec;
  spec.synthetic.length_tokens = 0;
  return spec;
}

struct ExperimentConfig {
  model::ModelConfig model;
  perf::Topology topology;  // topology.m is the replica count
  engine::SyncPolicy policy;
  ScheduleConfig schedule;
  data::CorpusSpec data = auto_sized_corpus();  // synthetic.length_tokens 0 sizes the corpus to the run
  EvalConfig eval;
  std::string output_dir = "runs/default";
  std::uint64_t master_seed = 0;
  int threads = 1;
  std::int64_t checkpoint_every_rounds = 0;  // 0 keeps only the final checkpoint

  // Inner steps over the whole run.
  std::int64_t total_steps() const { return schedule.total_rounds * policy.effective_s(); }
  optim::CosineSchedule inner_schedule() const;
  // Corpus spec with an automatic length resolved.
  data::CorpusSpec resolved_corpus() const;

  // Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_json_text(const ExperimentConfig& config, int indent = 2);
// Sorted keys, no whitespace. Hash input.
std::string canonical_json(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

// Missing keys take defaults. Throws ConfigError with a line number on syntax
// errors and a dotted field path on type or value errors.
ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ExperimentConfig& config);

}  // namespace lsgd::harness
