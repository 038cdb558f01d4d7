// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0
//
// One JSON object per line. Fields, in order:
//   step         inner steps completed
//   round        outer syncs completed
//   phase        "inner" | "outer" | "eval"
//   train_loss   mean replica loss of the step (inner), null otherwise
//   eval_loss    validation loss of global params (eval), null otherwise
//   lr_inner     inner learning rate of the step
//   tokens_seen  global batch tokens times step

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsgd::engine {

enum class Phase { inner, outer, eval };

std::string_view to_string(Phase phase);
Phase phase_from_string(std::string_view name);

struct MetricsRecord {
  std::int64_t step = 0;
  std::int64_t round = 0;
  Phase phase = Phase::inner;
  std::optional<double> train_loss;
  std::optional<double> eval_loss;
  double lr_inner = 0.0;
  std::int64_t tokens_seen = 0;

  bool operator==(const MetricsRecord&) const = default;
};

std::string to_json_line(const MetricsRecord& record);
MetricsRecord metrics_from_json_line(std::string_view line);

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRecord>& records);
std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path);

std::vector<MetricsRecord> filter_phase(const std::vector<MetricsRecord>& records, Phase phase);

}  // namespace lsgd::engine
