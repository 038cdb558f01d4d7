// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/engine/metrics.hpp"

#include <fstream>
#include <json.hpp>

#include "lsgd/core/error.hpp"

namespace lsgd::engine {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::inner: return "inner";
    case Phase::outer: return "outer";
    case Phase::eval: return "eval";
  }
  return "inner";
}

Phase phase_from_string(std::string_view name) {
  if (name == "inner") return Phase::inner;
  if (name == "outer") return Phase::outer;
  if (name == "eval") return Phase::eval;
  throw DataError("metrics: unknown phase '" + std::string(name) + "'");
}

std::string to_json_line(const MetricsRecord& r) {
  ordered_json j;
  j["step"] = r.step;
  j["round"] = r.round;
  j["phase"] = std::string(to_string(r.phase));
  j["train_loss"] = r.train_loss ? ordered_json(*r.train_loss) : ordered_json(nullptr);
  j["eval_loss"] = r.eval_loss ? ordered_json(*r.eval_loss) : ordered_json(nullptr);
  j["lr_inner"] = r.lr_inner;
  j["tokens_seen"] = r.tokens_seen;
  return j.dump();
}

MetricsRecord metrics_from_json_line(std::string_view line) {
  try {
    const auto j = ordered_json::parse(line);
    MetricsRecord r;
    r.step = j.at("step").get<std::int64_t>();
    r.round = j.at("round").get<std::int64_t>();
    r.phase = phase_from_string(j.at("phase").get<std::string>());
    if (!j.at("train_loss").is_null()) r.train_loss = j.at("train_loss").get<double>();
    if (!j.at("eval_loss").is_null()) r.eval_loss = j.at("eval_loss").get<double>();
    r.lr_inner = j.at("lr_inner").get<double>();
    r.tokens_seen = j.at("tokens_seen").get<std::int64_t>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics: malformed record: ") + e.what());
  }
}

void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& r : records) out << to_json_line(r) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<MetricsRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<MetricsRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(metrics_from_json_line(line));
  }
  return out;
}

std::vector<MetricsRecord> filter_phase(const std::vector<MetricsRecord>& records, Phase phase) {
  std::vector<MetricsRecord> out;
  for (const auto& r : records) {
    if (r.phase == phase) out.push_back(r);
  }
  return out;
}

}  // namespace lsgd::engine
