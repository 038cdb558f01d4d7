// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/harness/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "lsgd/core/error.hpp"
#include "lsgd/harness/digest.hpp"

namespace lsgd::harness {

namespace {

using json = nlohmann::json;

// Reads one JSON object, tracking its dotted path and rejecting unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type (" + std::string(j_.at(key).type_name()) + ")");
    }
  }

  template <typename Enum, typename Parse>
  void read_enum(const char* key, Enum& out, Parse parse) {
    std::string text;
    bool present = j_.contains(key);
    read(key, text);
    if (!present) return;
    try {
      out = parse(text);
    } catch (const Error& e) {
      throw ConfigError(field(key) + ": " + e.what());
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(j_.contains(key) ? j_.at(key) : empty, field(key));
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(field(key.c_str()) + ": unknown key");
    }
  }

  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json to_json(const ExperimentConfig& c) {
  const auto& m = c.model;
  const auto& t = c.topology;
  const auto& p = c.policy;
  const auto& s = c.schedule;
  const auto& d = c.data;
  const auto& syn = d.synthetic;
  return {
      {"model",
       {{"arch", std::string(model::to_string(m.arch))}, {"vocab_size", m.vocab_size}, {"d_model", m.d_model},
        {"n_layers", m.n_layers}, {"n_heads", m.n_heads}, {"seq_len", m.seq_len},
        {"tie_embeddings", m.tie_embeddings}}},
      {"topology",
       {{"m", t.m}, {"n", t.n}, {"C_d", t.C_d}, {"W", t.W}, {"bytes_per_param", t.bytes_per_param}}},
      {"policy",
       {{"mode", std::string(engine::to_string(p.mode))},
        {"s", p.s},
        {"inner", std::string(engine::to_string(p.inner))},
        {"outer", {{"lr", p.outer.lr}, {"momentum", p.outer.momentum}}},
        {"adamw",
         {{"beta1", p.adamw.beta1}, {"beta2", p.adamw.beta2}, {"eps", p.adamw.eps},
          {"weight_decay", p.adamw.weight_decay}}},
        {"reset_inner_state", p.reset_inner_state}}},
      {"schedule",
       {{"batch_tokens", s.batch_tokens}, {"total_rounds", s.total_rounds}, {"lr_peak", s.lr_peak},
        {"warmup_steps", s.warmup_steps}, {"final_fraction", s.final_fraction}}},
      {"data",
       {{"source", std::string(data::to_string(d.source))},
        {"path", d.path.string()},
        {"seed", d.seed},
        {"validation_fraction", d.validation_fraction},
        {"synthetic",
         {{"kind", std::string(data::to_string(syn.kind))}, {"vocab_size", syn.vocab_size},
          {"length_tokens", syn.length_tokens}, {"entropy", syn.entropy}, {"expansion", syn.expansion},
          {"state_bits", syn.state_bits},
          {"determinism", syn.determinism}, {"period", syn.period}}}}},
      {"eval",
       {{"every_steps", c.eval.every_steps}, {"budget_tokens", c.eval.budget_tokens},
        {"rows_per_batch", c.eval.rows_per_batch}}},
      {"output_dir", c.output_dir},
      {"master_seed", c.master_seed},
      {"threads", c.threads},
      {"checkpoint_every_rounds", c.checkpoint_every_rounds},
  };
}

ExperimentConfig from_json(const json& root) {
  ExperimentConfig c;
  Section top(root, "");

  auto m = top.child("model");
  m.read_enum("arch", c.model.arch, model::architecture_from_string);
  m.read("vocab_size", c.model.vocab_size);
  m.read("d_model", c.model.d_model);
  m.read("n_layers", c.model.n_layers);
  m.read("n_heads", c.model.n_heads);
  m.read("seq_len", c.model.seq_len);
  m.read("tie_embeddings", c.model.tie_embeddings);
  m.finish();

  auto t = top.child("topology");
  t.read("m", c.topology.m);
  t.read("n", c.topology.n);
  t.read("C_d", c.topology.C_d);
  t.read("W", c.topology.W);
  t.read("bytes_per_param", c.topology.bytes_per_param);
  t.finish();

  auto p = top.child("policy");
  p.read_enum("mode", c.policy.mode, engine::sync_mode_from_string);
  p.read("s", c.policy.s);
  p.read_enum("inner", c.policy.inner, engine::inner_kind_from_string);
  auto outer = p.child("outer");
  outer.read("lr", c.policy.outer.lr);
  outer.read("momentum", c.policy.outer.momentum);
  outer.finish();
  auto adamw = p.child("adamw");
  adamw.read("beta1", c.policy.adamw.beta1);
  adamw.read("beta2", c.policy.adamw.beta2);
  adamw.read("eps", c.policy.adamw.eps);
  adamw.read("weight_decay", c.policy.adamw.weight_decay);
  adamw.finish();
  p.read("reset_inner_state", c.policy.reset_inner_state);
  p.finish();

  auto s = top.child("schedule");
  s.read("batch_tokens", c.schedule.batch_tokens);
  s.read("total_rounds", c.schedule.total_rounds);
  s.read("lr_peak", c.schedule.lr_peak);
  s.read("warmup_steps", c.schedule.warmup_steps);
  s.read("final_fraction", c.schedule.final_fraction);
  s.finish();

  auto d = top.child("data");
  d.read_enum("source", c.data.source, data::stream_source_from_string);
  std::string path = c.data.path.string();
  d.read("path", path);
  c.data.path = path;
  d.read("seed", c.data.seed);
  d.read("validation_fraction", c.data.validation_fraction);
  auto syn = d.child("synthetic");
  syn.read_enum("kind", c.data.synthetic.kind, data::synthetic_kind_from_string);
  syn.read("vocab_size", c.data.synthetic.vocab_size);
  syn.read("length_tokens", c.data.synthetic.length_tokens);
  syn.read("entropy", c.data.synthetic.entropy);
  syn.read("expansion", c.data.synthetic.expansion);
  syn.read("state_bits", c.data.synthetic.state_bits);
  syn.read("determinism", c.data.synthetic.determinism);
  syn.read("period", c.data.synthetic.period);
  syn.finish();
  d.finish();

  auto e = top.child("eval");
  e.read("every_steps", c.eval.every_steps);
  e.read("budget_tokens", c.eval.budget_tokens);
  e.read("rows_per_batch", c.eval.rows_per_batch);
  e.finish();

  top.read("output_dir", c.output_dir);
  top.read("master_seed", c.master_seed);
  top.read("threads", c.threads);
  top.read("checkpoint_every_rounds", c.checkpoint_every_rounds);
  top.finish();
  return c;
}

}  // namespace

optim::CosineSchedule ExperimentConfig::inner_schedule() const {
  return {schedule.lr_peak, std::max<std::int64_t>(total_steps(), 1), schedule.final_fraction,
          schedule.warmup_steps};
}

data::CorpusSpec ExperimentConfig::resolved_corpus() const {
  auto spec = data;
  if (spec.source == data::StreamSource::synthetic && spec.synthetic.length_tokens == 0) {
    const double train = static_cast<double>(schedule.batch_tokens * total_steps() + 1);
    const double needed_for_train = train / (1.0 - spec.validation_fraction);
    const double needed_for_eval = static_cast<double>(eval.budget_tokens + 1) / spec.validation_fraction;
    spec.synthetic.length_tokens = static_cast<std::int64_t>(std::ceil(std::max(needed_for_train, needed_for_eval))) + 1;
  }
  return spec;
}

void ExperimentConfig::validate() const {
  try {
    model.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  try {
    topology.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
  policy.validate();
  const auto& s = schedule;
  if (s.batch_tokens <= 0) throw ConfigError("schedule.batch_tokens must be positive");
  if (s.batch_tokens % (static_cast<std::int64_t>(topology.m) * model.seq_len) != 0) {
    throw ConfigError("schedule.batch_tokens (" + std::to_string(s.batch_tokens) +
                      ") must be divisible by topology.m * model.seq_len (" +
                      std::to_string(static_cast<std::int64_t>(topology.m) * model.seq_len) + ")");
  }
  if (s.total_rounds < 0) throw ConfigError("schedule.total_rounds must be >= 0");
  if (!(std::isfinite(s.lr_peak) && s.lr_peak >= 0.0)) throw ConfigError("schedule.lr_peak must be finite and >= 0");
  if (s.warmup_steps < 0) throw ConfigError("schedule.warmup_steps must be >= 0");
  if (!(s.final_fraction > 0.0 && s.final_fraction <= 1.0)) {
    throw ConfigError("schedule.final_fraction must lie in (0, 1]");
  }
  if (!(data.validation_fraction > 0.0 && data.validation_fraction < 1.0)) {
    throw ConfigError("data.validation_fraction must lie in (0, 1)");
  }
  if (data.source == data::StreamSource::synthetic) {
    if (data.synthetic.vocab_size != model.vocab_size) {
      throw ConfigError("data.synthetic.vocab_size must equal model.vocab_size");
    }
    if (data.synthetic.length_tokens < 0) throw ConfigError("data.synthetic.length_tokens must be >= 0");
    try {
      auto resolved = resolved_corpus().synthetic;
      resolved.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("data.synthetic: ") + e.what());
    }
  } else if (data.path.empty()) {
    throw ConfigError("data.path is required when data.source is file");
  }
  if (eval.every_steps < 0) throw ConfigError("eval.every_steps must be >= 0");
  if (eval.budget_tokens < 0) throw ConfigError("eval.budget_tokens must be >= 0");
  if (eval.rows_per_batch < 1) throw ConfigError("eval.rows_per_batch must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (checkpoint_every_rounds < 0) throw ConfigError("checkpoint_every_rounds must be >= 0");
}

std::string to_json_text(const ExperimentConfig& config, int indent) { return to_json(config).dump(indent); }

std::string canonical_json(const ExperimentConfig& config) { return to_json(config).dump(); }

std::string config_hash(const ExperimentConfig& config) { return sha256_hex(canonical_json(config)); }

ExperimentConfig config_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    throw ConfigError("config syntax error at line " + std::to_string(line) + ": " + e.what());
  }
  return from_json(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return config_from_json_text(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& path, const ExperimentConfig& config) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json_text(config) << '\n';
}

}  // namespace lsgd::harness
