// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/engine/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "lsgd/core/error.hpp"
#include "lsgd/model/model.hpp"

namespace lsgd::engine {

namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

constexpr std::array<char, 8> kMagic{'L', 'S', 'G', 'D', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

using json = nlohmann::json;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

constexpr std::uint64_t kFnvBasis = 0xcbf29ce484222325ULL;

json model_to_json(const model::ModelConfig& c) {
  return {{"arch", std::string(model::to_string(c.arch))}, {"vocab_size", c.vocab_size}, {"d_model", c.d_model},
          {"n_layers", c.n_layers}, {"n_heads", c.n_heads}, {"seq_len", c.seq_len},
          {"tie_embeddings", c.tie_embeddings}};
}

model::ModelConfig model_from_json(const json& j) {
  model::ModelConfig c;
  c.arch = model::architecture_from_string(j.at("arch").get<std::string>());
  c.vocab_size = j.at("vocab_size").get<int>();
  c.d_model = j.at("d_model").get<int>();
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.seq_len = j.at("seq_len").get<int>();
  c.tie_embeddings = j.at("tie_embeddings").get<bool>();
  return c;
}

json policy_to_json(const SyncPolicy& p) {
  return {{"s", p.s},
          {"mode", std::string(to_string(p.mode))},
          {"inner", std::string(to_string(p.inner))},
          {"outer_lr", p.outer.lr},
          {"outer_momentum", p.outer.momentum},
          {"adamw", {{"lr_peak", p.adamw.lr_peak}, {"beta1", p.adamw.beta1}, {"beta2", p.adamw.beta2},
                     {"eps", p.adamw.eps}, {"weight_decay", p.adamw.weight_decay}}},
          {"reset_inner_state", p.reset_inner_state}};
}

SyncPolicy policy_from_json(const json& j) {
  SyncPolicy p;
  p.s = j.at("s").get<int>();
  p.mode = sync_mode_from_string(j.at("mode").get<std::string>());
  p.inner = inner_kind_from_string(j.at("inner").get<std::string>());
  p.outer.lr = j.at("outer_lr").get<double>();
  p.outer.momentum = j.at("outer_momentum").get<double>();
  const auto& a = j.at("adamw");
  p.adamw = {a.at("lr_peak").get<double>(), a.at("beta1").get<double>(), a.at("beta2").get<double>(),
             a.at("eps").get<double>(), a.at("weight_decay").get<double>()};
  p.reset_inner_state = j.at("reset_inner_state").get<bool>();
  return p;
}

void write_array(std::ofstream& out, std::uint64_t& hash, std::span<const double> v) {
  const auto bytes = v.size() * sizeof(double);
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(bytes));
  hash = fnv1a(hash, v.data(), bytes);
}

void read_array(std::ifstream& in, std::uint64_t& hash, std::span<double> v, const std::string& what) {
  const auto bytes = v.size() * sizeof(double);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IntegrityError("checkpoint truncated in " + what);
  hash = fnv1a(hash, v.data(), bytes);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const RunState& run, std::uint64_t stream_position) {
  json header;
  header["model"] = model_to_json(run.model);
  header["policy"] = policy_to_json(run.policy);
  header["seeds"] = {{"model", run.seeds.model}, {"data", run.seeds.data}};
  header["m"] = run.m();
  header["step"] = run.step;
  header["round"] = run.round;
  header["stream_position"] = stream_position;
  json replicas = json::array();
  for (const auto& r : run.replicas) {
    replicas.push_back({{"shard_id", r.shard_id}, {"inner_steps", r.inner.step_count()}});
  }
  header["replicas"] = replicas;
  json segments = json::array();
  for (const auto& s : run.global_params.segments()) {
    segments.push_back({{"name", s.name}, {"offset", s.offset}, {"length", s.length}, {"embedding", s.is_embedding}});
  }
  header["segments"] = segments;
  header["payload"] = run.policy.inner == InnerKind::adamw
                          ? json::array({"global", "outer_velocity", "replica[params, first_moment, second_moment]"})
                          : json::array({"global", "outer_velocity", "replica[params]"});
  const std::string text = header.dump();

  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint " + tmp);
    out.write(kMagic.data(), kMagic.size());
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    const std::uint64_t len = text.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    std::uint64_t hash = kFnvBasis;
    write_array(out, hash, run.global_params.values());
    write_array(out, hash, run.outer_state.velocity.values());
    for (const auto& r : run.replicas) {
      write_array(out, hash, r.params.values());
      if (r.inner.kind == InnerKind::adamw) {
        write_array(out, hash, r.inner.adamw.first_moment.values());
        write_array(out, hash, r.inner.adamw.second_moment.values());
      }
    }
    out.write(reinterpret_cast<const char*>(&hash), sizeof hash);
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::array<char, 8> magic{};
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || magic != kMagic) throw IntegrityError(path.string() + " is not a checkpoint");
  if (version != kVersion) throw IntegrityError("unsupported checkpoint version " + std::to_string(version));
  if (len > (std::uint64_t{1} << 30)) throw IntegrityError("checkpoint header too large");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw IntegrityError("checkpoint truncated in header");

  Checkpoint ck;
  std::vector<std::int64_t> inner_steps;
  std::vector<int> shard_ids;
  int m = 0;
  try {
    const auto header = json::parse(text);
    const auto config = model_from_json(header.at("model"));
    const auto policy = policy_from_json(header.at("policy"));
    const RunSeeds seeds{header.at("seeds").at("model").get<std::uint64_t>(),
                         header.at("seeds").at("data").get<std::uint64_t>()};
    m = header.at("m").get<int>();
    ck.run = init_run(config, m, policy, seeds);
    ck.run.step = header.at("step").get<std::int64_t>();
    ck.run.round = header.at("round").get<std::int64_t>();
    ck.stream_position = header.at("stream_position").get<std::uint64_t>();
    for (const auto& r : header.at("replicas")) {
      shard_ids.push_back(r.at("shard_id").get<int>());
      inner_steps.push_back(r.at("inner_steps").get<std::int64_t>());
    }
    std::vector<model::Segment> segments;
    for (const auto& s : header.at("segments")) {
      segments.push_back({s.at("name").get<std::string>(), s.at("offset").get<std::size_t>(),
                          s.at("length").get<std::size_t>(), s.at("embedding").get<bool>()});
    }
    if (!(segments == ck.run.global_params.segments())) throw IntegrityError("checkpoint segment table mismatch");
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("checkpoint header malformed: ") + e.what());
  }
  if (shard_ids.size() != static_cast<std::size_t>(m)) throw IntegrityError("checkpoint replica table mismatch");

  auto& run = ck.run;
  std::uint64_t hash = kFnvBasis;
  read_array(in, hash, run.global_params.values(), "global");
  read_array(in, hash, run.outer_state.velocity.values(), "outer velocity");
  for (std::size_t r = 0; r < run.replicas.size(); ++r) {
    auto& replica = run.replicas[r];
    replica.shard_id = shard_ids[r];
    read_array(in, hash, replica.params.values(), "replica params");
    if (replica.inner.kind == InnerKind::adamw) {
      read_array(in, hash, replica.inner.adamw.first_moment.values(), "first moment");
      read_array(in, hash, replica.inner.adamw.second_moment.values(), "second moment");
      replica.inner.adamw.step_count = inner_steps[r];
    } else {
      replica.inner.sgd.step_count = inner_steps[r];
    }
  }
  std::uint64_t stored = 0;
  in.read(reinterpret_cast<char*>(&stored), sizeof stored);
  if (!in || stored != hash) throw IntegrityError("checkpoint checksum mismatch");
  return ck;
}

}  // namespace lsgd::engine
