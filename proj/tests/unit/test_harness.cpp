// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>

#include "lsgd/core/error.hpp"
#include "lsgd/engine/engine.hpp"
#include "lsgd/harness/cli.hpp"
#include "lsgd/harness/config.hpp"
#include "lsgd/harness/digest.hpp"
#include "lsgd/harness/fitting.hpp"
#include "lsgd/harness/runner.hpp"
#include "lsgd/harness/tables.hpp"
#include "lsgd/perf/scenario.hpp"

using namespace lsgd;
using namespace lsgd::harness;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lsgd_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc);
  out << text;
}

ExperimentConfig tiny_config() {
  ExperimentConfig c;
  c.model.vocab_size = 32;
  c.model.d_model = 16;
  c.model.n_layers = 1;
  c.model.n_heads = 2;
  c.model.seq_len = 16;
  c.topology.m = 2;
  c.policy.s = 4;
  c.schedule.batch_tokens = 128;
  c.schedule.total_rounds = 4;
  c.schedule.lr_peak = 3e-3;
  c.data.synthetic.vocab_size = 32;
  c.data.synthetic.entropy = 2.5;
  c.data.seed = 5;
  c.eval.every_steps = 8;
  c.eval.budget_tokens = 1024;
  c.master_seed = 3;
  return c;
}

struct Cli {
  int code;
  std::string out;
  std::string err;
};

Cli cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lsgd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config survives a JSON round trip", "[harness][config]") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = tiny_config();
    c.model.arch = trial % 3 == 0 ? model::Architecture::mlp : model::Architecture::transformer;
    c.model.d_model = 8 * (1 + static_cast<int>(u(rng) * 8));
    c.model.tie_embeddings = u(rng) < 0.5;
    c.topology.m = 1 << static_cast<int>(u(rng) * 3);
    c.topology.C_d = 1e12 * (1.0 + u(rng));
    c.topology.W = 1e6 * (1.0 + u(rng));
    c.policy.mode = u(rng) < 0.3 ? engine::SyncMode::ddp_baseline : engine::SyncMode::local_sgd;
    c.policy.inner = u(rng) < 0.5 ? engine::InnerKind::sgd : engine::InnerKind::adamw;
    c.policy.s = 1 + static_cast<int>(u(rng) * 64);
    c.policy.outer.lr = u(rng);
    c.policy.outer.momentum = u(rng) * 0.99;
    c.policy.adamw.weight_decay = u(rng) * 0.1;
    c.policy.reset_inner_state = u(rng) < 0.5;
    c.schedule.batch_tokens = 16 * c.topology.m * (1 + static_cast<int>(u(rng) * 8));
    c.schedule.lr_peak = u(rng) * 1e-2;
    c.schedule.final_fraction = 0.01 + 0.9 * u(rng);
    c.data.seed = rng();
    c.data.synthetic.determinism = u(rng);
    c.eval.every_steps = static_cast<std::int64_t>(u(rng) * 100);
    c.master_seed = rng();
    c.output_dir = "runs/trial_" + std::to_string(trial);
    c.threads = 1 + trial % 4;
    REQUIRE_NOTHROW(c.validate());

    const auto back = config_from_json_text(to_json_text(c));
    REQUIRE(back == c);
    REQUIRE(config_hash(back) == config_hash(c));
    REQUIRE(canonical_json(back) == canonical_json(c));
  }
}

TEST_CASE("config hash follows content", "[harness][config]") {
  auto a = tiny_config();
  auto b = a;
  REQUIRE(config_hash(a) == config_hash(b));
  REQUIRE(config_hash(a).size() == 64);
  b.policy.s = 8;
  REQUIRE(config_hash(a) != config_hash(b));
  REQUIRE(config_hash(a) == sha256_hex(canonical_json(a)));
  REQUIRE(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config errors name the field", "[harness][config]") {
  auto c = tiny_config();
  c.schedule.batch_tokens = 100;  // not divisible by m * seq_len = 32
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    REQUIRE(std::string(e.what()).find("schedule.batch_tokens") != std::string::npos);
  }

  auto expect = [](const std::string& text, const std::string& needle) {
    try {
      (void)config_from_json_text(text);
      FAIL("expected ConfigError for " << text);
    } catch (const ConfigError& e) {
      INFO(e.what());
      REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect(R"({"model": {"d_modle": 8}})", "model.d_modle");
  expect(R"({"policy": {"outer": {"lr": "fast"}}})", "policy.outer.lr");
  expect(R"({"policy": {"mode": "gossip"}})", "policy.mode");
  expect("{\n  \"model\": {\n    \"d_model\": 8,,\n  }\n}", "line 3");
}

TEST_CASE("a run writes a complete, hashed directory", "[harness][runner]") {
  const auto dir = scratch("run");
  const auto config = tiny_config();
  const auto outcome = run_training(config, dir);

  for (const char* f : {"config.json", "metrics.jsonl", "summary.json", "manifest.json", "checkpoints/final.ckpt"}) {
    REQUIRE(fs::exists(dir / f));
  }
  REQUIRE_FALSE(fs::exists(dir / "abort.json"));
  REQUIRE(outcome.summary.steps == 16);
  REQUIRE(outcome.summary.rounds == 4);
  REQUIRE(outcome.summary.tokens == 16 * 128);
  REQUIRE(outcome.summary.final_eval_loss.has_value());
  REQUIRE_FALSE(outcome.summary.exhausted);
  REQUIRE(ExperimentConfig{}.data.synthetic.length_tokens == 0);

  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  REQUIRE(manifest["config_hash"] == config_hash(load_config(dir / "config.json")));
  REQUIRE(manifest["config_hash"] == config_hash(config));
  for (const auto& f : manifest["files"]) {
    if (f.contains("volatile")) continue;
    const auto path = dir / f["path"].get<std::string>();
    REQUIRE(f["sha256"] == sha256_file(path));
    REQUIRE(f["bytes"].get<std::uintmax_t>() == fs::file_size(path));
  }

  const auto summary = json::parse(slurp(dir / "summary.json"));
  REQUIRE(summary["N"].get<std::int64_t>() == model::analytic_non_embedding_count(config.model));
  REQUIRE(summary["steps"] == 16);
}

TEST_CASE("repeated runs match except for timing", "[harness][runner]") {
  const auto a = scratch("rep_a");
  const auto b = scratch("rep_b");
  auto config = tiny_config();
  config.threads = 2;
  run_training(config, a);
  config.threads = 1;
  auto other = config;
  run_training(config, b);
  REQUIRE(slurp(a / "metrics.jsonl") == slurp(b / "metrics.jsonl"));
  REQUIRE(slurp(a / "checkpoints/final.ckpt") == slurp(b / "checkpoints/final.ckpt"));

  // Thread count is part of the config, so compare the remaining entries.
  auto ma = json::parse(slurp(a / "manifest.json"));
  auto mb = json::parse(slurp(b / "manifest.json"));
  for (auto* m : {&ma, &mb}) {
    m->erase("started_at");
    m->erase("finished_at");
    m->erase("config_hash");
    auto& files = (*m)["files"];
    for (auto it = files.begin(); it != files.end();) {
      it = (*it)["path"] == "config.json" ? files.erase(it) : std::next(it);
    }
  }
  REQUIRE(ma == mb);
}

TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run", "[harness][runner]") {
  const auto full = scratch("resume_full");
  const auto part = scratch("resume_part");
  auto config = tiny_config();
  config.checkpoint_every_rounds = 2;
  run_training(config, full);
  REQUIRE(fs::exists(full / "checkpoints/round_000002.ckpt"));

  RunOptions options;
  options.resume_from = full / "checkpoints/round_000002.ckpt";
  const auto resumed = run_training(config, part, options);
  REQUIRE(resumed.summary.steps == 16);
  REQUIRE(slurp(full / "checkpoints/final.ckpt") == slurp(part / "checkpoints/final.ckpt"));

  auto wrong = config;
  wrong.policy.s = 8;
  wrong.schedule.total_rounds = 2;
  REQUIRE_THROWS_AS(run_training(wrong, scratch("resume_wrong"), options), ConfigError);
}

TEST_CASE("divergence writes abort.json and exits with code 3", "[harness][runner]") {
  const auto dir = scratch("diverge");
  auto config = tiny_config();
  config.policy.inner = engine::InnerKind::sgd;
  config.schedule.lr_peak = 1e300;
  config.output_dir = dir.string();
  save_config(dir / "bad.json", config);
  const auto r = cli({"train", "--config", (dir / "bad.json").string(), "--quiet"});
  REQUIRE(r.code == kExitDiverged);
  const auto abort = json::parse(slurp(dir / "abort.json"));
  REQUIRE(abort["step"].get<int>() >= 1);
  REQUIRE_FALSE(abort["segment"].get<std::string>().empty());
}

TEST_CASE("output root comes from the environment for relative paths", "[harness][runner]") {
  auto c = tiny_config();
  c.output_dir = "runs/x";
  ::setenv(kOutputRootVariable, "/tmp/root", 1);
  REQUIRE(resolve_output_dir(c, {}) == fs::path("/tmp/root/runs/x"));
  REQUIRE(resolve_output_dir(c, "/elsewhere") == fs::path("/elsewhere"));
  c.output_dir = "/abs/y";
  REQUIRE(resolve_output_dir(c, {}) == fs::path("/abs/y"));
  ::unsetenv(kOutputRootVariable);
  c.output_dir = "runs/x";
  REQUIRE(resolve_output_dir(c, {}) == fs::path("runs/x"));
}

TEST_CASE("matched-step helpers keep the step count", "[harness][runner]") {
  auto c = tiny_config();
  REQUIRE(c.total_steps() == 16);
  REQUIRE(with_local_steps(c, 8).schedule.total_rounds == 2);
  REQUIRE(with_local_steps(c, 1).total_steps() == 16);
  REQUIRE_THROWS_AS(with_local_steps(c, 3), ConfigError);
  const auto ddp = with_mode(c, engine::SyncMode::ddp_baseline);
  REQUIRE(ddp.total_steps() == 16);
  REQUIRE(ddp.schedule.total_rounds == 16);
}

TEST_CASE("sweep produces one row per size and s", "[harness][sweep]") {
  const auto root = scratch("sweep");
  auto c = tiny_config();
  c.model.n_layers = 1;
  c.schedule.total_rounds = 2;  // 8 steps
  c.eval.budget_tokens = 256;
  const auto rows = sweep_s(c, {1, 2, 4, 8}, {8, 16, 24}, root);
  REQUIRE(rows.size() == 12);
  const auto table = read_csv(root / "sweep_s.csv");
  REQUIRE(table.header == std::vector<std::string>{"s", "N", "final_eval_loss"});
  REQUIRE(table.rows.size() == 12);
  for (const auto& r : rows) {
    const auto summary = json::parse(slurp(r.run_dir / "summary.json"));
    REQUIRE(summary["steps"] == 8);
    REQUIRE(summary["rounds"] == 8 / r.s);
  }
  REQUIRE_THROWS_AS(sweep_s(c, {3}, {}, root), ConfigError);
}

TEST_CASE("fit families from tables", "[harness][fit]") {
  const auto dir = scratch("fit");
  // Exact power law with Nc = 1e10, alpha = 0.1, plus a linear step penalty.
  std::ostringstream ln, lsn;
  ln << "N,loss\n" << std::setprecision(17);
  lsn << "s,N,final_eval_loss\n" << std::setprecision(17);
  for (double N : {1e5, 1e6, 1e7, 1e8}) {
    const double base = std::pow(1e10 / N, 0.1);
    ln << N << ',' << base << '\n';
    for (int s : {1, 8, 32}) lsn << s << ',' << N << ',' << base + 2e-3 * (s - 1) << '\n';
  }
  put(dir / "ln.csv", ln.str());
  put(dir / "lsn.csv", lsn.str());

  FitRequest r;
  r.family = FitFamily::LN;
  r.inputs = {dir / "ln.csv"};
  r.holdout = "max";
  auto j = json::parse(run_fit(r).json);
  REQUIRE(j["fit"]["alpha"].get<double>() == Catch::Approx(0.1).epsilon(1e-9));
  REQUIRE(j["fit"]["n_points"] == 3);
  REQUIRE(j["holdout"]["max_abs_residual"].get<double>() < 1e-9);

  r.family = FitFamily::LsN;
  r.inputs = {dir / "lsn.csv"};
  r.holdout.clear();
  j = json::parse(run_fit(r).json);
  REQUIRE(j["alpha_s"].get<double>() == Catch::Approx(2e-3).epsilon(1e-9));
  REQUIRE(j["s_offset"] == 1.0);

  r.base_alpha = 0.1;
  r.base_nc = 1e10;
  j = json::parse(run_fit(r).json);
  REQUIRE(j["s_offset"] == 0.0);
  REQUIRE(j["alpha_s"].get<double>() < 2e-3);
  r.base_alpha.reset();
  r.base_nc.reset();

  // The sweep table also feeds L(N) through its smallest-s rows.
  r.family = FitFamily::LN;
  j = json::parse(run_fit(r).json);
  REQUIRE(j["fit"]["X_c"].get<double>() == Catch::Approx(1e10).epsilon(1e-6));

  const auto out = dir / "fits";
  const auto c = cli({"fit", "--family", "LsN", "--input", (dir / "lsn.csv").string(), "--out", out.string()});
  REQUIRE(c.code == kExitOk);
  REQUIRE(fs::exists(out / "fit_LsN.json"));
  REQUIRE(fs::exists(out / "fit_LsN.txt"));
}

TEST_CASE("LKN needs lambda or alpha_s with a topology", "[harness][fit]") {
  FitRequest r;
  r.family = FitFamily::LKN;
  r.base_alpha = 0.076;
  r.base_nc = 8.8e13;
  r.n_values = {1e9};
  REQUIRE_THROWS_AS(run_fit(r), ArgumentError);
  r.alpha_s = 1.43e-4;
  REQUIRE_THROWS_AS(run_fit(r), ArgumentError);

  const auto c = cli({"fit", "--family", "LKN", "--base-alpha", "0.076", "--base-nc", "8.8e13", "--n-list", "1e9"});
  REQUIRE(c.code == kExitUsage);
  REQUIRE(c.err.find("--lambda") != std::string::npos);

  ExperimentConfig config;
  config.topology.m = 8;
  config.topology.n = 8;
  config.topology.C_d = 1.5e14;
  config.topology.W = 1e8;
  config.schedule.batch_tokens = 4000000;
  r.config = config;
  r.k_values = {0.0};
  const auto j = json::parse(run_fit(r).json);
  REQUIRE(j["lambda"].get<double>() == Catch::Approx(1.43e-4 * 14.0).epsilon(1e-12));
  REQUIRE(j["predictions"][0]["loss"].get<double>() == Catch::Approx(std::pow(8.8e13 / 1e9, 0.076)));
}

TEST_CASE("plotdata accepts the known schemas", "[harness][plotdata]") {
  const auto dir = scratch("plot");
  put(dir / "sweep.csv", "s,N,final_eval_loss\n1,100,3.5\n8,100,3.6\n");
  put(dir / "metrics.jsonl",
      "{\"step\":0,\"round\":0,\"phase\":\"eval\",\"train_loss\":null,\"eval_loss\":4.0,\"lr_inner\":0.1,\"tokens_seen\":0}\n"
      "{\"step\":1,\"round\":0,\"phase\":\"inner\",\"train_loss\":3.9,\"eval_loss\":null,\"lr_inner\":0.1,\"tokens_seen\":64}\n"
      "{\"step\":1,\"round\":1,\"phase\":\"outer\",\"train_loss\":null,\"eval_loss\":null,\"lr_inner\":0.1,\"tokens_seen\":64}\n");
  put(dir / "empty.csv", "");
  put(dir / "other.csv", "a,b\n1,2\n");

  auto sweep = plot_points(dir / "sweep.csv");
  REQUIRE(sweep.size() == 2);
  REQUIRE(sweep[1].series == "N100");
  REQUIRE(sweep[1].x == 8);
  REQUIRE(sweep[1].y == 3.6);

  auto metrics = plot_points(dir / "metrics.jsonl");
  REQUIRE(metrics.size() == 2);
  REQUIRE(metrics[0].series == "lsgd_harness_plot:eval");
  REQUIRE(metrics[1].series == "lsgd_harness_plot:train");

  auto empty = cli({"plotdata", "--input", (dir / "empty.csv").string()});
  REQUIRE(empty.code == kExitOk);
  REQUIRE(empty.out == "series_label,x,y\n");

  auto bad = cli({"plotdata", "--input", (dir / "other.csv").string()});
  REQUIRE(bad.code != kExitOk);
  REQUIRE(bad.err.find("s,N,final_eval_loss") != std::string::npos);
  REQUIRE(bad.err.find("m,n,C_d_flops") != std::string::npos);

  const auto sc = cli({"scenario", "--preset", "3", "--out", (dir / "sc").string()});
  REQUIRE(sc.code == kExitOk);
  const auto k = plot_points(dir / "sc" / "scenario.csv");
  REQUIRE(k.size() == 2 * 11);
}

TEST_CASE("custom scenario grids", "[harness][scenario]") {
  const auto dir = scratch("scenario");
  put(dir / "gbps.json", R"({"m": [1, 4], "n": 8, "C_d": 1.5e14, "W": [0.8], "B": 4e6, "s": [1, 32]})");
  put(dir / "bytes.json", R"({"m": [1, 4], "n": 8, "C_d": 1.5e14, "W": [1e8], "B": 4e6, "s": [1, 32]})");
  put(dir / "bad.json", R"({"m": [1], "n": 8, "C_d": 1.5e14, "W": [1e8], "B": 4e6, "bandwidth": 1})");

  REQUIRE(cli({"scenario", "--config", (dir / "gbps.json").string(), "--out", (dir / "a").string()}).code == 0);
  REQUIRE(cli({"scenario", "--config", (dir / "bytes.json").string(), "--bandwidth-units", "bytes", "--out",
               (dir / "b").string()})
              .code == 0);
  REQUIRE(slurp(dir / "a" / "scenario.csv") == slurp(dir / "b" / "scenario.csv"));

  const auto rows = perf::read_scenario_csv(dir / "a" / "scenario.csv");
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    if (r.m == 1) REQUIRE(r.K == 1.0);
    else REQUIRE(r.K < 1.0);
  }
  REQUIRE(cli({"scenario", "--config", (dir / "bad.json").string()}).code == kExitUsage);
  REQUIRE(cli({"scenario"}).code == kExitUsage);
}

TEST_CASE("cli usage errors", "[harness][cli]") {
  REQUIRE(cli({}).code == kExitUsage);
  REQUIRE(cli({"train"}).code == kExitUsage);
  REQUIRE(cli({"fit", "--family", "LQ", "--input", "x.csv"}).code == kExitUsage);
  const auto v = cli({"version"});
  REQUIRE(v.code == kExitOk);
  REQUIRE(v.out.rfind("lsgd ", 0) == 0);
  REQUIRE(cli({"gradcheck"}).code == kExitOk);
}

TEST_CASE("shipped example configs are valid", "[harness][config]") {
  int loaded = 0;
  for (const auto& entry : fs::directory_iterator(fs::path(LSGD_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json" || entry.path().stem() == "scenario_grid") continue;
    INFO(entry.path());
    const auto c = load_config(entry.path());
    REQUIRE_NOTHROW(c.validate());
    ++loaded;
  }
  REQUIRE(loaded >= 3);
  const auto r = cli({"scenario", "--config", std::string(LSGD_SOURCE_DIR) + "/configs/scenario_grid.json", "--out",
                      scratch("grid").string()});
  REQUIRE(r.code == kExitOk);
}
