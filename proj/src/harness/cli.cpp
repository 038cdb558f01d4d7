// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/harness/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <random>
#include <sstream>

#include "lsgd/core/error.hpp"
#include "lsgd/engine/engine.hpp"
#include "lsgd/harness/fitting.hpp"
#include "lsgd/harness/runner.hpp"
#include "lsgd/harness/tables.hpp"
#include "lsgd/harness/version.hpp"
#include "lsgd/model/grad_check.hpp"
#include "lsgd/perf/scenario.hpp"

namespace lsgd::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> data_seed;
  std::optional<int> threads;
  std::string resume;
  bool quiet = false;

  std::vector<int> s_list;
  std::vector<int> d_models;

  std::string family;
  std::vector<std::string> inputs;
  std::string holdout;
  std::optional<double> base_alpha, base_nc, lambda, alpha_s;
  std::vector<double> k_list, n_list;

  int preset = 0;
  std::string bandwidth_units = "gbps";

  double epsilon = 0.0;
  double tolerance = 1e-5;
};

ExperimentConfig load_with_overrides(const Options& o) {
  auto config = load_config(o.config);
  if (o.seed) config.master_seed = *o.seed;
  if (o.data_seed) config.data.seed = *o.data_seed;
  if (o.threads) config.threads = *o.threads;
  config.validate();
  return config;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::string optional_text(const std::optional<double>& v) {
  if (!v) return "n/a";
  std::ostringstream out;
  out << std::setprecision(6) << *v;
  return out.str();
}

int cmd_train(const Options& o, std::ostream& out) {
  const auto config = load_with_overrides(o);
  const auto dir = resolve_output_dir(config, o.out);
  RunOptions run;
  run.verbose = !o.quiet;
  if (!o.resume.empty()) run.resume_from = o.resume == "latest" ? dir / "checkpoints" / "final.ckpt" : fs::path(o.resume);
  const auto outcome = run_training(config, dir, run);
  const auto& s = outcome.summary;
  out << "run dir      " << dir.string() << '\n'
      << "steps        " << s.steps << " (" << s.rounds << " rounds)\n"
      << "N            " << s.non_embedding_params << " non-embedding, " << s.total_params << " total\n"
      << "D            " << s.tokens << " tokens\n"
      << "train loss   " << optional_text(s.final_train_loss) << '\n'
      << "eval loss    " << optional_text(s.final_eval_loss) << '\n'
      << "tokens/s     " << static_cast<long long>(s.tokens_per_s) << '\n';
  if (s.exhausted) out << "warning: data exhausted after " << s.steps << " steps\n";
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const auto config = load_with_overrides(o);
  const auto root = resolve_output_dir(config, o.out);
  RunOptions run;
  run.verbose = !o.quiet;
  const auto rows = sweep_s(config, o.s_list, o.d_models, root, run);
  out << kSweepCsvHeader << '\n' << std::setprecision(17);
  for (const auto& r : rows) out << r.s << ',' << r.N << ',' << r.final_eval_loss << '\n';
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  FitRequest request;
  request.family = fit_family_from_string(o.family);
  for (const auto& i : o.inputs) request.inputs.emplace_back(i);
  request.holdout = o.holdout;
  request.base_alpha = o.base_alpha;
  request.base_nc = o.base_nc;
  request.lambda = o.lambda;
  request.alpha_s = o.alpha_s;
  if (!o.config.empty()) request.config = load_config(o.config);
  if (!o.k_list.empty()) request.k_values = o.k_list;
  request.n_values = o.n_list;
  const auto result = run_fit(request);
  out << result.report;
  if (!o.out.empty()) {
    const fs::path dir(o.out);
    const std::string stem = "fit_" + std::string(to_string(request.family));
    write_text(dir / (stem + ".json"), result.json + "\n");
    write_text(dir / (stem + ".txt"), result.report);
  }
  return kExitOk;
}

int cmd_plotdata(const Options& o, std::ostream& out) {
  if (o.inputs.empty()) throw ArgumentError("plotdata needs at least one input");
  std::vector<PlotPoint> points;
  for (const auto& i : o.inputs) {
    auto p = plot_points(i);
    points.insert(points.end(), p.begin(), p.end());
  }
  if (o.out.empty()) {
    write_plot_csv(out, points);
  } else {
    std::ostringstream buffer;
    write_plot_csv(buffer, points);
    write_text(o.out, buffer.str());
  }
  return kExitOk;
}

template <typename T>
std::vector<T> grid_values(const json& j, const char* key, bool required, const std::vector<T>& fallback = {}) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(std::string("scenario grid: missing '") + key + "'");
    return fallback;
  }
  try {
    const auto& v = j.at(key);
    return v.is_array() ? v.get<std::vector<T>>() : std::vector<T>{v.get<T>()};
  } catch (const json::exception&) {
    throw ConfigError(std::string("scenario grid: '") + key + "' must be a number or a list of numbers");
  }
}

perf::SweepGrid grid_from_file(const fs::path& path, const std::string& units) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    static const std::vector<std::string> known{"name", "m", "n", "C_d", "W", "B", "s", "bytes_per_param", "n_params"};
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("scenario grid: unknown key '" + key + "'");
    }
  }
  perf::SweepGrid g;
  g.name = j.value("name", std::string("custom"));
  g.m = grid_values<int>(j, "m", true);
  g.n = grid_values<int>(j, "n", true);
  g.C_d = grid_values<double>(j, "C_d", true);
  g.W = grid_values<double>(j, "W", true);
  g.B = grid_values<double>(j, "B", true);
  g.s = grid_values<int>(j, "s", false, perf::default_s_values());
  g.bytes_per_param = j.value("bytes_per_param", 2.0);
  g.n_params = j.value("n_params", 1e9);
  if (units == "gbps") {
    for (auto& w : g.W) w = perf::gbps_to_bytes_per_s(w);
  }
  return g;
}

std::string panel_name(const perf::ScenarioRow& r) {
  std::ostringstream out;
  out << "panel_m" << r.m << "_n" << r.n << "_Cd" << std::setprecision(6) << r.C_d << "_B" << r.B << ".csv";
  return out.str();
}

int cmd_scenario(const Options& o, std::ostream& out) {
  if ((o.preset != 0) == !o.config.empty()) throw ArgumentError("scenario needs exactly one of --preset or --config");
  const auto grid = o.preset != 0 ? perf::scenario_preset(o.preset) : grid_from_file(o.config, o.bandwidth_units);
  const auto rows = perf::sweep_scenarios(grid);
  const fs::path dir = o.out.empty() ? fs::path("scenarios") / grid.name : fs::path(o.out);
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "scenario.csv", std::ios::trunc);
    std::ofstream jsonl(dir / "scenario.jsonl", std::ios::trunc);
    if (!csv || !jsonl) throw IoError("cannot write into " + dir.string());
    perf::write_scenario_csv(csv, rows);
    perf::write_scenario_jsonl(jsonl, rows);
  }
  std::map<std::string, std::vector<perf::ScenarioRow>> panels;
  for (const auto& r : rows) panels[panel_name(r)].push_back(r);
  for (const auto& [name, panel] : panels) {
    std::ofstream f(dir / name, std::ios::trunc);
    if (!f) throw IoError("cannot write " + (dir / name).string());
    f << "s,W_bytes_per_s,W_gbps,K\n" << std::setprecision(17);
    for (const auto& r : panel) f << r.s << ',' << r.W << ',' << perf::bytes_per_s_to_gbps(r.W) << ',' << r.K << '\n';
  }
  out << "scenario " << grid.name << ": " << rows.size() << " rows, " << panels.size() << " panels -> "
      << dir.string() << '\n';
  return kExitOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  model::ModelConfig config = model::tiny_transformer_config();
  std::uint64_t seed = o.seed.value_or(0);
  if (!o.config.empty()) {
    const auto experiment = load_config(o.config);
    config = experiment.model;
    if (!o.seed) seed = experiment.master_seed;
  }
  config.validate();
  const auto params = model::build_model(config, seed);
  model::TokenBatch batch;
  batch.rows = 2;
  batch.seq_len = config.seq_len;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<std::int32_t> token(0, config.vocab_size - 1);
  for (int i = 0; i < batch.rows * batch.seq_len; ++i) {
    batch.inputs.push_back(token(rng));
    batch.targets.push_back(token(rng));
  }
  model::GradCheckOptions options;
  options.seed = seed;
  options.epsilon = o.epsilon > 0.0 ? o.epsilon : (config.arch == model::Architecture::mlp ? 1e-4 : 1e-5);
  const auto report = model::grad_check(params, config, batch, options);
  out << std::left << std::setw(28) << "segment" << std::setw(12) << "coords" << "max rel error\n";
  for (const auto& s : report.segments) {
    out << std::setw(28) << s.name << std::setw(12) << s.coordinates << std::setprecision(3) << std::scientific
        << s.max_relative_error << std::defaultfloat << '\n';
  }
  const bool ok = report.max_relative_error <= o.tolerance;
  out << (ok ? "PASS" : "FAIL") << ": max relative error " << std::setprecision(3) << std::scientific
      << report.max_relative_error << " (tolerance " << o.tolerance << ")" << std::defaultfloat << '\n';
  return ok ? kExitOk : kExitError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local-SGD training, performance model and scaling-law tools", "lsgd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Options o;

  auto* train = app.add_subcommand("train", "train one configuration");
  train->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  train->add_option("--out", o.out, "run directory (default: config output_dir)");
  train->add_option("--seed", o.seed, "override master_seed");
  train->add_option("--data-seed", o.data_seed, "override data.seed");
  train->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  train->add_option("--resume", o.resume, "checkpoint to resume from, or 'latest'");
  train->add_flag("--quiet", o.quiet, "no progress on stderr");

  auto* sweep = app.add_subcommand("sweep", "matched-step sweep over local step counts");
  sweep->add_option("--config", o.config, "base experiment config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--s-list", o.s_list, "local step counts")->required()->delimiter(',');
  sweep->add_option("--d-models", o.d_models, "model widths (default: config)")->delimiter(',');
  sweep->add_option("--out", o.out, "sweep root directory");
  sweep->add_option("--seed", o.seed, "override master_seed");
  sweep->add_option("--data-seed", o.data_seed, "override data.seed");
  sweep->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("--quiet", o.quiet, "no progress on stderr");

  auto* fit = app.add_subcommand("fit", "fit a scaling-law family");
  fit->add_option("--family", o.family, "LN, LD, LC, LsN or LKN")->required();
  fit->add_option("--input", o.inputs, "run directories or CSV tables")->delimiter(',');
  fit->add_option("--holdout", o.holdout, "axis value (or N for LsN) to hold out; 'max' for the largest");
  fit->add_option("--base-alpha", o.base_alpha, "alpha of the base L(N)");
  fit->add_option("--base-nc", o.base_nc, "N_c of the base L(N)");
  fit->add_option("--lambda", o.lambda, "lambda for LKN");
  fit->add_option("--alpha-s", o.alpha_s, "alpha_s for LKN; needs --config");
  fit->add_option("--config", o.config, "config providing topology and batch size")->check(CLI::ExistingFile);
  fit->add_option("--k-list", o.k_list, "efficiencies for LKN predictions")->delimiter(',');
  fit->add_option("--n-list", o.n_list, "model sizes for LKN predictions")->delimiter(',');
  fit->add_option("--out", o.out, "directory for fit_<family>.json and .txt");

  auto* plot = app.add_subcommand("plotdata", "convert outputs into series_label,x,y");
  plot->add_option("--input", o.inputs, "scenario CSV, sweep CSV or metrics JSONL")->required()->delimiter(',');
  plot->add_option("--out", o.out, "output CSV (default: stdout)");

  auto* scenario = app.add_subcommand("scenario", "evaluate the efficiency model over a grid");
  scenario->add_option("--preset", o.preset, "built-in grid 1, 2 or 3")->check(CLI::Range(1, 3));
  scenario->add_option("--config", o.config, "custom grid (JSON)")->check(CLI::ExistingFile);
  scenario->add_option("--bandwidth-units", o.bandwidth_units, "units of W in a custom grid")
      ->check(CLI::IsMember({"gbps", "bytes"}));
  scenario->add_option("--out", o.out, "output directory");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  gradcheck->add_option("--config", o.config, "take the model section from this config")->check(CLI::ExistingFile);
  gradcheck->add_option("--seed", o.seed, "parameter and batch seed");
  gradcheck->add_option("--epsilon", o.epsilon, "finite-difference step (default by architecture)");
  gradcheck->add_option("--tolerance", o.tolerance, "maximum relative error");

  auto* version = app.add_subcommand("version", "print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*fit) return cmd_fit(o, out);
    if (*plot) return cmd_plotdata(o, out);
    if (*scenario) return cmd_scenario(o, out);
    if (*gradcheck) return cmd_gradcheck(o, out);
    if (*version) {
      out << "lsgd " << kVersion << '\n';
      return kExitOk;
    }
  } catch (const engine::DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "argument error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace lsgd::harness
