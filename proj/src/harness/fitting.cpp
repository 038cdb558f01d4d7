// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/harness/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "lsgd/core/error.hpp"
#include "lsgd/harness/tables.hpp"
#include "lsgd/perf/perfmodel.hpp"

namespace lsgd::harness {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using scaling::Axis;
using scaling::PowerLawPoint;
using scaling::StepPenaltyPoint;

namespace {

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

bool is_run_input(const fs::path& p) { return fs::is_directory(p) || p.filename() == "summary.json"; }
fs::path run_dir_of(const fs::path& p) { return fs::is_directory(p) ? p : p.parent_path(); }

struct RunFacts {
  double N, D, loss;
  int s;
};

RunFacts run_facts(const fs::path& input) {
  const auto dir = run_dir_of(input);
  const auto summary = read_json_file(dir / "summary.json");
  if (!summary.contains("final_eval_loss") || !summary["final_eval_loss"].is_number()) {
    throw DataError((dir / "summary.json").string() + " has no final_eval_loss");
  }
  RunFacts f{summary.at("N").get<double>(), summary.at("D").get<double>(), summary["final_eval_loss"].get<double>(), 1};
  if (fs::exists(dir / "config.json")) f.s = load_config(dir / "config.json").policy.effective_s();
  return f;
}

int loss_column(const CsvTable& t, const fs::path& path) {
  for (const char* name : {"loss", "final_eval_loss", "eval_loss"}) {
    if (int c = t.column(name); c >= 0) return c;
  }
  throw DataError(path.string() + ": no loss column (loss, final_eval_loss or eval_loss)");
}

double axis_value(Axis axis, double N, double D) {
  switch (axis) {
    case Axis::N: return N;
    case Axis::D: return D;
    case Axis::C: return 6.0 * N * D;
  }
  return N;
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

double resolve_holdout(const std::string& holdout, const std::vector<double>& xs) {
  if (holdout == "max") {
    if (xs.empty()) throw ArgumentError("--holdout max needs at least one point");
    return *std::max_element(xs.begin(), xs.end());
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(holdout, &used);
    if (used != holdout.size()) throw std::invalid_argument(holdout);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError("--holdout expects a number or 'max', got '" + holdout + "'");
  }
}

json fit_json(const scaling::PowerLawFit& f) {
  return {{"axis", std::string(scaling::to_string(f.axis))}, {"X_c", f.X_c}, {"alpha", f.alpha},
          {"r_squared", f.r_squared}, {"n_points", f.n_points}};
}

std::string num(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::string fit_line(const scaling::PowerLawFit& f) {
  const std::string x(scaling::to_string(f.axis));
  const std::string law = "L(" + x + ") = (" + num(f.X_c) + " / " + x + ")^" + num(f.alpha);
  if (f.n_points == 0) return law + "   (given)\n";
  return law + "   r^2 = " + num(f.r_squared) + "   points = " + std::to_string(f.n_points) + "\n";
}

scaling::PowerLawFit base_from_flags(const FitRequest& r) {
  if (r.base_alpha.has_value() != r.base_nc.has_value()) {
    throw ArgumentError("--base-alpha and --base-nc must be given together");
  }
  scaling::PowerLawFit f;
  f.axis = Axis::N;
  f.alpha = *r.base_alpha;
  f.X_c = *r.base_nc;
  f.n_points = 0;
  if (!(f.alpha > 0.0) || !(f.X_c > 0.0)) throw ArgumentError("--base-alpha and --base-nc must be positive");
  return f;
}

FitResult fit_power(const FitRequest& r, Axis axis) {
  auto points = load_power_points(r.inputs, axis);
  std::vector<PowerLawPoint> holdout;
  if (!r.holdout.empty()) {
    std::vector<double> xs;
    for (const auto& p : points) xs.push_back(p.x);
    const double h = resolve_holdout(r.holdout, xs);
    std::vector<PowerLawPoint> kept;
    for (const auto& p : points) (same(p.x, h) ? holdout : kept).push_back(p);
    if (holdout.empty()) throw ArgumentError("no points at holdout value " + r.holdout);
    points = std::move(kept);
  }
  const auto fit = scaling::fit_power_law(points, axis);
  json j;
  j["family"] = std::string(to_string(r.family));
  j["fit"] = fit_json(fit);
  json pts = json::array();
  for (const auto& p : points) pts.push_back({{"x", p.x}, {"loss", p.loss}, {"predicted", fit.predict(p.x)}});
  j["points"] = pts;
  std::string report = fit_line(fit);
  if (!holdout.empty()) {
    const auto g = scaling::goodness_report(fit, holdout);
    json rows = json::array();
    report += "holdout: r^2 = " + num(g.r_squared) + "   max |residual| = " + num(g.max_abs_residual) + " nats\n";
    for (const auto& row : g.rows) {
      rows.push_back({{"x", row.x}, {"actual", row.actual}, {"predicted", row.predicted}, {"residual", row.residual}});
      report += "  x = " + num(row.x) + "   actual " + num(row.actual) + "   predicted " + num(row.predicted) +
                "   residual " + num(row.residual) + "\n";
    }
    j["holdout"] = {{"r_squared", g.r_squared}, {"max_abs_residual", g.max_abs_residual}, {"rows", rows}};
  }
  return {j.dump(2), report};
}

FitResult fit_step(const FitRequest& r) {
  auto points = load_step_points(r.inputs);
  std::vector<StepPenaltyPoint> holdout;
  if (!r.holdout.empty()) {
    std::vector<double> ns;
    for (const auto& p : points) ns.push_back(p.N);
    const double h = resolve_holdout(r.holdout, ns);
    std::vector<StepPenaltyPoint> kept;
    for (const auto& p : points) (same(p.N, h) ? holdout : kept).push_back(p);
    if (holdout.empty()) throw ArgumentError("no rows with N = " + r.holdout);
    points = std::move(kept);
  }
  scaling::PowerLawFit base;
  std::string base_source;
  // A base fitted on the smallest-s rows already contains the penalty at
  // that s, so the slope is taken against s - s_min.
  double s_offset = 0.0;
  if (r.base_alpha || r.base_nc) {
    base = base_from_flags(r);
    base_source = "flags";
  } else {
    double s_min = std::numeric_limits<double>::infinity();
    for (const auto& p : points) s_min = std::min(s_min, p.s);
    std::vector<PowerLawPoint> base_points;
    for (const auto& p : points) {
      if (p.s == s_min) base_points.push_back({p.N, p.loss});
    }
    base = scaling::fit_power_law(base_points, Axis::N);
    base_source = "fitted on s = " + num(s_min) + " rows";
    s_offset = s_min;
  }
  auto shifted = points;
  for (auto& p : shifted) p.s -= s_offset;
  const auto fit = scaling::fit_step_penalty(shifted, base);
  json j;
  j["family"] = "LsN";
  j["alpha_s"] = fit.alpha_s;
  j["base"] = fit_json(base);
  j["base_source"] = base_source;
  j["s_offset"] = s_offset;
  j["free_slope"] = fit.free_slope;
  j["free_intercept"] = fit.free_intercept;
  j["valid_below_s"] = fit.valid_below;
  json per = json::array();
  for (const auto& p : fit.per_size) per.push_back({{"N", p.N}, {"alpha_s", p.alpha_s}});
  j["per_size"] = per;
  json rows = json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    rows.push_back({{"s", points[i].s}, {"N", points[i].N}, {"loss", points[i].loss}, {"residual", fit.residuals[i]}});
  }
  j["points"] = rows;
  const std::string s_term = s_offset == 0.0 ? "s" : "(s - " + num(s_offset) + ")";
  std::string report = "L(s, N) = L(N) + alpha_s * " + s_term + "   alpha_s = " + num(fit.alpha_s) +
                       "   (valid for s < " + num(fit.valid_below) + ")\nbase (" + base_source + "): " + fit_line(base);
  report += "free fit: slope " + num(fit.free_slope) + "   intercept " + num(fit.free_intercept) + "\n";
  for (const auto& p : fit.per_size) report += "  N = " + num(p.N) + "   alpha_s = " + num(p.alpha_s) + "\n";
  if (!holdout.empty()) {
    json hold = json::array();
    double worst = 0.0;
    for (const auto& p : holdout) {
      const double pred = fit.predict(p.s - s_offset, p.N);
      worst = std::max(worst, std::abs(p.loss - pred));
      hold.push_back({{"s", p.s}, {"N", p.N}, {"actual", p.loss}, {"predicted", pred}, {"residual", p.loss - pred}});
    }
    j["holdout"] = {{"max_abs_residual", worst}, {"rows", hold}};
    report += "holdout: max |residual| = " + num(worst) + " nats over " + std::to_string(holdout.size()) + " rows\n";
  }
  return {j.dump(2), report};
}

FitResult fit_kn(const FitRequest& r) {
  double lambda = 0.0;
  std::string lambda_source;
  if (r.lambda) {
    lambda = *r.lambda;
    lambda_source = "given";
  } else if (r.alpha_s && r.config) {
    lambda = perf::lambda_coeff(*r.alpha_s, r.config->topology, static_cast<double>(r.config->schedule.batch_tokens));
    lambda_source = "alpha_s = " + num(*r.alpha_s) + " with the configured topology";
  } else {
    throw ArgumentError("LKN needs --lambda, or --alpha-s together with --config for the topology");
  }
  scaling::PowerLawFit base;
  std::vector<double> ns = r.n_values;
  if (r.base_alpha || r.base_nc) {
    base = base_from_flags(r);
  } else {
    if (r.inputs.empty()) throw ArgumentError("LKN needs --base-alpha/--base-nc or inputs to fit L(N)");
    const auto points = load_power_points(r.inputs, Axis::N);
    base = scaling::fit_power_law(points, Axis::N);
    if (ns.empty()) {
      for (const auto& p : points) ns.push_back(p.x);
    }
  }
  if (ns.empty() && r.config) ns.push_back(static_cast<double>(model::analytic_non_embedding_count(r.config->model)));
  if (ns.empty()) throw ArgumentError("LKN needs --n-list, inputs or --config to choose N values");
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

  json j;
  j["family"] = "LKN";
  j["lambda"] = lambda;
  j["lambda_source"] = lambda_source;
  j["base"] = fit_json(base);
  json preds = json::array();
  std::string report = "L(K, N) = L(N) + lambda * K / (1 - K)   lambda = " + num(lambda) + " (" + lambda_source +
                       ")\nbase: " + fit_line(base);
  for (double N : ns) {
    for (double K : r.k_values) {
      const double L = scaling::predict_L_of_K_N(base, lambda, K, N);
      preds.push_back({{"N", N}, {"K", K}, {"loss", L}});
      report += "  N = " + num(N) + "   K = " + num(K) + "   L = " + num(L) + "\n";
    }
  }
  j["predictions"] = preds;
  return {j.dump(2), report};
}

}  // namespace

std::string_view to_string(FitFamily family) {
  switch (family) {
    case FitFamily::LN: return "LN";
    case FitFamily::LD: return "LD";
    case FitFamily::LC: return "LC";
    case FitFamily::LsN: return "LsN";
    case FitFamily::LKN: return "LKN";
  }
  return "LN";
}

FitFamily fit_family_from_string(std::string_view name) {
  for (auto f : {FitFamily::LN, FitFamily::LD, FitFamily::LC, FitFamily::LsN, FitFamily::LKN}) {
    if (name == to_string(f)) return f;
  }
  throw ArgumentError("unknown fit family '" + std::string(name) + "' (expected LN, LD, LC, LsN or LKN)");
}

std::vector<PowerLawPoint> load_power_points(const std::vector<fs::path>& inputs, Axis axis) {
  std::vector<PowerLawPoint> points;
  for (const auto& input : inputs) {
    if (is_run_input(input)) {
      const auto f = run_facts(input);
      points.push_back({axis_value(axis, f.N, f.D), f.loss});
      continue;
    }
    const auto t = read_csv(input);
    const int lc = loss_column(t, input);
    int xc = t.column(std::string(scaling::to_string(axis)));
    if (xc < 0) xc = t.column("x");
    if (xc < 0) {
      throw DataError(input.string() + ": no '" + std::string(scaling::to_string(axis)) + "' or 'x' column");
    }
    const int sc = t.column("s");
    double s_min = std::numeric_limits<double>::infinity();
    if (sc >= 0) {
      for (std::size_t i = 0; i < t.rows.size(); ++i) s_min = std::min(s_min, t.number(i, sc));
    }
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (sc >= 0 && t.number(i, sc) != s_min) continue;
      points.push_back({t.number(i, xc), t.number(i, lc)});
    }
  }
  return points;
}

std::vector<StepPenaltyPoint> load_step_points(const std::vector<fs::path>& inputs) {
  std::vector<StepPenaltyPoint> points;
  for (const auto& input : inputs) {
    if (is_run_input(input)) {
      const auto f = run_facts(input);
      points.push_back({static_cast<double>(f.s), f.N, f.loss});
      continue;
    }
    const auto t = read_csv(input);
    const int lc = loss_column(t, input);
    const int sc = t.column("s");
    const int nc = t.column("N");
    if (sc < 0 || nc < 0) throw DataError(input.string() + ": LsN needs 's' and 'N' columns");
    for (std::size_t i = 0; i < t.rows.size(); ++i) points.push_back({t.number(i, sc), t.number(i, nc), t.number(i, lc)});
  }
  return points;
}

FitResult run_fit(const FitRequest& request) {
  if (request.inputs.empty() && request.family != FitFamily::LKN) throw ArgumentError("fit needs at least one input");
  switch (request.family) {
    case FitFamily::LN: return fit_power(request, Axis::N);
    case FitFamily::LD: return fit_power(request, Axis::D);
    case FitFamily::LC: return fit_power(request, Axis::C);
    case FitFamily::LsN: return fit_step(request);
    case FitFamily::LKN: return fit_kn(request);
  }
  throw ArgumentError("unknown fit family");
}

}  // namespace lsgd::harness
