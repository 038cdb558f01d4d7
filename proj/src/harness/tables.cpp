// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#include "lsgd/harness/tables.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lsgd/core/error.hpp"
#include "lsgd/engine/metrics.hpp"
#include "lsgd/harness/runner.hpp"
#include "lsgd/perf/scenario.hpp"

namespace lsgd::harness {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string compact(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << v;
  return out.str();
}

std::string label_for(const fs::path& path) {
  if (path.filename() == "metrics.jsonl" && path.has_parent_path() && !path.parent_path().filename().empty()) {
    return path.parent_path().filename().string();
  }
  return path.stem().string();
}

[[noreturn]] void unknown_schema(const fs::path& path, const std::string& found) {
  throw DataError("unrecognised input " + path.string() + " (first line: '" + found +
                  "'); expected a CSV with header '" + perf::kScenarioCsvHeader + "' or '" + kSweepCsvHeader +
                  "', or a metrics JSONL file");
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

double CsvTable::number(std::size_t row, int col) const {
  const auto& cell = rows.at(row).at(static_cast<std::size_t>(col));
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw DataError("row " + std::to_string(row + 2) + ", column '" + header.at(col) + "': not a number: '" + cell + "'");
  }
  return v;
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

std::vector<PlotPoint> plot_points(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::string first;
  while (std::getline(in, first)) {
    if (!first.empty() && first.back() == '\r') first.pop_back();
    if (!first.empty()) break;
  }
  if (first.empty()) return {};
  std::vector<PlotPoint> points;

  if (first.front() == '{') {
    const auto label = label_for(path);
    std::vector<engine::MetricsRecord> records;
    try {
      records = engine::read_metrics(path);
    } catch (const DataError&) {
      unknown_schema(path, first);
    }
    for (const auto& r : records) {
      if (r.phase == engine::Phase::inner && r.train_loss) {
        points.push_back({label + ":train", static_cast<double>(r.step), *r.train_loss});
      }
      if (r.phase == engine::Phase::eval && r.eval_loss) {
        points.push_back({label + ":eval", static_cast<double>(r.step), *r.eval_loss});
      }
    }
    return points;
  }

  if (first == perf::kScenarioCsvHeader) {
    for (const auto& r : perf::read_scenario_csv(path)) {
      points.push_back({"m" + std::to_string(r.m) + "_n" + std::to_string(r.n) + "_Cd" + compact(r.C_d) + "_W" +
                            compact(r.W) + "_B" + compact(r.B),
                        static_cast<double>(r.s), r.K});
    }
    return points;
  }

  if (first == kSweepCsvHeader) {
    const auto table = read_csv(path);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      points.push_back({"N" + table.rows[i][1], table.number(i, 0), table.number(i, 2)});
    }
    return points;
  }
  unknown_schema(path, first);
}

void write_plot_csv(std::ostream& out, const std::vector<PlotPoint>& points) {
  out << kPlotCsvHeader << '\n' << std::setprecision(17);
  for (const auto& p : points) out << p.series << ',' << p.x << ',' << p.y << '\n';
}

}  // namespace lsgd::harness
