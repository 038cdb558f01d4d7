// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace lsgd::harness {

// Plain comma-separated table; no quoting.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of `name` in the header, or -1.
  int column(const std::string& name) const;
  double number(std::size_t row, int column) const;
};

// Throws IoError when unreadable and DataError on ragged rows.
CsvTable read_csv(const std::filesystem::path& path);

struct PlotPoint {
  std::string series;
  double x = 0.0;
  double y = 0.0;
};

inline constexpr const char* kPlotCsvHeader = "series_label,x,y";

// Accepted inputs: scenario CSV (K against s per topology and bandwidth),
// s-sweep CSV (loss against s per N) and metrics JSONL (train and eval loss
// against step). Throws DataError naming the accepted headers otherwise.
std::vector<PlotPoint> plot_points(const std::filesystem::path& path);
void write_plot_csv(std::ostream& out, const std::vector<PlotPoint>& points);

}  // namespace lsgd::harness
