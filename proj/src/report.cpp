/*
Copyright 2026 The CrowdCharge Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "crowdcharge/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace crowdcharge {

std::string to_string(Policy policy) {
  switch (policy) {
    case Policy::kReactive:
      return "reactive";
    case Policy::kProactive:
      return "proactive";
    case Policy::kBruteForce:
      return "bruteforce";
  }
  return "reactive";
}

Policy policy_from_string(const std::string& text) {
  if (text == "reactive") return Policy::kReactive;
  if (text == "proactive") return Policy::kProactive;
  if (text == "bruteforce") return Policy::kBruteForce;
  throw std::invalid_argument("unknown policy '" + text + "'");
}

RequestOrigin origin_of(Policy policy) {
  switch (policy) {
    case Policy::kReactive:
      return RequestOrigin::kReactive;
    case Policy::kProactive:
      return RequestOrigin::kProactive;
    case Policy::kBruteForce:
      return RequestOrigin::kBruteForce;
  }
  return RequestOrigin::kReactive;
}

std::size_t RunReport::fulfilled() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.fulfilled; }));
}

double success_ratio(const RunReport& report) {
  return report.records.empty() ? 0.0 : static_cast<double>(report.fulfilled()) / report.records.size();
}

void summarize(RunReport& report) {
  report.total_delivered_wh = 0.0;
  report.unmet_wh = 0.0;
  for (const auto& r : report.records) {
    report.total_delivered_wh += r.delivered_wh;
    report.unmet_wh += std::max(0.0, r.required_wh - r.delivered_wh);
  }
  report.success_ratio = success_ratio(report);
  report.mean_energy_per_request_wh =
      report.records.empty() ? 0.0 : report.total_delivered_wh / static_cast<double>(report.records.size());
}

std::string format_fixed(double value) {
  if (value == 0.0) value = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void write_report_csv(const RunReport& report, std::ostream& out) {
  out << "scenario_id,policy,seed,request_id,origin,required_wh,delivered_wh,fulfilled\n";
  for (const auto& r : report.records) {
    out << report.scenario_id << ',' << to_string(report.policy) << ',' << report.seed << ',' << r.request_id << ','
        << to_string(r.origin) << ',' << format_fixed(r.required_wh) << ',' << format_fixed(r.delivered_wh) << ','
        << (r.fulfilled ? 1 : 0) << '\n';
  }
}

void write_report_csv(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_report_csv(report, out);
}

TableRow row_of(const RunReport& report, double ratio) {
  TableRow row;
  row.ratio = ratio;
  row.regime = regime_for(ratio);
  row.policy = report.policy;
  row.seed = report.seed;
  row.requests = report.requests();
  row.fulfilled = report.fulfilled();
  row.success_ratio = report.success_ratio;
  row.mean_energy_per_request_wh = report.mean_energy_per_request_wh;
  row.total_delivered_wh = report.total_delivered_wh;
  row.unmet_wh = report.unmet_wh;
  row.runtime_ms = report.runtime_ms;
  return row;
}

std::string regime_for(double ratio) {
  if (ratio == 6.0) return "high";
  if (ratio == 3.0) return "average";
  if (ratio == 1.0) return "scarce";
  return "custom";
}

namespace {

constexpr const char* kColumns[] = {"ratio",        "regime",         "policy",
                                    "seed",         "requests",       "fulfilled",
                                    "success_ratio", "mean_energy_per_request_wh", "total_delivered_wh",
                                    "unmet_wh",     "runtime_ms"};

std::vector<std::string> cells_of(const TableRow& row) {
  return {format_fixed(row.ratio),
          row.regime,
          to_string(row.policy),
          std::to_string(row.seed),
          std::to_string(row.requests),
          std::to_string(row.fulfilled),
          format_fixed(row.success_ratio),
          format_fixed(row.mean_energy_per_request_wh),
          format_fixed(row.total_delivered_wh),
          format_fixed(row.unmet_wh),
          format_fixed(row.runtime_ms)};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out) {
  bool first = true;
  for (const char* c : kColumns) {
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const auto& row : rows) {
    const auto cells = cells_of(row);
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
}

void write_table_markdown(const std::vector<TableRow>& rows, std::ostream& out) {
  std::vector<std::vector<std::string>> grid;
  grid.emplace_back(std::begin(kColumns), std::end(kColumns));
  for (const auto& row : rows) grid.push_back(cells_of(row));
  std::vector<std::size_t> width(grid.front().size(), 3);
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  auto emit = [&](const std::vector<std::string>& line) {
    out << '|';
    for (std::size_t i = 0; i < line.size(); ++i) {
      // Text left, numbers right.
      const bool text = i == 1 || i == 2;
      const std::string pad(width[i] - line[i].size(), ' ');
      out << ' ' << (text ? line[i] + pad : pad + line[i]) << " |";
    }
    out << '\n';
  };
  emit(grid.front());
  out << '|';
  for (std::size_t i = 0; i < width.size(); ++i) {
    const bool text = i == 1 || i == 2;
    out << ' ' << (text ? std::string(width[i], '-') : std::string(width[i] - 1, '-') + ":") << " |";
  }
  out << '\n';
  for (std::size_t r = 1; r < grid.size(); ++r) emit(grid[r]);
}

std::vector<TableRow> read_table_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(origin + ": empty table");
  const auto header = split(line, ',');
  if (header != std::vector<std::string>(std::begin(kColumns), std::end(kColumns))) {
    throw FormatError(origin + ":1: unexpected header");
  }
  std::vector<TableRow> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    const std::string where = origin + ":" + std::to_string(number);
    if (cells.size() != header.size()) throw FormatError(where + ": expected " + std::to_string(header.size()) + " cells");
    try {
      TableRow row;
      row.ratio = std::stod(cells[0]);
      row.regime = cells[1];
      row.policy = policy_from_string(cells[2]);
      row.seed = std::stoull(cells[3]);
      row.requests = std::stoull(cells[4]);
      row.fulfilled = std::stoull(cells[5]);
      row.success_ratio = std::stod(cells[6]);
      row.mean_energy_per_request_wh = std::stod(cells[7]);
      row.total_delivered_wh = std::stod(cells[8]);
      row.unmet_wh = std::stod(cells[9]);
      row.runtime_ms = std::stod(cells[10]);
      rows.push_back(std::move(row));
    } catch (const std::invalid_argument& e) {
      throw FormatError(where + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw FormatError(where + ": " + e.what());
    }
  }
  return rows;
}

namespace {

struct Series {
  Policy policy;
  std::vector<std::pair<double, double>> points;
};

std::vector<Series> mean_series(const std::vector<TableRow>& rows, double TableRow::*metric) {
  std::map<Policy, std::map<double, std::pair<double, int>>> acc;
  for (const auto& row : rows) {
    auto& cell = acc[row.policy][row.ratio];
    cell.first += row.*metric;
    cell.second += 1;
  }
  std::vector<Series> out;
  for (const auto& [policy, by_ratio] : acc) {
    Series s{policy, {}};
    for (const auto& [ratio, sum] : by_ratio) s.points.emplace_back(ratio, sum.first / sum.second);
    out.push_back(std::move(s));
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_svg(const std::vector<Series>& series, const std::string& title, const std::string& y_label,
               const std::filesystem::path& path) {
  constexpr double kW = 640, kH = 400, kLeft = 70, kRight = 130, kTop = 40, kBottom = 50;
  double x_min = 1e300, x_max = -1e300, y_max = 0.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max <= x_min) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;
  const auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kW - kLeft - kRight); };
  const auto py = [&](double y) { return kH - kBottom - y / y_max * (kH - kTop - kBottom); };
  static const std::map<Policy, const char*> kColor{
      {Policy::kReactive, "#d62728"}, {Policy::kProactive, "#1f77b4"}, {Policy::kBruteForce, "#2ca02c"}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << py(0) << "\" x2=\"" << kW - kRight << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = y_max * i / 4.0;
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
        << "font-size=\"11\">" << num(y) << "</text>\n";
  }
  std::vector<double> ticks;
  for (const auto& s : series) {
    for (const auto& p : s.points) ticks.push_back(p.first);
  }
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double x : ticks) {
    out << "<text x=\"" << num(px(x)) << "\" y=\"" << kH - kBottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(x) << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kW - kRight) / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">supply/demand ratio</text>\n";
  out << "<text x=\"16\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 16 " << kH / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << y_label << "</text>\n";
  int legend = 0;
  for (const auto& s : series) {
    const char* color = kColor.at(s.policy);
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      out << (i ? " " : "") << num(px(s.points[i].first)) << ',' << num(py(s.points[i].second));
    }
    out << "\"/>\n";
    for (const auto& [x, y] : s.points) {
      out << "<circle cx=\"" << num(px(x)) << "\" cy=\"" << num(py(y)) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kTop + 20.0 * legend++;
    out << "<line x1=\"" << kW - kRight + 12 << "\" y1=\"" << ly << "\" x2=\"" << kW - kRight + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kW - kRight + 38 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << to_string(s.policy) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

std::vector<std::filesystem::path> write_plots(const std::vector<TableRow>& rows, const std::filesystem::path& dir) {
  if (rows.empty()) throw std::invalid_argument("nothing to plot: empty table");
  std::filesystem::create_directories(dir);
  const auto success = dir / "success_ratio.svg";
  const auto energy = dir / "energy_per_request.svg";
  write_svg(mean_series(rows, &TableRow::success_ratio), "Successful requests", "success ratio", success);
  write_svg(mean_series(rows, &TableRow::mean_energy_per_request_wh), "Energy received per request",
            "Wh per request", energy);
  return {success, energy};
}

}  // namespace crowdcharge
