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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "crowdcharge/model.hpp"

namespace crowdcharge {

enum class Policy { kReactive, kProactive, kBruteForce };

std::string to_string(Policy policy);
/// Accepts reactive | proactive | bruteforce. Throws std::invalid_argument otherwise.
Policy policy_from_string(const std::string& text);
RequestOrigin origin_of(Policy policy);

/// Outcome for one consumer that needed energy during the day.
struct RequestRecord {
  std::int64_t request_id = 0;  // the consumer's user id
  double required_wh = 0.0;
  double delivered_wh = 0.0;
  bool fulfilled = false;
  RequestOrigin origin = RequestOrigin::kReactive;

  friend bool operator==(const RequestRecord&, const RequestRecord&) = default;
};

struct RunReport {
  std::string scenario_id;
  Policy policy = Policy::kReactive;
  std::uint64_t seed = 0;
  std::vector<RequestRecord> records;
  double success_ratio = 0.0;
  double mean_energy_per_request_wh = 0.0;
  double total_delivered_wh = 0.0;
  double unmet_wh = 0.0;
  double runtime_ms = 0.0;

  std::size_t requests() const { return records.size(); }
  std::size_t fulfilled() const;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Recomputes every aggregate from the records.
void summarize(RunReport& report);

/// fulfilled / requests, 0 without requests.
double success_ratio(const RunReport& report);

void write_report_csv(const RunReport& report, std::ostream& out);
void write_report_csv(const RunReport& report, const std::filesystem::path& path);

/// One sweep cell.
struct TableRow {
  double ratio = 0.0;
  std::string regime;
  Policy policy = Policy::kReactive;
  std::uint64_t seed = 0;
  std::size_t requests = 0;
  std::size_t fulfilled = 0;
  double success_ratio = 0.0;
  double mean_energy_per_request_wh = 0.0;
  double total_delivered_wh = 0.0;
  double unmet_wh = 0.0;
  double runtime_ms = 0.0;
  /// Ledger audit findings of the run; not serialized.
  std::size_t audit_violations = 0;
};

TableRow row_of(const RunReport& report, double ratio);

/// high = 6, average = 3, scarce = 1; any other ratio is "custom".
std::string regime_for(double ratio);

/// Fixed six-decimal formatting with '.' as separator.
std::string format_fixed(double value);

void write_table_csv(const std::vector<TableRow>& rows, std::ostream& out);
void write_table_markdown(const std::vector<TableRow>& rows, std::ostream& out);
/// Throws FormatError on a malformed table.
std::vector<TableRow> read_table_csv(std::istream& in, const std::string& origin = "table");

/// Mean over seeds per (ratio, policy), one SVG line chart per metric. Returns the
/// files written: success_ratio.svg and energy_per_request.svg inside `dir`.
std::vector<std::filesystem::path> write_plots(const std::vector<TableRow>& rows, const std::filesystem::path& dir);

}  // namespace crowdcharge
