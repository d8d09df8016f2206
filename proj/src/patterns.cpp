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

#include "crowdcharge/patterns.hpp"

#include <algorithm>

namespace crowdcharge {

Violations validate(const DailyTrace& trace, const TimeGrid& grid) {
  Violations out;
  const auto horizon = static_cast<std::size_t>(grid.horizon);
  if (trace.locations.size() != horizon) out.push_back("locations length = horizon violated");
  if (trace.soc.size() != horizon) out.push_back("soc length = horizon violated");
  for (double v : trace.soc) {
    if (!(v >= 0.0 && v <= 100.0)) {
      out.push_back("soc entry in [0,100] violated");
      break;
    }
  }
  return out;
}

namespace {

void check_history(std::span<const DailyTrace> history) {
  if (history.empty()) throw InsufficientDataError("empty history");
  for (const auto& trace : history) {
    if (trace.owner != history.front().owner) {
      throw std::invalid_argument("history mixes traces of different owners");
    }
  }
}

}  // namespace

MobilityPattern estimate_mobility_pattern(std::span<const DailyTrace> history, const TimeGrid& grid,
                                          std::size_t cell_count) {
  check_history(history);
  MobilityPattern pattern;
  pattern.owner = history.front().owner;
  pattern.cell_count = cell_count;
  const std::size_t cols = cell_count + 1;
  std::vector<int> counts(static_cast<std::size_t>(grid.horizon) * cols, 0);
  for (const auto& trace : history) {
    if (trace.locations.size() != static_cast<std::size_t>(grid.horizon)) {
      throw std::invalid_argument("trace length differs from grid horizon");
    }
    for (int s = 0; s < grid.horizon; ++s) {
      const CellId c = trace.locations[static_cast<std::size_t>(s)];
      const std::size_t col = c == kOutside ? cell_count : c.index();
      if (col > cell_count) throw UnknownNodeError("trace references unknown microcell " + std::to_string(c.value()));
      ++counts[static_cast<std::size_t>(s) * cols + col];
    }
  }
  const double days = static_cast<double>(history.size());
  pattern.theta.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) pattern.theta[i] = counts[i] / days;
  return pattern;
}

UsageBehavior estimate_usage_behavior(std::span<const DailyTrace> history, double capacity_wh) {
  check_history(history);
  UsageBehavior usage;
  usage.owner = history.front().owner;
  usage.battery_capacity_wh = capacity_wh;
  const std::size_t horizon = history.front().soc.size();
  usage.soc.assign(horizon, 0.0);
  for (const auto& trace : history) {
    if (trace.soc.size() != horizon) throw std::invalid_argument("soc traces differ in length");
    for (std::size_t s = 0; s < horizon; ++s) usage.soc[s] += trace.soc[s];
  }
  const double days = static_cast<double>(history.size());
  for (double& v : usage.soc) v /= days;
  return usage;
}

std::vector<Stay> extract_stays(const MobilityPattern& pattern, double threshold) {
  std::vector<Stay> stays;
  for (int s = 0; s < pattern.horizon(); ++s) {
    const auto row = pattern.row(s);
    // Ties resolve to the lowest column; OUTSIDE is the last column.
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    const bool present = best < pattern.cell_count && row[best] >= threshold;
    if (!present) continue;
    const CellId cell{static_cast<std::int64_t>(best)};
    if (!stays.empty() && stays.back().cell == cell && stays.back().interval.end == s) {
      ++stays.back().interval.end;
    } else {
      stays.push_back({cell, {s, s + 1}});
    }
  }
  return stays;
}

Flexibility derive_flexibility(const MobilityPattern& pattern, std::span<const StayAnnotation> annotations) {
  Flexibility flex;
  flex.availability = extract_stays(pattern);
  if (annotations.size() != flex.availability.size()) {
    throw AlignmentError("flexibility marks cover " + std::to_string(annotations.size()) + " stays but pattern has " +
                         std::to_string(flex.availability.size()));
  }
  for (std::size_t k = 0; k < annotations.size(); ++k) {
    const auto& a = annotations[k];
    flex.changeable.push_back(a.changeable ? 1 : 0);
    flex.stretchable.push_back(a.stretchable ? 1 : 0);
    if (a.changeable) flex.alternatives[k] = a.alternatives;
    if (a.stretchable) flex.stretch_bounds[k] = a.bounds;
  }
  return flex;
}

std::vector<double> forecast_soc(const UsageBehavior& usage, Slot start_slot, double start_soc, Slot end_slot) {
  if (end_slot < start_slot) throw std::invalid_argument("forecast end precedes start");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(end_slot - start_slot + 1));
  double level = std::clamp(start_soc, 0.0, 100.0);
  out.push_back(level);
  for (Slot s = start_slot + 1; s <= end_slot; ++s) {
    const auto i = static_cast<std::size_t>(s);
    level = std::clamp(level + (usage.soc[i] - usage.soc[i - 1]), 0.0, 100.0);
    out.push_back(level);
  }
  return out;
}

double compute_surplus(std::span<const double> forecast, double capacity_wh, double reserve_percent) {
  if (forecast.empty()) return 0.0;
  const double lowest = *std::min_element(forecast.begin(), forecast.end());
  return std::max(0.0, (lowest - reserve_percent) / 100.0 * capacity_wh);
}

double compute_surplus(const UsageBehavior& usage, SlotRange stay, double reserve_percent) {
  const auto begin = static_cast<std::size_t>(std::max(stay.begin, 0));
  if (begin >= usage.soc.size()) return 0.0;
  return compute_surplus(std::span<const double>(usage.soc).subspan(begin), usage.battery_capacity_wh,
                         reserve_percent);
}

double compute_deficit(std::span<const double> forecast, double capacity_wh, double threshold_percent) {
  if (forecast.empty()) return 0.0;
  const double lowest = *std::min_element(forecast.begin(), forecast.end());
  return std::max(0.0, (threshold_percent - lowest) / 100.0 * capacity_wh);
}

double compute_deficit(const UsageBehavior& usage, double threshold_percent) {
  return compute_deficit(usage.soc, usage.battery_capacity_wh, threshold_percent);
}

}  // namespace crowdcharge
