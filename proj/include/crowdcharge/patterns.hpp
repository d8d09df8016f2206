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

#include <span>
#include <vector>

#include "crowdcharge/model.hpp"

namespace crowdcharge {

/// One observed day of a user: where they were and their battery level, per slot.
struct DailyTrace {
  UserId owner;
  int day = 0;
  std::vector<CellId> locations;
  std::vector<double> soc;

  friend bool operator==(const DailyTrace&, const DailyTrace&) = default;
};

Violations validate(const DailyTrace& trace, const TimeGrid& grid);

inline constexpr double kPresenceThreshold = 0.5;
inline constexpr double kDefaultReservePercent = 20.0;
inline constexpr double kDefaultThresholdPercent = 20.0;

/// theta[slot][cell] = fraction of days the owner was observed in `cell` at `slot`.
/// Throws InsufficientDataError on an empty history.
MobilityPattern estimate_mobility_pattern(std::span<const DailyTrace> history, const TimeGrid& grid,
                                          std::size_t cell_count);

/// Per-slot mean state of charge across the history.
UsageBehavior estimate_usage_behavior(std::span<const DailyTrace> history, double capacity_wh);

/// Maximal runs of slots whose most likely location is one microcell with presence >= threshold.
std::vector<Stay> extract_stays(const MobilityPattern& pattern, double threshold = kPresenceThreshold);

/// Flexibility marks for one extracted stay.
struct StayAnnotation {
  bool changeable = false;
  bool stretchable = false;
  std::vector<CellId> alternatives;
  StretchBounds bounds;

  friend bool operator==(const StayAnnotation&, const StayAnnotation&) = default;
};

/// Pairs the stays of `pattern` with per-stay marks. Throws AlignmentError if counts differ.
Flexibility derive_flexibility(const MobilityPattern& pattern, std::span<const StayAnnotation> annotations);

/// SoC from `start_slot` to `end_slot` inclusive, starting at `start_soc` and applying the
/// per-slot deltas of `usage`, clamped to [0,100]. Result has end_slot - start_slot + 1 entries.
std::vector<double> forecast_soc(const UsageBehavior& usage, Slot start_slot, double start_soc, Slot end_slot);

/// Energy a provider can give away without its forecast ever dipping below `reserve_percent`.
double compute_surplus(std::span<const double> forecast, double capacity_wh, double reserve_percent);

/// Surplus over the usage's own forecast from `stay.begin` to the end of the day.
double compute_surplus(const UsageBehavior& usage, SlotRange stay, double reserve_percent = kDefaultReservePercent);

/// Energy needed so that the forecast never drops below `threshold_percent`.
double compute_deficit(std::span<const double> forecast, double capacity_wh, double threshold_percent);

/// Deficit over the whole day of the usage's own forecast.
double compute_deficit(const UsageBehavior& usage, double threshold_percent = kDefaultThresholdPercent);

}  // namespace crowdcharge
