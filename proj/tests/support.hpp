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

// Hand-built fixtures shared by the unit tests and the acceptance runner.

#pragma once

#include <cstdint>
#include <vector>

#include "crowdcharge/scenario.hpp"

namespace crowdcharge::testing {

// Location trace for one day: OUTSIDE except during the given stays.
std::vector<CellId> place(const std::vector<Stay>& stays, const TimeGrid& grid = {});

// SoC trace interpolated linearly between (slot, percent) knots, flat outside them.
std::vector<double> soc_curve(const std::vector<std::pair<Slot, double>>& knots, const TimeGrid& grid = {});

// A user who repeats the same day `days` times.
UserRecord repeat_user(std::int64_t id, Role role, const DeviceProfile& device, const std::vector<Stay>& stays,
                       const std::vector<double>& soc, int days = 10, const TimeGrid& grid = {});

// Empty scenario with `cells` microcells laid out on a line.
Scenario bare_scenario(std::size_t cells, const TimeGrid& grid = {});

// Pattern whose presence is 1 inside the stays and OUTSIDE elsewhere.
MobilityPattern pattern_of(UserId owner, std::size_t cells, const std::vector<Stay>& stays, const TimeGrid& grid = {});

// A scenario reduced to its providers plus one consumer, ids renumbered, all stays rigid.
// Returns false when the source has no consumer with a deficit at `pick`.
bool single_consumer(const Scenario& source, std::size_t pick, Scenario& out);

}  // namespace crowdcharge::testing
