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
#include <map>
#include <string>
#include <vector>

#include "crowdcharge/composition.hpp"
#include "crowdcharge/model.hpp"
#include "crowdcharge/patterns.hpp"
#include "crowdcharge/serialize.hpp"

namespace crowdcharge {

inline constexpr int kScenarioFormatVersion = 1;

enum class Role { kProvider, kConsumer };

std::string to_string(Role role);

/// Stored per-stay flexibility marks of a user, aligned with the stays extracted from
/// the user's estimated mobility pattern.
struct FlexibilityMarks {
  std::vector<std::uint8_t> changeable;
  std::vector<std::uint8_t> stretchable;
  std::map<std::size_t, std::vector<CellId>> alternatives;
  std::map<std::size_t, StretchBounds> stretch_bounds;

  std::vector<StayAnnotation> annotations() const;

  friend bool operator==(const FlexibilityMarks&, const FlexibilityMarks&) = default;
};

struct UserRecord {
  UserId id;
  Role role = Role::kConsumer;
  DeviceProfile device;
  std::vector<DailyTrace> history;
  FlexibilityMarks flexibility;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

struct Scenario {
  std::string id;
  TimeGrid grid;
  std::vector<Microcell> microcells;
  std::vector<UserRecord> users;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Violations validate(const Scenario& scenario);

struct Range {
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const Range&, const Range&) = default;
};

/// Knobs of the synthetic crowd. Defaults describe a small campus: eight venues with
/// staggered hourly check-in peaks and phone-sized batteries.
struct ScenarioConfig {
  std::size_t microcells = 8;
  double cell_spacing_m = 40.0;
  double cell_radius_m = 5.0;
  std::size_t users = 100;
  double provider_fraction = 0.6;
  /// Aggregate provider surplus over aggregate consumer deficit.
  double supply_demand_ratio = 3.0;
  /// Mean check-ins per hour, [microcell][hour of day]. Empty selects the built-in profile.
  std::vector<std::vector<double>> arrival_intensity;
  Range stay_minutes{15.0, 120.0};
  Range stays_per_day{3.0, 6.0};
  Range battery_capacity_wh{10.0, 20.0};
  Range device_power_w{2.0, 3.0};
  Range tsr_range{0.7, 1.0};
  /// Percent of battery drained per slot by a typical device. Empty selects the built-in curve.
  std::vector<double> drain_curve;
  Range consumer_drain_scale{0.3, 0.5};
  Range provider_drain_scale{0.2, 0.4};
  /// Expected lowest SoC of a consumer over the day, in percent.
  Range consumer_low_soc{8.0, 14.0};
  int history_days = 10;
  /// Probability that a routine stay happens as usual on a given day.
  double routine_adherence = 0.9;
  double changeable_probability = 0.35;
  double stretchable_probability = 0.35;
  int max_stretch_slots = 6;
  std::uint64_t seed = 1;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

Violations validate(const ScenarioConfig& config);

std::vector<std::vector<double>> default_arrival_intensity(std::size_t microcells);
std::vector<double> default_drain_curve(const TimeGrid& grid = {});

/// Builds a seeded synthetic crowd. Throws ConfigError on an invalid config or a
/// supply/demand ratio the provider population cannot reach.
///
/// The ratio only rescales provider batteries; every random draw is independent of
/// it, so scenarios that share a seed differ only in provider surplus.
Scenario generate_scenario(const ScenarioConfig& config);

/// The stays each generated user follows on a regular day, by user index.
std::vector<std::vector<Stay>> routine_stays(const ScenarioConfig& config);

/// Aggregate surplus over aggregate deficit, recomputed from the scenario's histories.
double achieved_supply_demand_ratio(const Scenario& scenario, double reserve_percent = kDefaultReservePercent,
                                    double threshold_percent = kDefaultThresholdPercent);

json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const json& document);

void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
/// Throws FormatError (with line context for syntax errors) on malformed input.
Scenario load_scenario(const std::filesystem::path& path);

json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const json& document);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Parses JSON text, turning syntax errors into FormatError carrying line:column.
json parse_json_text(const std::string& text, const std::string& origin);

/// Pretty JSON with scalar arrays kept on one line; stable for identical values.
std::string dump_json(const json& document);

}  // namespace crowdcharge
