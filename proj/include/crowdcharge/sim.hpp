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
#include <map>
#include <optional>
#include <vector>

#include "crowdcharge/composition.hpp"
#include "crowdcharge/graph.hpp"
#include "crowdcharge/report.hpp"
#include "crowdcharge/scenario.hpp"

namespace crowdcharge {

/// Samples a day of locations. Slots inside a stay of the pattern share one draw from
/// the stay's mean presence row; other slots are drawn independently.
std::vector<CellId> realize_mobility(const MobilityPattern& pattern, std::uint64_t seed);

struct TransferRecord {
  Slot slot = 0;
  ServiceId service;
  RequestId request;
  double delivered_wh = 0.0;
  double drawn_wh = 0.0;

  friend bool operator==(const TransferRecord&, const TransferRecord&) = default;
};

struct WorldState {
  TimeGrid grid;
  Slot slot = 0;
  std::vector<CellId> user_locations;   // by user index
  std::vector<double> soc;              // by user index, percent
  std::vector<double> capacity_wh;      // by user index
  std::vector<double> remaining_dec;    // by service index
  std::vector<EnergyRequest> requests;  // issued so far, by request index
  std::vector<double> received;         // by request index
  std::uint64_t rng_seed = 0;
  std::vector<TransferRecord> ledger;
};

/// Moves energy from `service` to `request` during `slot` and updates `state`.
/// Returns (delivered, drawn). Throws ContractError when the pair is not colocated or
/// either window misses the slot.
std::pair<double, double> transfer_energy(const ProactiveEnergyService& service, const EnergyRequest& request,
                                          WorldState& state, Slot slot);

struct RunOptions {
  double threshold_percent = kDefaultThresholdPercent;
  double reserve_percent = kDefaultReservePercent;
  /// Fill RunReport::runtime_ms with wall-clock time. Off keeps reports reproducible.
  bool measure_runtime = false;
};

/// Everything derived from the histories, shared by all policies.
struct PreparedScenario {
  const Scenario* scenario = nullptr;
  std::vector<std::shared_ptr<const MobilityPattern>> patterns;  // by user index
  std::vector<std::shared_ptr<const UsageBehavior>> usage;       // by user index
  std::vector<ConsumerProfile> consumers;
  std::vector<ProviderProfile> providers;
  std::vector<ProactiveEnergyService> services;
  /// Provider availability and the consumers' expected demand.
  MobilityGraph graph;
};

/// Throws ValidationError on an invalid scenario.
PreparedScenario prepare(const Scenario& scenario, const RunOptions& options = {});

struct RunTrace {
  RunReport report;
  std::vector<ProactiveEnergyService> services;
  std::vector<EnergyRequest> requests;
  std::vector<double> received;  // by request index
  std::vector<TransferRecord> ledger;
  std::vector<std::vector<CellId>> trajectories;  // by user index
  std::vector<ConsumerPlan> plans;                // proactive only
  /// Provider battery energy spent, by user index (Wh).
  std::vector<double> provider_spent_wh;
};

RunTrace simulate(const PreparedScenario& prepared, Policy policy, std::uint64_t seed, const RunOptions& options = {});

RunReport run(const Scenario& scenario, Policy policy, std::uint64_t seed, const RunOptions& options = {});

/// Post-hoc ledger checks of a finished run; empty when all hold.
Violations audit(const RunTrace& trace, const TimeGrid& grid = {});

void write_ledger_csv(const std::vector<TransferRecord>& ledger, std::ostream& out);

}  // namespace crowdcharge
