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

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "crowdcharge/graph.hpp"
#include "crowdcharge/model.hpp"
#include "crowdcharge/patterns.hpp"

namespace crowdcharge {

struct DeviceProfile {
  double capacity_wh = 12.0;
  double power_w = 3.0;       // I when sharing
  double max_intake_w = 3.0;  // CI when receiving
  double tsr = 1.0;
  double reliability = 1.0;

  friend bool operator==(const DeviceProfile&, const DeviceProfile&) = default;
};

struct ProviderProfile {
  UserId id;
  std::shared_ptr<const MobilityPattern> mobility;
  std::shared_ptr<const UsageBehavior> usage;
  DeviceProfile device;
  double reserve_percent = kDefaultReservePercent;
};

struct ConsumerProfile {
  UserId id;
  std::shared_ptr<const MobilityPattern> mobility;
  std::shared_ptr<const UsageBehavior> usage;
  Flexibility flexibility;
  DeviceProfile device;
};

// ---------------------------------------------------------------------------
// Proactive services
// ---------------------------------------------------------------------------

/// One service per stay of the provider that still has surplus to give. Earlier
/// stays claim the surplus first; a stay never claims more than its intensity can
/// move during the stay. Ids are assigned consecutively from `first_id`.
std::vector<ProactiveEnergyService> generate_proactive_services(const ProviderProfile& provider,
                                                                const TimeGrid& grid, ServiceId first_id);

// ---------------------------------------------------------------------------
// Consumer planning
// ---------------------------------------------------------------------------

struct ConsumerPlan {
  UserId consumer;
  std::vector<Stay> stays;
  std::vector<EnergyRequest> requests;
  double deficit_wh = 0.0;
  double expected_fulfillment_wh = 0.0;
  int modified_stays = 0;
  /// Sum over requests of RE x start slot; lower means energy is planned earlier.
  double acquisition_cost = 0.0;
};

/// A candidate realization of one nominal stay.
struct StayOption {
  CellId cell;
  SlotRange interval;
  bool modified = false;

  friend bool operator==(const StayOption&, const StayOption&) = default;
};

/// Every admissible realization of stay `k`: the nominal cell plus alternatives when
/// changeable, crossed with every length in the stretch bounds when stretchable.
/// Options never run past the next nominal stay or the end of the day. The nominal
/// option comes first.
std::vector<StayOption> stay_options(const Flexibility& flexibility, std::size_t k, const TimeGrid& grid);

/// Chooses one option per stay maximizing expected fulfilled energy, then fewer
/// modified stays, then earlier acquisition, then the lexicographically smallest cell
/// sequence. Requests are pinned to stays, filled earliest first, each capped by the
/// expected intake at its stay.
ConsumerPlan plan_consumer(const ConsumerProfile& consumer, const MobilityGraph& graph,
                           double threshold_percent = kDefaultThresholdPercent, RequestId first_id = RequestId{0});

std::vector<EnergyRequest> generate_proactive_requests(const ConsumerProfile& consumer, const MobilityGraph& graph,
                                                       double threshold_percent = kDefaultThresholdPercent,
                                                       RequestId first_id = RequestId{0});

// ---------------------------------------------------------------------------
// Spatio-temporal composition
// ---------------------------------------------------------------------------

struct Allocation {
  ServiceId service;
  Slot slot = 0;
  double delivered_wh = 0.0;

  friend bool operator==(const Allocation&, const Allocation&) = default;
};

struct CompositionResult {
  RequestId request;
  std::vector<Allocation> allocations;
  double total_delivered_wh = 0.0;
  bool fulfilled = false;
};

/// Composes services for one request. `remaining_dec_wh`, when non-empty, is aligned
/// with `services` and replaces each advertised DEC (the realized state of the world).
///
/// Candidates are colocated services whose window overlaps the request. Each slot of
/// the request is fed by at most one service and each service feeds at most one slot
/// at a time. Candidates are ranked by deliverable energy within the overlap (then
/// higher Tsr, then lower id); their per-slot deliveries are taken greedily by value,
/// keeping only those that can still be scheduled, until RE is met.
CompositionResult compose_spatiotemporal(const EnergyRequest& request,
                                         std::span<const ProactiveEnergyService> services,
                                         std::span<const double> remaining_dec_wh, const TimeGrid& grid);

inline CompositionResult compose_spatiotemporal(const EnergyRequest& request,
                                                std::span<const ProactiveEnergyService> services,
                                                const TimeGrid& grid) {
  return compose_spatiotemporal(request, services, {}, grid);
}

/// Energy one service delivers to one request in a full slot, after loss.
double delivered_per_slot(const ProactiveEnergyService& service, const EnergyRequest& request,
                          const TimeGrid& grid);

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// What the reactive policy needs to know about a consumer at one slot.
struct ConsumerSnapshot {
  UserId consumer;
  Slot slot = 0;
  CellId location = kOutside;
  double soc = 100.0;
  /// Set when SoC crosses below the threshold; cleared once a request is issued.
  bool armed = false;
  bool has_active_request = false;
  int remaining_stay_slots = 0;
  const UsageBehavior* usage = nullptr;
  DeviceProfile device;
  RequestId next_id;
};

/// Emits a request when the consumer is armed, below threshold, inside a microcell and
/// has no active request. RE restores the threshold and covers the forecast deficit
/// for the rest of the day.
std::optional<EnergyRequest> compose_reactive(const ConsumerSnapshot& state,
                                              double threshold_percent = kDefaultThresholdPercent);

/// One request per nominal stay covering the full stay. RE is the outstanding day
/// deficit after the receipts of earlier stays (`receipts_wh[k]` is what stay k
/// delivered; missing entries count as zero). Zero-RE requests are dropped.
std::vector<EnergyRequest> compose_bruteforce(const ConsumerProfile& consumer, const TimeGrid& grid,
                                              double threshold_percent = kDefaultThresholdPercent,
                                              RequestId first_id = RequestId{0},
                                              std::span<const double> receipts_wh = {});

/// The request brute force issues for stay `k` given the deficit still outstanding.
std::optional<EnergyRequest> bruteforce_request(const ConsumerProfile& consumer, std::size_t k,
                                                double outstanding_wh, RequestId id);

}  // namespace crowdcharge
