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

#include "crowdcharge/graph.hpp"

#include <algorithm>

#include "crowdcharge/patterns.hpp"

namespace crowdcharge {

namespace {
constexpr double kEpsilon = 1e-9;
}

MobilityGraph::MobilityGraph(std::size_t node_count, const TimeGrid& grid)
    : nodes_(node_count),
      grid_(grid),
      availability_(static_cast<std::size_t>(grid.horizon) * node_count, 0.0),
      demand_(static_cast<std::size_t>(grid.horizon) * node_count, 0.0) {}

double MobilityGraph::edge_weight(CellId from, CellId to) const {
  auto it = edges_.find({from, to});
  return it == edges_.end() ? 0.0 : it->second;
}

MobilityGraph build_mobility_graph(std::span<const MobilityPattern> patterns, std::span<const Microcell> cells,
                                   const TimeGrid& grid) {
  if (patterns.empty()) throw std::invalid_argument("mobility graph needs at least one pattern");
  MobilityGraph graph(cells.size(), grid);

  std::map<std::pair<CellId, CellId>, int> counts;
  std::map<CellId, int> outgoing;
  for (const auto& pattern : patterns) {
    const auto stays = extract_stays(pattern);
    for (std::size_t k = 1; k < stays.size(); ++k) {
      const CellId from = stays[k - 1].cell;
      const CellId to = stays[k].cell;
      if (from == to) continue;
      ++counts[{from, to}];
      ++outgoing[from];
    }
  }
  std::map<std::pair<CellId, CellId>, double> edges;
  for (const auto& [edge, n] : counts) edges[edge] = static_cast<double>(n) / outgoing[edge.first];
  graph.set_edges(std::move(edges));
  return graph;
}

MobilityGraph estimate_availability(MobilityGraph graph, std::span<const ProactiveEnergyService> services) {
  const double hours = graph.grid().slot_hours();
  for (const auto& service : services) {
    const auto& q = service.qos;
    if (!graph.has_node(q.location)) {
      throw UnknownNodeError("service " + std::to_string(service.id.value()) + " references unknown microcell " +
                             std::to_string(q.location.value()));
    }
    if (q.end <= q.start) continue;
    const double rate_share = q.intensity_w * hours * q.transmission_success_rate;
    const double capacity_share = q.deliverable_capacity_wh / (q.end - q.start);
    const double per_slot = std::min(rate_share, capacity_share);
    for (Slot s = std::max(q.start, 0); s < std::min(q.end, graph.grid().horizon); ++s) {
      const double presence = service.mobility ? service.mobility->at(s, q.location) : 1.0;
      graph.add_availability(s, q.location, presence * per_slot);
    }
  }
  return graph;
}

MobilityGraph estimate_demand(MobilityGraph graph, std::span<const EnergyRequest> requests) {
  for (const auto& request : requests) {
    if (!graph.has_node(request.location)) {
      throw UnknownNodeError("request " + std::to_string(request.id.value()) + " references unknown microcell " +
                             std::to_string(request.location.value()));
    }
    if (request.duration_slots <= 0) continue;
    const double per_slot = request.required_energy_wh / request.duration_slots;
    const auto w = request.window();
    for (Slot s = std::max(w.begin, 0); s < std::min(w.end, graph.grid().horizon); ++s) {
      graph.add_demand(s, request.location, per_slot);
    }
  }
  return graph;
}

double availability_score(const MobilityGraph& graph, CellId cell, SlotRange interval) {
  double supply = 0.0;
  double demand = 0.0;
  for (Slot s = std::max(interval.begin, 0); s < std::min(interval.end, graph.grid().horizon); ++s) {
    supply += graph.availability(s, cell);
    demand += graph.demand(s, cell);
  }
  if (demand <= 0.0) return supply > 0.0 ? 1.0 : 0.0;
  return std::clamp(supply / std::max(kEpsilon, demand), 0.0, 1.0);
}

double expected_intake(const MobilityGraph& graph, CellId cell, SlotRange interval, double max_intake_w) {
  const double cap = max_intake_w * graph.grid().slot_hours();
  double total = 0.0;
  for (Slot s = std::max(interval.begin, 0); s < std::min(interval.end, graph.grid().horizon); ++s) {
    const double supply = graph.availability(s, cell);
    const double demand = graph.demand(s, cell);
    // Under contention a consumer expects its proportional share.
    const double share = demand > supply ? supply / demand : 1.0;
    total += std::min(supply, cap) * share;
  }
  return total;
}

}  // namespace crowdcharge
