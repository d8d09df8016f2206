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

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "crowdcharge/model.hpp"

namespace crowdcharge {

/// Microcells as nodes, observed stay-to-stay transitions as weighted edges, and
/// per-slot expected supply and demand (watt-hours) for every microcell.
class MobilityGraph {
 public:
  MobilityGraph() = default;
  MobilityGraph(std::size_t node_count, const TimeGrid& grid);

  std::size_t node_count() const { return nodes_; }
  const TimeGrid& grid() const { return grid_; }
  bool has_node(CellId cell) const { return cell.value() >= 0 && cell.index() < nodes_; }

  const std::map<std::pair<CellId, CellId>, double>& edges() const { return edges_; }
  double edge_weight(CellId from, CellId to) const;
  void set_edges(std::map<std::pair<CellId, CellId>, double> edges) { edges_ = std::move(edges); }

  double availability(Slot slot, CellId cell) const { return availability_[offset(slot, cell)]; }
  double demand(Slot slot, CellId cell) const { return demand_[offset(slot, cell)]; }
  void add_availability(Slot slot, CellId cell, double wh) { availability_[offset(slot, cell)] += wh; }
  void add_demand(Slot slot, CellId cell, double wh) { demand_[offset(slot, cell)] += wh; }

 private:
  std::size_t offset(Slot slot, CellId cell) const { return static_cast<std::size_t>(slot) * nodes_ + cell.index(); }

  std::size_t nodes_ = 0;
  TimeGrid grid_;
  std::map<std::pair<CellId, CellId>, double> edges_;
  std::vector<double> availability_;
  std::vector<double> demand_;
};

MobilityGraph build_mobility_graph(std::span<const MobilityPattern> patterns, std::span<const Microcell> cells,
                                   const TimeGrid& grid = {});

/// Adds every service's presence-weighted per-slot supply. Throws UnknownNodeError for
/// services located outside the graph.
MobilityGraph estimate_availability(MobilityGraph graph, std::span<const ProactiveEnergyService> services);

/// Adds each request's energy spread uniformly over its window.
MobilityGraph estimate_demand(MobilityGraph graph, std::span<const EnergyRequest> requests);

/// Expected supply over demand for `cell` across `interval`, clamped to [0,1].
double availability_score(const MobilityGraph& graph, CellId cell, SlotRange interval);

/// Expected supply one consumer can draw over `interval` in `cell`: per slot, the
/// graph's availability capped by the consumer's intake rate, scaled by
/// availability / demand where demand exceeds availability.
double expected_intake(const MobilityGraph& graph, CellId cell, SlotRange interval, double max_intake_w);

}  // namespace crowdcharge
