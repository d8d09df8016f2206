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

#include <gtest/gtest.h>

#include <memory>

#include "crowdcharge/graph.hpp"
#include "crowdcharge/random.hpp"
#include "support.hpp"

namespace cc = crowdcharge;
using cc::CellId;
using cc::testing::pattern_of;

namespace {

const cc::TimeGrid kGrid;
const CellId A{0}, B{1}, C{2};

std::vector<cc::Microcell> cells(std::size_t n) { return cc::testing::bare_scenario(n).microcells; }

cc::ProactiveEnergyService service(CellId where, cc::Slot start, cc::Slot end, double dec,
                                   std::shared_ptr<const cc::MobilityPattern> mobility = nullptr) {
  cc::ProactiveEnergyService s;
  s.id = cc::ServiceId{0};
  s.provider = cc::UserId{0};
  s.qos.location = where;
  s.qos.start = start;
  s.qos.end = end;
  s.qos.deliverable_capacity_wh = dec;
  s.qos.intensity_w = 3.0;
  s.qos.transmission_success_rate = 1.0;
  s.mobility = std::move(mobility);
  return s;
}

// Pattern with presence `p` in `cell` at every slot of [begin, end).
std::shared_ptr<const cc::MobilityPattern> presence(CellId cell, cc::Slot begin, cc::Slot end, double p) {
  auto pattern = std::make_shared<cc::MobilityPattern>(pattern_of(cc::UserId{0}, 3, {}));
  for (cc::Slot s = begin; s < end; ++s) {
    pattern->theta[s * pattern->columns() + cell.index()] = p;
    pattern->theta[s * pattern->columns() + 3] = 1.0 - p;
  }
  return pattern;
}

}  // namespace

TEST(MobilityGraph, SinglePathHasUnitWeights) {
  std::vector<cc::MobilityPattern> patterns;
  for (int u = 0; u < 3; ++u) {
    patterns.push_back(pattern_of(cc::UserId{u}, 3, {{A, {10, 20}}, {B, {30, 40}}, {C, {50, 60}}}));
  }
  const auto g = cc::build_mobility_graph(patterns, cells(3));
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_DOUBLE_EQ(g.edge_weight(A, B), 1.0);
  EXPECT_DOUBLE_EQ(g.edge_weight(B, C), 1.0);
  EXPECT_DOUBLE_EQ(g.edge_weight(A, C), 0.0);
}

TEST(MobilityGraph, SplitTransitionsShareWeight) {
  std::vector<cc::MobilityPattern> patterns;
  for (int u = 0; u < 4; ++u) {
    patterns.push_back(pattern_of(cc::UserId{u}, 3, {{A, {10, 20}}, {u % 2 ? B : C, {30, 40}}}));
  }
  const auto g = cc::build_mobility_graph(patterns, cells(3));
  EXPECT_DOUBLE_EQ(g.edge_weight(A, B), 0.5);
  EXPECT_DOUBLE_EQ(g.edge_weight(A, C), 0.5);
}

TEST(MobilityGraph, StayingPutAddsNoEdges) {
  const std::vector<cc::MobilityPattern> patterns{pattern_of(cc::UserId{0}, 3, {{A, {0, 288}}})};
  EXPECT_TRUE(cc::build_mobility_graph(patterns, cells(3)).edges().empty());
}

TEST(MobilityGraph, OutgoingWeightsSumToOne) {
  cc::Rng rng(5);
  std::vector<cc::MobilityPattern> patterns;
  for (int u = 0; u < 30; ++u) {
    std::vector<cc::Stay> stays;
    for (int k = 0; k < 5; ++k) stays.push_back({CellId{rng.uniform_int(0, 3)}, {k * 40, k * 40 + 20}});
    patterns.push_back(pattern_of(cc::UserId{u}, 4, stays));
  }
  const auto g = cc::build_mobility_graph(patterns, cells(4));
  std::map<CellId, double> out;
  for (const auto& [edge, w] : g.edges()) {
    EXPECT_NE(edge.first, edge.second);
    out[edge.first] += w;
  }
  for (const auto& [from, total] : out) EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Availability, PresenceWeightedSum) {
  cc::MobilityGraph g(3, kGrid);
  // DEC limits each to 0.25 Wh over a single slot.
  const std::vector<cc::ProactiveEnergyService> services{service(A, 100, 101, 0.25, presence(A, 100, 101, 0.9)),
                                                         service(A, 100, 101, 0.25, presence(A, 100, 101, 0.5))};
  g = cc::estimate_availability(std::move(g), services);
  EXPECT_NEAR(g.availability(100, A), 0.35, 1e-12);
}

TEST(Availability, ThreeWattsForFiveMinutes) {
  const std::vector<cc::ProactiveEnergyService> services{service(A, 50, 51, 10.0, presence(A, 50, 51, 1.0))};
  const auto g = cc::estimate_availability(cc::MobilityGraph(3, kGrid), services);
  EXPECT_NEAR(g.availability(50, A), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(g.availability(51, A), 0.0);
}

TEST(Availability, NoServicesIsAllZero) {
  const auto g = cc::estimate_availability(cc::MobilityGraph(3, kGrid), {});
  for (cc::Slot s = 0; s < kGrid.horizon; ++s) {
    for (int c = 0; c < 3; ++c) ASSERT_DOUBLE_EQ(g.availability(s, CellId{c}), 0.0);
  }
}

TEST(Availability, UnknownCellIsRejected) {
  const std::vector<cc::ProactiveEnergyService> services{service(CellId{9}, 0, 1, 1.0)};
  EXPECT_THROW(cc::estimate_availability(cc::MobilityGraph(3, kGrid), services), cc::UnknownNodeError);
}

TEST(Availability, MonotoneInAddedServices) {
  cc::Rng rng(11);
  std::vector<cc::ProactiveEnergyService> services;
  cc::MobilityGraph before(3, kGrid);
  for (int i = 0; i < 20; ++i) {
    const cc::Slot start = rng.uniform_int(0, 200);
    services.push_back(service(CellId{rng.uniform_int(0, 2)}, start, start + rng.uniform_int(1, 30),
                               rng.uniform(0.1, 3.0)));
    const auto after = cc::estimate_availability(cc::MobilityGraph(3, kGrid), services);
    for (cc::Slot s = 0; s < kGrid.horizon; ++s) {
      for (int c = 0; c < 3; ++c) ASSERT_GE(after.availability(s, CellId{c}), before.availability(s, CellId{c}));
    }
    before = after;
  }
}

TEST(AvailabilityScore, SupplyOverDemandClamped) {
  cc::MobilityGraph g(3, kGrid);
  g.add_availability(10, A, 4.0);
  g.add_demand(10, A, 5.0);
  EXPECT_NEAR(cc::availability_score(g, A, {10, 11}), 0.8, 1e-12);
  g.add_availability(20, B, 9.0);
  g.add_demand(20, B, 3.0);
  EXPECT_DOUBLE_EQ(cc::availability_score(g, B, {20, 21}), 1.0);
  g.add_availability(30, C, 1.0);
  g.add_demand(30, C, 5.0);
  EXPECT_NEAR(cc::availability_score(g, C, {30, 31}), 0.2, 1e-12);
}

TEST(AvailabilityScore, StaysInUnitInterval) {
  cc::Rng rng(3);
  cc::MobilityGraph g(2, kGrid);
  for (cc::Slot s = 0; s < kGrid.horizon; ++s) {
    if (rng.bernoulli(0.5)) g.add_availability(s, A, rng.uniform(0.0, 2.0));
    if (rng.bernoulli(0.5)) g.add_demand(s, A, rng.uniform(0.0, 2.0));
  }
  for (int i = 0; i < 200; ++i) {
    const cc::Slot b = rng.uniform_int(0, 280);
    const double v = cc::availability_score(g, A, {b, b + rng.uniform_int(1, 8)});
    ASSERT_GE(v, 0.0);
    ASSERT_LE(v, 1.0);
  }
}

TEST(ExpectedIntake, CappedByIntakeRateAndShared) {
  cc::MobilityGraph g(2, kGrid);
  g.add_availability(0, A, 1.0);
  // 2 W for five minutes caps the slot at 1/6 Wh.
  EXPECT_NEAR(cc::expected_intake(g, A, {0, 1}, 2.0), 1.0 / 6.0, 1e-12);
  g.add_availability(1, A, 0.1);
  g.add_demand(1, A, 0.4);
  EXPECT_NEAR(cc::expected_intake(g, A, {1, 2}, 3.0), 0.1 * 0.25, 1e-12);
}
