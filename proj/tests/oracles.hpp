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

// Brute-force reference answers for the two optimizers. Both enumerate the whole
// decision space, so they only work on small instances.

#pragma once

#include <memory>
#include <vector>

#include "crowdcharge/composition.hpp"
#include "crowdcharge/random.hpp"

namespace crowdcharge::testing {

struct ComposeInstance {
  EnergyRequest request;
  std::vector<ProactiveEnergyService> services;
  std::vector<double> remaining_dec;
};

// Up to 8 services around a request window of at most 6 slots.
ComposeInstance random_compose_instance(Rng& rng);

// Tries every assignment of window slots to services (or to nobody).
double oracle_compose(const ComposeInstance& instance, const TimeGrid& grid = {});

struct PlanInstance {
  ConsumerProfile consumer;
  MobilityGraph graph;
  std::shared_ptr<UsageBehavior> usage;
};

// Up to 4 stays, up to 2 alternatives per changeable stay, stretch ranges of at most 3 slots.
PlanInstance random_plan_instance(Rng& rng);

struct PlanScore {
  double energy = 0.0;
  int modified = 0;
  double acquisition = 0.0;
};

// Scores every combination of stay options and returns the best under the planning order.
PlanScore oracle_plan(const PlanInstance& instance, double threshold_percent = 20.0);

}  // namespace crowdcharge::testing
