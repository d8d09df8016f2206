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
#include <string>
#include <vector>

#include "crowdcharge/report.hpp"
#include "crowdcharge/scenario.hpp"
#include "crowdcharge/sim.hpp"

namespace crowdcharge {

struct SweepSpec {
  ScenarioConfig config;
  std::vector<double> ratios;
  std::vector<Policy> policies{Policy::kReactive, Policy::kProactive, Policy::kBruteForce};
  int seeds = 1;
  /// Worker threads; 0 picks CROWDCHARGE_THREADS or the machine's parallelism.
  unsigned threads = 0;
  RunOptions options;
};

/// Runs every (ratio, seed, policy) cell. Seed i of a ratio uses config.seed + i and
/// the same scenario for all policies. Rows come back sorted by (ratio, policy, seed).
/// Errors name the failing cell.
std::vector<TableRow> sweep(const SweepSpec& spec);

/// Parses "a:b[:step]" (inclusive, default step 1) or a comma-separated list.
std::vector<double> parse_ratios(const std::string& text);

unsigned default_threads();

}  // namespace crowdcharge
