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

#include "crowdcharge/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace crowdcharge {

unsigned default_threads() {
  if (const char* env = std::getenv("CROWDCHARGE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> parse_ratios(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw std::invalid_argument("bad ratio '" + s + "' in '" + text + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 3) throw std::invalid_argument("ratio range must be a:b[:step]");
    const double a = number(parts[0]);
    const double b = number(parts[1]);
    const double step = parts.size() == 3 ? number(parts[2]) : 1.0;
    if (!(step > 0.0) || b < a) throw std::invalid_argument("ratio range must be ascending with a positive step");
    for (int i = 0;; ++i) {
      const double v = a + i * step;
      if (v > b + 1e-9) break;
      out.push_back(std::round(v * 1e9) / 1e9);
    }
  } else {
    std::stringstream in(text);
    for (std::string p; std::getline(in, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw std::invalid_argument("no ratios in '" + text + "'");
  for (double r : out) {
    if (!(r > 0.0)) throw std::invalid_argument("ratios must be positive");
  }
  return out;
}

std::vector<TableRow> sweep(const SweepSpec& spec) {
  if (spec.seeds < 1) throw std::invalid_argument("seeds must be >= 1");
  if (spec.ratios.empty() || spec.policies.empty()) throw std::invalid_argument("nothing to sweep");
  for (double r : spec.ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("ratios must be positive");
  }
  struct Cell {
    double ratio;
    int seed_index;
  };
  std::vector<Cell> cells;
  for (double r : spec.ratios) {
    for (int i = 0; i < spec.seeds; ++i) cells.push_back({r, i});
  }
  std::vector<std::vector<TableRow>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cells.size();) {
      const Cell cell = cells[i];
      ScenarioConfig config = spec.config;
      config.supply_demand_ratio = cell.ratio;
      config.seed = spec.config.seed + static_cast<std::uint64_t>(cell.seed_index);
      try {
        const Scenario scenario = generate_scenario(config);
        const PreparedScenario prepared = prepare(scenario, spec.options);
        for (Policy policy : spec.policies) {
          const auto start = std::chrono::steady_clock::now();
          const RunTrace trace = simulate(prepared, policy, config.seed, spec.options);
          TableRow row = row_of(trace.report, cell.ratio);
          if (spec.options.measure_runtime) {
            row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
          }
          row.audit_violations = audit(trace, scenario.grid).size();
          results[i].push_back(std::move(row));
        }
      } catch (const std::exception& e) {
        std::ostringstream where;
        where << "sweep cell ratio=" << cell.ratio << " seed=" << config.seed << ": " << e.what();
        errors[i] = where.str();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(spec.threads ? spec.threads : default_threads(), static_cast<unsigned>(cells.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : errors) {
    if (!e.empty()) throw Error(e);
  }
  std::vector<TableRow> rows;
  for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
  std::stable_sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
    if (a.ratio != b.ratio) return a.ratio < b.ratio;
    const auto pa = to_string(a.policy), pb = to_string(b.policy);
    if (pa != pb) return pa < pb;
    return a.seed < b.seed;
  });
  return rows;
}

}  // namespace crowdcharge
