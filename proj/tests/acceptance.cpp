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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Detail lines start with two spaces.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "crowdcharge/sweep.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace cc = crowdcharge;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kSeeds = 20;
const std::vector<cc::Policy> kPolicies{cc::Policy::kReactive, cc::Policy::kProactive, cc::Policy::kBruteForce};

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = (i + j) / 2.0 + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

// rows indexed by (ratio, policy) -> per-seed values in seed order.
using BySeed = std::map<std::pair<double, cc::Policy>, std::vector<const cc::TableRow*>>;

BySeed index_rows(const std::vector<cc::TableRow>& rows) {
  BySeed out;
  for (const auto& r : rows) out[{r.ratio, r.policy}].push_back(&r);
  return out;
}

double mean_of(const std::vector<const cc::TableRow*>& rows, double cc::TableRow::*field) {
  double total = 0.0;
  for (const auto* r : rows) total += r->*field;
  return rows.empty() ? 0.0 : total / rows.size();
}

std::size_t violations_in(const std::vector<cc::TableRow>& rows) {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.audit_violations;
  return n;
}

cc::SweepSpec base_spec(std::vector<double> ratios) {
  cc::SweepSpec spec;
  spec.ratios = std::move(ratios);
  spec.seeds = kSeeds;
  spec.policies = kPolicies;
  return spec;
}

// 1. Success-ratio ordering in the three regimes.
Outcome policy_ordering(std::vector<cc::TableRow>& rows) {
  Outcome o;
  const auto spec = base_spec({1.0, 3.0, 6.0});
  o.check(spec.config.users >= 100 && spec.config.microcells >= 8, "population: 100 users, 8 microcells");
  const auto start = Clock::now();
  rows = cc::sweep(spec);
  const double elapsed = seconds_since(start);
  const auto by = index_rows(rows);
  for (double ratio : spec.ratios) {
    const auto& b = by.at({ratio, cc::Policy::kBruteForce});
    const auto& p = by.at({ratio, cc::Policy::kProactive});
    const auto& r = by.at({ratio, cc::Policy::kReactive});
    const double mb = mean_of(b, &cc::TableRow::success_ratio);
    const double mp = mean_of(p, &cc::TableRow::success_ratio);
    const double mr = mean_of(r, &cc::TableRow::success_ratio);
    int bp = 0, pr = 0;
    double dbp = 0.0, dpr = 0.0;
    for (int i = 0; i < kSeeds; ++i) {
      bp += b[i]->success_ratio - p[i]->success_ratio >= 0.0;
      pr += p[i]->success_ratio - r[i]->success_ratio >= 0.0;
      dbp += (b[i]->success_ratio - p[i]->success_ratio) / kSeeds;
      dpr += (p[i]->success_ratio - r[i]->success_ratio) / kSeeds;
    }
    o.check(mb >= mp && mp >= mr, fmt("ratio %g: mean success bruteforce %.3f >= proactive %.3f >= reactive %.3f",
                                      ratio, mb, mp, mr));
    o.check(dbp >= 0.0 && bp >= 0.8 * kSeeds,
            fmt("ratio %g: bruteforce-proactive mean diff %.3f, nonnegative in %g/%g seeds", ratio, dbp, bp, kSeeds));
    o.check(dpr >= 0.0 && pr >= 0.8 * kSeeds,
            fmt("ratio %g: proactive-reactive mean diff %.3f, nonnegative in %g/%g seeds", ratio, dpr, pr, kSeeds));
  }
  o.check(elapsed < 120.0, fmt("full grid of %g runs in %.1f s (limit 120 s)", rows.size(), elapsed));
  return o;
}

// 2. Energy per request across the ratio sweep.
Outcome ratio_sweep(std::vector<cc::TableRow>& rows) {
  Outcome o;
  const auto spec = base_spec(cc::parse_ratios("1:9"));
  rows = cc::sweep(spec);
  const auto by = index_rows(rows);
  std::map<cc::Policy, std::vector<double>> curve;
  for (double ratio : spec.ratios) {
    for (auto policy : kPolicies) {
      curve[policy].push_back(mean_of(by.at({ratio, policy}), &cc::TableRow::mean_energy_per_request_wh));
    }
  }
  for (auto policy : kPolicies) {
    const double rho = spearman(spec.ratios, curve[policy]);
    o.check(rho >= 0.9, cc::to_string(policy) + fmt(": Spearman rho %.3f over ratios 1..9 (need >= 0.9)", rho));
  }
  for (std::size_t i = 0; i < spec.ratios.size(); ++i) {
    const double ratio = spec.ratios[i];
    const double r = curve[cc::Policy::kReactive][i];
    const double p = curve[cc::Policy::kProactive][i];
    const double b = curve[cc::Policy::kBruteForce][i];
    if (ratio <= 2.5) {
      const double gap = r > 0.0 ? std::abs(p - r) / r : INFINITY;
      o.check(gap <= 0.15,
              fmt("ratio %g: |proactive %.3f - reactive %.3f| / reactive = %.1f%% (need <= 15%%)", ratio, p, r,
                  100.0 * gap));
    }
    if (ratio >= 5.0) {
      o.check(p >= 0.9 * b, fmt("ratio %g: proactive %.3f >= 90%% of bruteforce %.3f", ratio, p, b));
      o.check(p >= 1.1 * r, fmt("ratio %g: proactive %.3f >= reactive %.3f + 10%%", ratio, p, r));
    }
  }
  return o;
}

// 3. Optimizers against exhaustive enumeration.
Outcome oracle_equivalence() {
  Outcome o;
  const cc::TimeGrid grid;
  const auto start = Clock::now();
  cc::Rng rng(31337);
  int compose_ok = 0;
  for (int i = 0; i < 200; ++i) {
    const auto in = cc::testing::random_compose_instance(rng);
    const auto got = cc::compose_spatiotemporal(in.request, in.services, in.remaining_dec, grid);
    compose_ok += std::abs(got.total_delivered_wh - cc::testing::oracle_compose(in, grid)) <= 1e-9;
  }
  int plan_ok = 0;
  for (int i = 0; i < 200; ++i) {
    const auto in = cc::testing::random_plan_instance(rng);
    const auto plan = cc::plan_consumer(in.consumer, in.graph);
    const auto best = cc::testing::oracle_plan(in);
    plan_ok += std::abs(plan.expected_fulfillment_wh - best.energy) <= 1e-9 && plan.modified_stays == best.modified &&
               std::abs(plan.acquisition_cost - best.acquisition) <= 1e-9;
  }
  const double elapsed = seconds_since(start);
  o.check(compose_ok == 200, fmt("composition matches enumeration on %g/200 instances", compose_ok));
  o.check(plan_ok == 200, fmt("planning matches enumeration on %g/200 instances", plan_ok));
  o.check(elapsed < 30.0, fmt("%.2f s (limit 30 s)", elapsed));
  return o;
}

// 4. Ledger audits over every run of criteria 1 and 2.
Outcome conservation(const std::vector<cc::TableRow>& ordering, const std::vector<cc::TableRow>& sweep) {
  Outcome o;
  o.check(violations_in(ordering) == 0,
          fmt("%g runs from the regime grid, %g violations", ordering.size(), violations_in(ordering)));
  o.check(violations_in(sweep) == 0, fmt("%g runs from the ratio sweep, %g violations", sweep.size(), violations_in(sweep)));
  return o;
}

// 5. Brute force never receives less than proactive for a lone rigid consumer.
Outcome dominance() {
  Outcome o;
  int cases = 0, violations = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 1; cases < 100; ++seed) {
    cc::ScenarioConfig config;
    config.seed = 500 + seed;
    config.users = 40;
    config.supply_demand_ratio = static_cast<double>(1 + seed % 6);
    const auto source = cc::generate_scenario(config);
    for (std::size_t pick = 0; cases < 100; ++pick) {
      cc::Scenario single;
      if (!cc::testing::single_consumer(source, pick, single)) break;
      const auto b = cc::run(single, cc::Policy::kBruteForce, config.seed);
      const auto p = cc::run(single, cc::Policy::kProactive, config.seed);
      ++cases;
      const double gap = p.total_delivered_wh - b.total_delivered_wh;
      if (gap > 1e-9) ++violations;
      worst = std::max(worst, gap);
      pick += 3;  // spread picks across the population
    }
  }
  o.check(violations == 0, fmt("%g cases, %g with proactive > bruteforce (worst excess %.2e Wh)", cases, violations, worst));
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    files[entry.path().filename().string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

void write_sweep_dir(const std::vector<cc::TableRow>& rows, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream csv(dir / "results.csv", std::ios::binary);
  cc::write_table_csv(rows, csv);
  std::ofstream md(dir / "results.md", std::ios::binary);
  cc::write_table_markdown(rows, md);
  cc::write_plots(rows, dir);
}

// 6. Byte-identical reruns.
Outcome determinism() {
  Outcome o;
  int identical = 0, total = 0;
  for (std::uint64_t seed : {2u, 9u, 14u}) {
    cc::ScenarioConfig config;
    config.seed = seed;
    const auto scenario = cc::generate_scenario(config);
    for (auto policy : kPolicies) {
      std::ostringstream a, b;
      cc::write_report_csv(cc::run(scenario, policy, seed), a);
      cc::write_report_csv(cc::run(scenario, policy, seed), b);
      identical += a.str() == b.str();
      ++total;
    }
  }
  o.check(identical == total, fmt("run CSV identical on %g/%g reruns", identical, total));

  cc::SweepSpec spec;
  spec.ratios = {1.0, 3.0, 6.0};
  spec.seeds = 3;
  const auto root = fs::temp_directory_path() / "crowdcharge-acceptance";
  spec.threads = 1;
  write_sweep_dir(cc::sweep(spec), root / "first");
  spec.threads = 4;
  write_sweep_dir(cc::sweep(spec), root / "second");
  const auto first = snapshot(root / "first");
  o.check(!first.empty() && first == snapshot(root / "second"),
          fmt("sweep directory of %g files identical across reruns and thread counts", first.size()));
  return o;
}

// 7. Generator hits its ratio and its histories are self-consistent.
Outcome generator_fidelity() {
  Outcome o;
  for (double ratio : {1.0, 3.0, 6.0, 9.0}) {
    int inside = 0;
    double lo = INFINITY, hi = 0.0;
    for (int i = 0; i < kSeeds; ++i) {
      cc::ScenarioConfig config;
      config.seed = 100 + i;
      config.supply_demand_ratio = ratio;
      const double got = cc::achieved_supply_demand_ratio(cc::generate_scenario(config));
      inside += std::abs(got - ratio) <= 0.1 * ratio;
      lo = std::min(lo, got);
      hi = std::max(hi, got);
    }
    o.check(inside == kSeeds, fmt("ratio %g: %g/20 seeds within 10%% (achieved %.3f..%.3f)", ratio, inside, lo, hi));
  }
  int users = 0, recovered = 0;
  for (int i = 0; i < kSeeds; ++i) {
    cc::ScenarioConfig config;
    config.seed = 200 + i;
    config.history_days = 10;
    config.routine_adherence = 1.0;
    const auto scenario = cc::generate_scenario(config);
    const auto routines = cc::routine_stays(config);
    for (std::size_t u = 0; u < scenario.users.size(); ++u) {
      const auto pattern =
          cc::estimate_mobility_pattern(scenario.users[u].history, scenario.grid, scenario.microcells.size());
      ++users;
      recovered += cc::extract_stays(pattern) == routines[u];
    }
  }
  o.check(recovered == users, fmt("stays recovered at presence >= 0.5 for %g/%g users", recovered, users));
  return o;
}

}  // namespace

int main() {
  const char* names[] = {"",
                         "policy ordering",
                         "ratio sweep",
                         "oracle equivalence",
                         "conservation",
                         "dominance",
                         "determinism",
                         "generator fidelity"};
  std::vector<cc::TableRow> ordering, sweep;
  std::vector<Outcome> outcomes;
  outcomes.push_back(policy_ordering(ordering));
  outcomes.push_back(ratio_sweep(sweep));
  outcomes.push_back(oracle_equivalence());
  outcomes.push_back(conservation(ordering, sweep));
  outcomes.push_back(dominance());
  outcomes.push_back(determinism());
  outcomes.push_back(generator_fidelity());

  int failed = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    std::printf("%s criterion %zu: %s\n", outcomes[i].pass ? "PASS" : "FAIL", i + 1, names[i + 1]);
    for (const auto& note : outcomes[i].notes) std::printf("  %s\n", note.c_str());
    failed += !outcomes[i].pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(outcomes.size()) - failed, outcomes.size());
  return failed == 0 ? 0 : 1;
}
