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

#include "crowdcharge/sim.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <ostream>

#include "crowdcharge/random.hpp"

namespace crowdcharge {

namespace {
constexpr double kEps = 1e-9;
constexpr std::uint64_t kMobilityStream = 11;

CellId cell_of_column(const MobilityPattern& pattern, std::size_t column) {
  return column >= pattern.cell_count ? kOutside : CellId{static_cast<std::int64_t>(column)};
}
}  // namespace

std::vector<CellId> realize_mobility(const MobilityPattern& pattern, std::uint64_t seed) {
  Rng rng(seed);
  const Slot horizon = pattern.horizon();
  std::vector<CellId> out(static_cast<std::size_t>(horizon), kOutside);
  const auto stays = extract_stays(pattern);
  std::size_t k = 0;
  std::vector<double> mean(pattern.columns());
  for (Slot s = 0; s < horizon;) {
    if (k < stays.size() && stays[k].interval.begin == s) {
      const SlotRange iv = stays[k].interval;
      std::fill(mean.begin(), mean.end(), 0.0);
      for (Slot t = iv.begin; t < iv.end; ++t) {
        const auto row = pattern.row(t);
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += row[c];
      }
      const CellId cell = cell_of_column(pattern, rng.categorical(mean));
      std::fill(out.begin() + iv.begin, out.begin() + iv.end, cell);
      s = iv.end;
      ++k;
      continue;
    }
    out[static_cast<std::size_t>(s)] = cell_of_column(pattern, rng.categorical(pattern.row(s)));
    ++s;
  }
  return out;
}

std::pair<double, double> transfer_energy(const ProactiveEnergyService& service, const EnergyRequest& request,
                                          WorldState& state, Slot slot) {
  const CellId cell = service.qos.location;
  if (request.location != cell) throw ContractError("transfer between different microcells");
  if (!service.qos.window().contains(slot) || !request.window().contains(slot)) {
    throw ContractError("transfer outside the service or request window");
  }
  const auto provider = service.provider.index();
  const auto consumer = request.consumer.index();
  if (provider >= state.user_locations.size() || consumer >= state.user_locations.size() ||
      state.user_locations[provider] != cell || state.user_locations[consumer] != cell) {
    throw ContractError("transfer between parties that are not both present");
  }
  const auto si = service.id.index();
  const auto ri = request.id.index();
  if (si >= state.remaining_dec.size() || ri >= state.received.size()) {
    throw ContractError("transfer references an unknown service or request");
  }

  const double tsr = service.qos.transmission_success_rate;
  if (tsr <= 0.0) return {0.0, 0.0};
  const double rate = std::min(service.qos.intensity_w, request.max_intake_w);
  double drawn = std::min(state.remaining_dec[si], rate * state.grid.slot_hours());
  double delivered = drawn * tsr;
  const double residual = std::max(0.0, request.required_energy_wh - state.received[ri]);
  if (delivered > residual) {
    delivered = residual;
    drawn = delivered / tsr;
  }
  if (drawn <= 0.0) return {0.0, 0.0};

  state.remaining_dec[si] = std::max(0.0, state.remaining_dec[si] - drawn);
  state.received[ri] += delivered;
  if (provider < state.soc.size() && provider < state.capacity_wh.size() && state.capacity_wh[provider] > 0.0) {
    state.soc[provider] = std::clamp(state.soc[provider] - drawn / state.capacity_wh[provider] * 100.0, 0.0, 100.0);
  }
  state.ledger.push_back({slot, service.id, request.id, delivered, drawn});
  return {delivered, drawn};
}

PreparedScenario prepare(const Scenario& scenario, const RunOptions& options) {
  if (auto v = validate(scenario); !v.empty()) {
    throw ValidationError("invalid scenario '" + scenario.id + "': " + v.front(), v);
  }
  PreparedScenario p;
  p.scenario = &scenario;
  const TimeGrid& grid = scenario.grid;
  const std::size_t cells = scenario.microcells.size();
  std::vector<MobilityPattern> all;
  for (const auto& user : scenario.users) {
    auto pattern = std::make_shared<MobilityPattern>(estimate_mobility_pattern(user.history, grid, cells));
    auto usage = std::make_shared<UsageBehavior>(estimate_usage_behavior(user.history, user.device.capacity_wh));
    all.push_back(*pattern);
    p.patterns.push_back(pattern);
    p.usage.push_back(usage);
    if (user.role == Role::kProvider) {
      ProviderProfile provider;
      provider.id = user.id;
      provider.mobility = pattern;
      provider.usage = usage;
      provider.device = user.device;
      provider.reserve_percent = options.reserve_percent;
      auto services =
          generate_proactive_services(provider, grid, ServiceId{static_cast<std::int64_t>(p.services.size())});
      p.services.insert(p.services.end(), services.begin(), services.end());
      p.providers.push_back(std::move(provider));
    } else {
      ConsumerProfile consumer;
      consumer.id = user.id;
      consumer.mobility = pattern;
      consumer.usage = usage;
      consumer.device = user.device;
      auto annotations = user.flexibility.annotations();
      if (annotations.empty()) annotations.resize(extract_stays(*pattern).size());  // unannotated: all rigid
      consumer.flexibility = derive_flexibility(*pattern, annotations);
      p.consumers.push_back(std::move(consumer));
    }
  }
  p.graph = estimate_availability(build_mobility_graph(all, scenario.microcells, grid), p.services);

  // Expected demand: the brute-force requests of the consumer population.
  std::vector<EnergyRequest> nominal;
  for (const auto& consumer : p.consumers) {
    if (consumer.flexibility.size() == 0) continue;
    auto requests = compose_bruteforce(consumer, grid, options.threshold_percent,
                                       RequestId{static_cast<std::int64_t>(nominal.size())});
    nominal.insert(nominal.end(), requests.begin(), requests.end());
  }
  p.graph = estimate_demand(std::move(p.graph), nominal);
  return p;
}

namespace {

std::vector<CellId> follow(const std::vector<Stay>& stays, const TimeGrid& grid) {
  std::vector<CellId> out(static_cast<std::size_t>(grid.horizon), kOutside);
  for (const auto& stay : stays) {
    for (Slot t = std::max(0, stay.interval.begin); t < std::min(grid.horizon, stay.interval.end); ++t) {
      out[static_cast<std::size_t>(t)] = stay.cell;
    }
  }
  return out;
}

int run_length(const std::vector<CellId>& trajectory, Slot from) {
  int n = 0;
  const CellId cell = trajectory[static_cast<std::size_t>(from)];
  for (auto t = static_cast<std::size_t>(from); t < trajectory.size() && trajectory[t] == cell; ++t) ++n;
  return n;
}

struct ConsumerState {
  std::size_t profile = 0;
  double deficit = 0.0;
  bool armed = false;
  bool above = true;
  std::size_t next_stay = 0;  // brute force
  std::vector<std::size_t> requests;
};

}  // namespace

RunTrace simulate(const PreparedScenario& prepared, Policy policy, std::uint64_t seed, const RunOptions& options) {
  const Scenario& scenario = *prepared.scenario;
  const TimeGrid& grid = scenario.grid;
  const std::size_t users = scenario.users.size();
  const double threshold = options.threshold_percent;

  RunTrace trace;
  trace.services = prepared.services;
  trace.report.scenario_id = scenario.id;
  trace.report.policy = policy;
  trace.report.seed = seed;

  WorldState state;
  state.grid = grid;
  state.rng_seed = seed;
  state.user_locations.assign(users, kOutside);
  state.soc.resize(users);
  state.capacity_wh.resize(users);
  for (std::size_t u = 0; u < users; ++u) {
    state.soc[u] = prepared.usage[u]->soc.empty() ? 100.0 : prepared.usage[u]->soc.front();
    state.capacity_wh[u] = scenario.users[u].device.capacity_wh;
  }
  for (const auto& s : prepared.services) state.remaining_dec.push_back(s.qos.deliverable_capacity_wh);

  trace.trajectories.resize(users);
  for (std::size_t u = 0; u < users; ++u) {
    trace.trajectories[u] = realize_mobility(*prepared.patterns[u], derive_seed(seed, kMobilityStream, u));
  }

  std::map<std::size_t, ConsumerState> needy;  // by user index
  for (std::size_t c = 0; c < prepared.consumers.size(); ++c) {
    const auto& consumer = prepared.consumers[c];
    const double deficit = compute_deficit(*consumer.usage, threshold);
    if (deficit <= kEps) continue;
    ConsumerState cs;
    cs.profile = c;
    cs.deficit = deficit;
    needy[consumer.id.index()] = cs;
  }

  // Requests that exist before the day starts, activated at their issue slot.
  auto issue = [&](EnergyRequest r) {
    r.id = RequestId{static_cast<std::int64_t>(state.requests.size())};
    needy[r.consumer.index()].requests.push_back(state.requests.size());
    state.requests.push_back(r);
    state.received.push_back(0.0);
  };
  if (policy == Policy::kProactive) {
    for (auto& [u, cs] : needy) {
      const auto& consumer = prepared.consumers[cs.profile];
      auto plan = plan_consumer(consumer, prepared.graph, threshold,
                                RequestId{static_cast<std::int64_t>(state.requests.size())});
      for (const auto& r : plan.requests) issue(r);
      trace.trajectories[u] = follow(plan.stays, grid);
      trace.plans.push_back(std::move(plan));
    }
  } else if (policy == Policy::kBruteForce) {
    for (auto& [u, cs] : needy) {
      trace.trajectories[u] = follow(prepared.consumers[cs.profile].flexibility.availability, grid);
    }
  }

  std::vector<double> consumer_received(users, 0.0);
  std::vector<std::uint8_t> used(prepared.services.size(), 0);
  std::vector<ProactiveEnergyService> local;
  std::vector<double> local_dec;
  std::vector<std::size_t> local_index;

  for (Slot t = 0; t < grid.horizon; ++t) {
    state.slot = t;
    for (std::size_t u = 0; u < users; ++u) {
      state.user_locations[u] = trace.trajectories[u][static_cast<std::size_t>(t)];
      if (t > 0) {
        const auto& soc = prepared.usage[u]->soc;
        const double delta = soc[static_cast<std::size_t>(t)] - soc[static_cast<std::size_t>(t - 1)];
        state.soc[u] = std::clamp(state.soc[u] + delta, 0.0, 100.0);
      }
    }

    for (auto& [u, cs] : needy) {
      const auto& consumer = prepared.consumers[cs.profile];
      if (policy == Policy::kReactive) {
        // Armed on a downward crossing, kept while outside, dropped once back above.
        if (state.soc[u] >= threshold) {
          cs.armed = false;
          cs.above = true;
        } else if (cs.above) {
          cs.armed = true;
          cs.above = false;
        }
        bool active = false;
        for (std::size_t r : cs.requests) {
          const auto& req = state.requests[r];
          if (req.window().contains(t) && state.received[r] < req.required_energy_wh - kEps) active = true;
        }
        ConsumerSnapshot snap;
        snap.consumer = consumer.id;
        snap.slot = t;
        snap.location = state.user_locations[u];
        snap.soc = state.soc[u];
        snap.armed = cs.armed;
        snap.has_active_request = active;
        snap.remaining_stay_slots = run_length(trace.trajectories[u], t);
        snap.usage = consumer.usage.get();
        snap.device = consumer.device;
        snap.next_id = RequestId{static_cast<std::int64_t>(state.requests.size())};
        if (auto r = compose_reactive(snap, threshold)) {
          issue(*r);
          cs.armed = false;
        }
      } else if (policy == Policy::kBruteForce) {
        const auto& stays = consumer.flexibility.availability;
        while (cs.next_stay < stays.size() && stays[cs.next_stay].interval.begin <= t) {
          const std::size_t k = cs.next_stay++;
          if (stays[k].interval.begin != t) continue;
          const RequestId id{static_cast<std::int64_t>(state.requests.size())};
          if (auto r = bruteforce_request(consumer, k, cs.deficit - consumer_received[u], id)) issue(*r);
        }
      }
    }

    // Active requests, first come first served.
    std::vector<std::size_t> active;
    for (std::size_t r = 0; r < state.requests.size(); ++r) {
      const auto& req = state.requests[r];
      if (!req.window().contains(t) || state.received[r] >= req.required_energy_wh - kEps) continue;
      if (state.user_locations[req.consumer.index()] != req.location) continue;
      active.push_back(r);
    }
    std::sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
      const auto& ra = state.requests[a];
      const auto& rb = state.requests[b];
      return ra.issued_at != rb.issued_at ? ra.issued_at < rb.issued_at : ra.id < rb.id;
    });

    std::fill(used.begin(), used.end(), 0);
    for (std::size_t r : active) {
      const EnergyRequest& req = state.requests[r];
      EnergyRequest residual = req;
      residual.issued_at = t;
      residual.duration_slots = req.window().end - t;
      residual.required_energy_wh = req.required_energy_wh - state.received[r];

      local.clear();
      local_dec.clear();
      local_index.clear();
      for (std::size_t s = 0; s < prepared.services.size(); ++s) {
        const auto& service = prepared.services[s];
        if (service.qos.location != req.location || service.qos.end <= t || state.remaining_dec[s] <= kEps) continue;
        const bool now = service.qos.start <= t && !used[s] &&
                         state.user_locations[service.provider.index()] == service.qos.location;
        ProactiveEnergyService copy = service;
        copy.qos.start = std::max(service.qos.start, now ? t : t + 1);
        if (copy.qos.start >= copy.qos.end) continue;
        local.push_back(std::move(copy));
        local_dec.push_back(state.remaining_dec[s]);
        local_index.push_back(s);
      }
      if (local.empty()) continue;
      const auto composition = compose_spatiotemporal(residual, local, local_dec, grid);
      for (const auto& a : composition.allocations) {
        if (a.slot != t) continue;
        std::size_t s = 0;
        for (std::size_t i = 0; i < local.size(); ++i) {
          if (local[i].id == a.service) s = local_index[i];
        }
        const auto [delivered, drawn] = transfer_energy(prepared.services[s], req, state, t);
        (void)drawn;
        used[s] = 1;
        const auto u = req.consumer.index();
        consumer_received[u] += delivered;
        state.soc[u] = std::clamp(state.soc[u] + delivered / state.capacity_wh[u] * 100.0, 0.0, 100.0);
        break;
      }
    }
  }

  trace.requests = state.requests;
  trace.received = state.received;
  trace.ledger = std::move(state.ledger);
  trace.provider_spent_wh.assign(users, 0.0);
  for (const auto& rec : trace.ledger) {
    trace.provider_spent_wh[prepared.services[rec.service.index()].provider.index()] += rec.drawn_wh;
  }
  const RequestOrigin origin = origin_of(policy);
  for (const auto& [u, cs] : needy) {
    RequestRecord rec;
    rec.request_id = static_cast<std::int64_t>(u);
    rec.required_wh = cs.deficit;
    rec.delivered_wh = consumer_received[u];
    rec.fulfilled = rec.delivered_wh >= rec.required_wh - kEps;
    rec.origin = origin;
    trace.report.records.push_back(rec);
  }
  summarize(trace.report);
  return trace;
}

RunReport run(const Scenario& scenario, Policy policy, std::uint64_t seed, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto prepared = prepare(scenario, options);
  auto report = simulate(prepared, policy, seed, options).report;
  if (options.measure_runtime) {
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return report;
}

Violations audit(const RunTrace& trace, const TimeGrid& grid) {
  Violations out;
  constexpr double kTol = 1e-9;
  std::vector<double> drawn(trace.services.size(), 0.0);
  std::vector<double> delivered(trace.requests.size(), 0.0);
  std::map<std::pair<Slot, std::int64_t>, int> service_slot;
  std::map<std::pair<Slot, std::int64_t>, int> request_slot;
  for (const auto& rec : trace.ledger) {
    const std::string where = "slot " + std::to_string(rec.slot) + " service " +
                              std::to_string(rec.service.value()) + " request " +
                              std::to_string(rec.request.value()) + ": ";
    if (rec.service.index() >= trace.services.size() || rec.request.index() >= trace.requests.size()) {
      out.push_back(where + "unknown service or request");
      continue;
    }
    const auto& service = trace.services[rec.service.index()];
    const auto& request = trace.requests[rec.request.index()];
    drawn[rec.service.index()] += rec.drawn_wh;
    delivered[rec.request.index()] += rec.delivered_wh;
    if (std::abs(rec.delivered_wh - rec.drawn_wh * service.qos.transmission_success_rate) > kTol) {
      out.push_back(where + "delivered = drawn x Tsr violated");
    }
    if (rec.delivered_wh > rec.drawn_wh + kTol || rec.drawn_wh < 0.0) out.push_back(where + "delivered <= drawn violated");
    if (rec.drawn_wh > std::min(service.qos.intensity_w, request.max_intake_w) * grid.slot_hours() + kTol) {
      out.push_back(where + "rate cap violated");
    }
    if (service.qos.location != request.location) out.push_back(where + "colocation violated");
    if (!service.qos.window().contains(rec.slot) || !request.window().contains(rec.slot)) {
      out.push_back(where + "window violated");
    }
    if (!trace.trajectories.empty()) {
      const auto at = [&](UserId u) { return trace.trajectories[u.index()][static_cast<std::size_t>(rec.slot)]; };
      if (at(service.provider) != service.qos.location || at(request.consumer) != request.location) {
        out.push_back(where + "presence violated");
      }
    }
    if (++service_slot[{rec.slot, rec.service.value()}] > 1) out.push_back(where + "service used twice in a slot");
    if (++request_slot[{rec.slot, rec.request.value()}] > 1) out.push_back(where + "request fed twice in a slot");
  }
  for (std::size_t s = 0; s < drawn.size(); ++s) {
    if (drawn[s] > trace.services[s].qos.deliverable_capacity_wh + kTol) {
      out.push_back("service " + std::to_string(s) + ": drawn <= DEC violated");
    }
  }
  for (std::size_t r = 0; r < delivered.size(); ++r) {
    if (delivered[r] > trace.requests[r].required_energy_wh + kTol) {
      out.push_back("request " + std::to_string(r) + ": delivered <= RE violated");
    }
    if (r < trace.received.size() && std::abs(trace.received[r] - delivered[r]) > kTol) {
      out.push_back("request " + std::to_string(r) + ": received matches ledger violated");
    }
  }
  return out;
}

void write_ledger_csv(const std::vector<TransferRecord>& ledger, std::ostream& out) {
  out << "slot,service_id,request_id,delivered_wh,drawn_wh\n";
  for (const auto& rec : ledger) {
    out << rec.slot << ',' << rec.service.value() << ',' << rec.request.value() << ','
        << format_fixed(rec.delivered_wh) << ',' << format_fixed(rec.drawn_wh) << '\n';
  }
}

}  // namespace crowdcharge
