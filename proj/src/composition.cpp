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

#include "crowdcharge/composition.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

namespace crowdcharge {

namespace {
constexpr double kTiny = 1e-12;
}

// ---------------------------------------------------------------------------
// Proactive services
// ---------------------------------------------------------------------------

std::vector<ProactiveEnergyService> generate_proactive_services(const ProviderProfile& provider,
                                                                const TimeGrid& grid, ServiceId first_id) {
  if (!provider.mobility || !provider.usage) throw std::invalid_argument("provider without mobility or usage");
  if (provider.mobility->horizon() != grid.horizon ||
      provider.usage->soc.size() != static_cast<std::size_t>(grid.horizon)) {
    throw std::invalid_argument("provider pattern and usage are not on the grid");
  }
  std::vector<ProactiveEnergyService> services;
  double claimed = 0.0;
  for (const auto& stay : extract_stays(*provider.mobility)) {
    const double surplus = compute_surplus(*provider.usage, stay.interval, provider.reserve_percent);
    const double movable = provider.device.power_w * stay.length() * grid.slot_hours();
    const double dec = std::min(surplus - claimed, movable);
    if (dec <= kTiny) continue;
    claimed += dec;

    ProactiveEnergyService s;
    s.id = ServiceId{first_id.value() + static_cast<std::int64_t>(services.size())};
    s.provider = provider.id;
    s.functionalities = {"wireless-charging"};
    s.qos.location = stay.cell;
    s.qos.start = stay.interval.begin;
    s.qos.end = stay.interval.end;
    s.qos.deliverable_capacity_wh = dec;
    s.qos.intensity_w = provider.device.power_w;
    s.qos.transmission_success_rate = provider.device.tsr;
    s.qos.reliability = provider.device.reliability;
    s.mobility = provider.mobility;
    s.usage = provider.usage;
    services.push_back(std::move(s));
  }
  return services;
}

// ---------------------------------------------------------------------------
// Consumer planning
// ---------------------------------------------------------------------------

std::vector<StayOption> stay_options(const Flexibility& flexibility, std::size_t k, const TimeGrid& grid) {
  const Stay& nominal = flexibility.availability.at(k);
  const Slot limit = k + 1 < flexibility.size() ? flexibility.availability[k + 1].interval.begin : grid.horizon;

  std::vector<CellId> cells{nominal.cell};
  if (flexibility.is_changeable(k)) {
    if (auto it = flexibility.alternatives.find(k); it != flexibility.alternatives.end()) {
      for (CellId c : it->second) {
        if (c != kOutside && std::find(cells.begin(), cells.end(), c) == cells.end()) cells.push_back(c);
      }
    }
  }
  std::vector<int> lengths{nominal.length()};
  if (flexibility.is_stretchable(k)) {
    if (auto it = flexibility.stretch_bounds.find(k); it != flexibility.stretch_bounds.end()) {
      for (int len = std::max(1, it->second.min_slots); len <= it->second.max_slots; ++len) {
        if (len != nominal.length()) lengths.push_back(len);
      }
    }
  }

  std::vector<StayOption> options;
  for (CellId c : cells) {
    for (int len : lengths) {
      const SlotRange interval{nominal.interval.begin, nominal.interval.begin + len};
      if (interval.end > limit) continue;
      options.push_back({c, interval, c != nominal.cell || len != nominal.length()});
    }
  }
  return options;
}

namespace {

// Earliest-first fill: the stay takes as much of the outstanding deficit as it can.
double fill(double& planned, double deficit, double intake) {
  const double room = deficit - planned;
  if (room <= 0.0) return 0.0;
  if (intake >= room) {
    planned = deficit;
    return room;
  }
  planned += intake;
  return intake;
}

struct Label {
  double energy = 0.0;
  int mods = 0;
  double acquisition = 0.0;
  std::vector<std::size_t> choice;
  std::vector<std::int64_t> cells;
};

bool better(const Label& a, const Label& b) {
  if (a.energy != b.energy) return a.energy > b.energy;
  if (a.mods != b.mods) return a.mods < b.mods;
  if (a.acquisition != b.acquisition) return a.acquisition < b.acquisition;
  return a.cells < b.cells;
}

// `a` is at least as good as `b` under every completion of the remaining stays.
bool dominates(const Label& a, const Label& b) {
  if (a.energy < b.energy || a.mods > b.mods || a.acquisition > b.acquisition) return false;
  return a.mods < b.mods || a.acquisition < b.acquisition || a.cells <= b.cells;
}

void prune(std::vector<Label>& labels) {
  std::sort(labels.begin(), labels.end(), better);
  std::vector<Label> kept;
  for (auto& label : labels) {
    const bool dominated =
        std::any_of(kept.begin(), kept.end(), [&](const Label& k) { return dominates(k, label); });
    if (!dominated) kept.push_back(std::move(label));
  }
  labels = std::move(kept);
}

}  // namespace

ConsumerPlan plan_consumer(const ConsumerProfile& consumer, const MobilityGraph& graph, double threshold_percent,
                           RequestId first_id) {
  if (!consumer.usage) throw std::invalid_argument("consumer without usage behavior");
  const auto& flex = consumer.flexibility;
  const TimeGrid& grid = graph.grid();

  ConsumerPlan plan;
  plan.consumer = consumer.id;
  plan.stays = flex.availability;
  plan.deficit_wh = compute_deficit(*consumer.usage, threshold_percent);
  if (plan.deficit_wh <= kTiny || flex.size() == 0) return plan;

  std::vector<std::vector<StayOption>> options(flex.size());
  std::vector<std::vector<double>> intake(flex.size());
  for (std::size_t k = 0; k < flex.size(); ++k) {
    options[k] = stay_options(flex, k, grid);
    for (const auto& o : options[k]) {
      intake[k].push_back(expected_intake(graph, o.cell, o.interval, consumer.device.max_intake_w));
    }
  }

  std::vector<Label> labels(1);
  for (std::size_t k = 0; k < flex.size(); ++k) {
    std::vector<Label> next;
    next.reserve(labels.size() * options[k].size());
    for (const auto& label : labels) {
      for (std::size_t o = 0; o < options[k].size(); ++o) {
        Label extended = label;
        const double re = fill(extended.energy, plan.deficit_wh, intake[k][o]);
        extended.acquisition += re * options[k][o].interval.begin;
        extended.mods += options[k][o].modified ? 1 : 0;
        extended.choice.push_back(o);
        extended.cells.push_back(options[k][o].cell.value());
        next.push_back(std::move(extended));
      }
    }
    prune(next);
    labels = std::move(next);
  }
  const Label& best = labels.front();

  plan.expected_fulfillment_wh = best.energy;
  plan.modified_stays = best.mods;
  plan.acquisition_cost = best.acquisition;
  double planned = 0.0;
  for (std::size_t k = 0; k < flex.size(); ++k) {
    const StayOption& chosen = options[k][best.choice[k]];
    plan.stays[k] = Stay{chosen.cell, chosen.interval};
    const double re = fill(planned, plan.deficit_wh, intake[k][best.choice[k]]);
    if (re <= kTiny) continue;
    EnergyRequest r;
    r.id = RequestId{first_id.value() + static_cast<std::int64_t>(plan.requests.size())};
    r.consumer = consumer.id;
    r.issued_at = chosen.interval.begin;
    r.location = chosen.cell;
    r.required_energy_wh = re;
    r.max_intake_w = consumer.device.max_intake_w;
    r.duration_slots = chosen.interval.length();
    r.origin = RequestOrigin::kProactive;
    plan.requests.push_back(r);
  }
  return plan;
}

std::vector<EnergyRequest> generate_proactive_requests(const ConsumerProfile& consumer, const MobilityGraph& graph,
                                                       double threshold_percent, RequestId first_id) {
  return plan_consumer(consumer, graph, threshold_percent, first_id).requests;
}

// ---------------------------------------------------------------------------
// Spatio-temporal composition
// ---------------------------------------------------------------------------

double delivered_per_slot(const ProactiveEnergyService& service, const EnergyRequest& request,
                          const TimeGrid& grid) {
  return std::min(service.qos.intensity_w, request.max_intake_w) * grid.slot_hours() *
         service.qos.transmission_success_rate;
}

namespace {

struct Candidate {
  std::size_t service = 0;  // index into the caller's span
  SlotRange overlap;
  double per_slot = 0.0;    // delivered in one full slot
  double capacity = 0.0;    // delivered before the DEC runs out
  double deliverable = 0.0;
};

// One slot's worth of delivery from a candidate.
struct Unit {
  std::size_t candidate = 0;  // rank in the candidate order
  double value = 0.0;
};

// Earliest-deadline matching of units to slots; true when every unit gets its own slot.
bool schedulable(const std::vector<Unit>& units, const std::vector<Candidate>& candidates, SlotRange window,
                 std::vector<std::pair<Slot, std::size_t>>* assignment = nullptr) {
  std::vector<std::size_t> order(units.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return candidates[units[a].candidate].overlap.begin < candidates[units[b].candidate].overlap.begin;
  });
  using Entry = std::pair<Slot, std::size_t>;  // (deadline, unit index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> ready;
  std::size_t next = 0;
  for (Slot t = window.begin; t < window.end; ++t) {
    while (next < order.size() && candidates[units[order[next]].candidate].overlap.begin <= t) {
      ready.emplace(candidates[units[order[next]].candidate].overlap.end, order[next]);
      ++next;
    }
    if (ready.empty()) continue;
    if (ready.top().first <= t) return false;
    if (assignment) assignment->emplace_back(t, ready.top().second);
    ready.pop();
  }
  return ready.empty() && next == order.size();
}

}  // namespace

CompositionResult compose_spatiotemporal(const EnergyRequest& request,
                                         std::span<const ProactiveEnergyService> services,
                                         std::span<const double> remaining_dec_wh, const TimeGrid& grid) {
  if (!remaining_dec_wh.empty() && remaining_dec_wh.size() != services.size()) {
    throw std::invalid_argument("remaining DEC is not aligned with the services");
  }
  CompositionResult result;
  result.request = request.id;
  const SlotRange window = request.window();
  const double need = request.required_energy_wh;

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < services.size(); ++i) {
    const auto& s = services[i];
    if (s.qos.location != request.location) continue;
    const SlotRange overlap{std::max(s.qos.start, window.begin), std::min(s.qos.end, window.end)};
    if (overlap.empty()) continue;
    const double dec = remaining_dec_wh.empty() ? s.qos.deliverable_capacity_wh : remaining_dec_wh[i];
    Candidate c;
    c.service = i;
    c.overlap = overlap;
    c.per_slot = delivered_per_slot(s, request, grid);
    c.capacity = std::max(0.0, dec) * s.qos.transmission_success_rate;
    c.deliverable = std::min(c.capacity, c.per_slot * overlap.length());
    if (c.deliverable <= kTiny) continue;
    candidates.push_back(c);
  }
  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.deliverable != b.deliverable) return a.deliverable > b.deliverable;
    const double ta = services[a.service].qos.transmission_success_rate;
    const double tb = services[b.service].qos.transmission_success_rate;
    if (ta != tb) return ta > tb;
    return services[a.service].id < services[b.service].id;
  });

  std::vector<Unit> units;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double left = candidates[c].capacity;
    for (int j = 0; j < candidates[c].overlap.length() && left > kTiny; ++j) {
      const double v = std::min(candidates[c].per_slot, left);
      units.push_back({c, v});
      left -= v;
    }
  }
  std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.value > b.value; });

  std::vector<Unit> chosen;
  double total = 0.0;
  for (const auto& unit : units) {
    if (total >= need || static_cast<int>(chosen.size()) >= window.length()) break;
    chosen.push_back(unit);
    if (schedulable(chosen, candidates, window)) {
      total += unit.value;
    } else {
      chosen.pop_back();
    }
  }

  std::vector<std::pair<Slot, std::size_t>> assignment;
  schedulable(chosen, candidates, window, &assignment);
  std::vector<double> left(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) left[c] = candidates[c].capacity;
  for (const auto& [slot, u] : assignment) {
    const std::size_t c = chosen[u].candidate;
    const double amount = std::min({candidates[c].per_slot, left[c], need - result.total_delivered_wh});
    if (amount <= 0.0) continue;
    left[c] -= amount;
    result.allocations.push_back({services[candidates[c].service].id, slot, amount});
    result.total_delivered_wh += amount;
  }
  result.fulfilled = result.total_delivered_wh >= need - 1e-9;
  return result;
}

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

std::optional<EnergyRequest> compose_reactive(const ConsumerSnapshot& state, double threshold_percent) {
  if (!state.armed || state.has_active_request || state.location == kOutside) return std::nullopt;
  if (!(state.soc < threshold_percent) || state.usage == nullptr) return std::nullopt;
  const Slot last = static_cast<Slot>(state.usage->soc.size()) - 1;
  const auto forecast = forecast_soc(*state.usage, state.slot, state.soc, std::max(state.slot, last));
  const double needed = compute_deficit(forecast, state.device.capacity_wh, threshold_percent);
  if (needed <= kTiny) return std::nullopt;

  EnergyRequest r;
  r.id = state.next_id;
  r.consumer = state.consumer;
  r.issued_at = state.slot;
  r.location = state.location;
  r.required_energy_wh = needed;
  r.max_intake_w = state.device.max_intake_w;
  r.duration_slots = std::max(1, state.remaining_stay_slots);
  r.origin = RequestOrigin::kReactive;
  return r;
}

std::optional<EnergyRequest> bruteforce_request(const ConsumerProfile& consumer, std::size_t k,
                                                double outstanding_wh, RequestId id) {
  if (outstanding_wh <= 1e-9 || k >= consumer.flexibility.size()) return std::nullopt;
  const Stay& stay = consumer.flexibility.availability[k];
  EnergyRequest r;
  r.id = id;
  r.consumer = consumer.id;
  r.issued_at = stay.interval.begin;
  r.location = stay.cell;
  r.required_energy_wh = outstanding_wh;
  r.max_intake_w = consumer.device.max_intake_w;
  r.duration_slots = stay.length();
  r.origin = RequestOrigin::kBruteForce;
  return r;
}

std::vector<EnergyRequest> compose_bruteforce(const ConsumerProfile& consumer, const TimeGrid& grid,
                                              double threshold_percent, RequestId first_id,
                                              std::span<const double> receipts_wh) {
  (void)grid;
  if (!consumer.usage) throw std::invalid_argument("consumer without usage behavior");
  std::vector<EnergyRequest> out;
  double outstanding = compute_deficit(*consumer.usage, threshold_percent);
  for (std::size_t k = 0; k < consumer.flexibility.size(); ++k) {
    if (k > 0 && k - 1 < receipts_wh.size()) outstanding -= receipts_wh[k - 1];
    const RequestId id{first_id.value() + static_cast<std::int64_t>(out.size())};
    if (auto r = bruteforce_request(consumer, k, outstanding, id)) out.push_back(*r);
  }
  return out;
}

}  // namespace crowdcharge
