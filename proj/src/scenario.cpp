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

#include "crowdcharge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "crowdcharge/random.hpp"

namespace crowdcharge {

std::string to_string(Role role) { return role == Role::kProvider ? "provider" : "consumer"; }

std::vector<StayAnnotation> FlexibilityMarks::annotations() const {
  std::vector<StayAnnotation> out(changeable.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].changeable = changeable[k] != 0;
    out[k].stretchable = k < stretchable.size() && stretchable[k] != 0;
    if (auto it = alternatives.find(k); it != alternatives.end()) out[k].alternatives = it->second;
    if (auto it = stretch_bounds.find(k); it != stretch_bounds.end()) out[k].bounds = it->second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

Violations validate(const Scenario& scenario) {
  Violations out = validate(scenario.grid);
  const auto cells = scenario.microcells.size();
  for (std::size_t i = 0; i < cells; ++i) {
    const auto& cell = scenario.microcells[i];
    for (auto& v : validate(cell)) out.push_back("microcell " + std::to_string(i) + ": " + v);
    if (cell.id.value() != static_cast<std::int64_t>(i)) {
      out.push_back("microcell ids unique and dense violated at position " + std::to_string(i));
    }
  }
  const auto horizon = static_cast<std::size_t>(scenario.grid.horizon);
  for (std::size_t u = 0; u < scenario.users.size(); ++u) {
    const auto& user = scenario.users[u];
    const std::string where = "user " + std::to_string(u) + ": ";
    if (user.id.value() != static_cast<std::int64_t>(u)) out.push_back(where + "user ids dense violated");
    if (!(user.device.capacity_wh > 0.0)) out.push_back(where + "capacity_wh > 0 violated");
    if (!(user.device.power_w > 0.0)) out.push_back(where + "power_w > 0 violated");
    if (!(user.device.max_intake_w > 0.0)) out.push_back(where + "ci_w > 0 violated");
    if (!(user.device.tsr >= 0.0 && user.device.tsr <= 1.0)) out.push_back(where + "tsr in [0,1] violated");
    if (!(user.device.reliability >= 0.0 && user.device.reliability <= 1.0)) {
      out.push_back(where + "rel in [0,1] violated");
    }
    if (user.history.empty()) out.push_back(where + "history nonempty violated");
    for (const auto& trace : user.history) {
      if (trace.owner != user.id) out.push_back(where + "trace owner matches user violated");
      for (auto& v : validate(trace, scenario.grid)) out.push_back(where + "day " + std::to_string(trace.day) + ": " + v);
      if (trace.locations.size() != horizon) continue;
      for (CellId c : trace.locations) {
        if (c != kOutside && (c.value() < 0 || c.index() >= cells)) {
          out.push_back(where + "trace location is a known microcell violated");
          break;
        }
      }
    }
    const auto& f = user.flexibility;
    if (f.changeable.size() != f.stretchable.size()) out.push_back(where + "|changeable| = |stretchable| violated");
    for (const auto& [k, alts] : f.alternatives) {
      for (CellId c : alts) {
        if (c.value() < 0 || c.index() >= cells) out.push_back(where + "alternative is a known microcell violated");
      }
    }
  }
  return out;
}

Violations validate(const ScenarioConfig& c) {
  Violations out;
  auto ordered = [&](const Range& r, const char* name, double floor) {
    if (!(r.min <= r.max)) out.push_back(std::string(name) + " range well-ordered violated");
    if (!(r.min >= floor)) out.push_back(std::string(name) + " lower bound >= " + std::to_string(floor) + " violated");
  };
  if (c.microcells < 1) out.push_back("microcells >= 1 violated");
  if (c.users < 1) out.push_back("users >= 1 violated");
  if (!(c.provider_fraction >= 0.0 && c.provider_fraction <= 1.0)) out.push_back("provider_fraction in [0,1] violated");
  if (!(c.supply_demand_ratio >= 0.0)) out.push_back("supply_demand_ratio >= 0 violated");
  if (!(c.cell_radius_m > 0.0)) out.push_back("cell_radius_m > 0 violated");
  ordered(c.stay_minutes, "stay_minutes", 5.0);
  ordered(c.stays_per_day, "stays_per_day", 1.0);
  ordered(c.battery_capacity_wh, "battery_capacity_wh", 1e-9);
  ordered(c.device_power_w, "device_power_w", 1e-9);
  ordered(c.tsr_range, "tsr_range", 0.0);
  if (c.tsr_range.max > 1.0) out.push_back("tsr_range within [0,1] violated");
  ordered(c.consumer_drain_scale, "consumer_drain_scale", 0.0);
  ordered(c.provider_drain_scale, "provider_drain_scale", 0.0);
  ordered(c.consumer_low_soc, "consumer_low_soc", 2.0);
  if (c.consumer_low_soc.max > 98.0) out.push_back("consumer_low_soc within [2,98] violated");
  if (c.history_days < 1) out.push_back("history_days >= 1 violated");
  for (double p : {c.routine_adherence, c.changeable_probability, c.stretchable_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) {
      out.push_back("probabilities in [0,1] violated");
      break;
    }
  }
  if (c.max_stretch_slots < 0) out.push_back("max_stretch_slots >= 0 violated");
  if (!c.arrival_intensity.empty()) {
    if (c.arrival_intensity.size() != c.microcells) out.push_back("arrival_intensity has one row per microcell violated");
    for (const auto& row : c.arrival_intensity) {
      if (row.size() != 24 || std::any_of(row.begin(), row.end(), [](double v) { return !(v >= 0.0); })) {
        out.push_back("arrival_intensity rows are 24 nonnegative values violated");
        break;
      }
    }
  }
  if (!c.drain_curve.empty()) {
    if (c.drain_curve.size() != static_cast<std::size_t>(TimeGrid{}.horizon)) {
      out.push_back("drain_curve has one value per slot violated");
    }
    if (std::any_of(c.drain_curve.begin(), c.drain_curve.end(), [](double v) { return !(v >= 0.0); })) {
      out.push_back("drain_curve entries >= 0 violated");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

std::vector<std::vector<double>> default_arrival_intensity(std::size_t microcells) {
  // Venue check-ins per hour: breakfast, lunch and dinner bumps.
  static constexpr double kHourly[24] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.3, 0.6, 0.8, 0.9, 1.0,
                                         1.4, 1.2, 0.8, 0.8, 0.9, 1.1, 1.3, 1.2, 0.8, 0.5, 0.2, 0.05};
  std::vector<std::vector<double>> out(microcells, std::vector<double>(24, 0.0));
  for (std::size_t c = 0; c < microcells; ++c) {
    const double popularity = 1.0 / (1.0 + 0.25 * static_cast<double>(c));
    // Each venue peaks at its own hour between 09:00 and 20:00.
    const double peak = 9.0 + 11.0 * static_cast<double>(c) / static_cast<double>(std::max<std::size_t>(1, microcells));
    for (int h = 0; h < 24; ++h) {
      const double phase = 2.0 * std::numbers::pi * (h - peak) / 24.0;
      out[c][static_cast<std::size_t>(h)] = 10.0 * popularity * kHourly[h] * (1.0 + 0.6 * std::cos(phase));
    }
  }
  return out;
}

std::vector<double> default_drain_curve(const TimeGrid& grid) {
  std::vector<double> curve(static_cast<std::size_t>(grid.horizon));
  for (int s = 0; s < grid.horizon; ++s) {
    const double hour = s * grid.slot_minutes / 60.0;
    double per_slot = 0.02;                // idle overnight
    if (hour >= 7.0 && hour < 22.0) per_slot = 0.30;   // daytime use
    else if (hour >= 22.0) per_slot = 0.08;
    curve[static_cast<std::size_t>(s)] = per_slot;
  }
  return curve;
}

namespace {

enum Stream : std::uint64_t { kRoles = 1, kDevice, kRoutine, kDays, kSoc, kFlex };

constexpr double kThreshold = kDefaultThresholdPercent;
constexpr double kTopSoc = 98.0;   // leaves room for day-to-day jitter below 100
constexpr double kJitter = 2.0;    // +/- percent, per day

double round2(double x) { return std::round(x * 100.0) / 100.0; }

struct Layout {
  TimeGrid grid;
  std::vector<std::vector<double>> intensity;
  std::vector<double> drain;
};

Layout layout_of(const ScenarioConfig& config) {
  Layout l;
  l.intensity = config.arrival_intensity.empty() ? default_arrival_intensity(config.microcells)
                                                 : config.arrival_intensity;
  l.drain = config.drain_curve.empty() ? default_drain_curve(l.grid) : config.drain_curve;
  return l;
}

std::vector<Role> assign_roles(const ScenarioConfig& config) {
  std::vector<std::size_t> order(config.users);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(config.seed, kRoles));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
  }
  const auto providers =
      static_cast<std::size_t>(std::llround(config.provider_fraction * static_cast<double>(config.users)));
  std::vector<Role> roles(config.users, Role::kConsumer);
  for (std::size_t i = 0; i < providers && i < order.size(); ++i) roles[order[i]] = Role::kProvider;
  return roles;
}

std::size_t pick_cell(Rng& rng, const Layout& layout, int hour, CellId exclude) {
  std::vector<double> w(layout.intensity.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    w[c] = CellId{static_cast<std::int64_t>(c)} == exclude ? 0.0 : layout.intensity[c][static_cast<std::size_t>(hour)];
  }
  std::size_t c = rng.categorical(w);
  if (c >= w.size()) {
    // Nobody checks in anywhere at this hour: fall back to any other venue.
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = CellId{static_cast<std::int64_t>(i)} == exclude ? 0.0 : 1.0;
    c = rng.categorical(w);
  }
  return c < w.size() ? c : 0;
}

std::vector<Stay> make_routine(const ScenarioConfig& config, const Layout& layout, std::size_t user) {
  Rng rng(derive_seed(config.seed, kRoutine, user));
  const TimeGrid& grid = layout.grid;
  std::vector<double> hourly(24, 0.0);
  for (const auto& row : layout.intensity) {
    for (std::size_t h = 0; h < 24; ++h) hourly[h] += row[h];
  }
  const int count = rng.uniform_int(static_cast<int>(config.stays_per_day.min), static_cast<int>(config.stays_per_day.max));
  std::vector<Slot> checkins;
  for (int i = 0; i < count; ++i) {
    std::size_t hour = rng.categorical(hourly);
    if (hour >= 24) hour = 12;
    const int minute = rng.uniform_int(0, 59);
    checkins.push_back((static_cast<int>(hour) * 60 + minute) / grid.slot_minutes);
  }
  std::sort(checkins.begin(), checkins.end());

  std::vector<Stay> stays;
  Slot previous_end = -grid.horizon;
  CellId previous_cell = kOutside;
  for (Slot checkin : checkins) {
    const int gap = rng.uniform_int(1, 6);
    const double minutes = rng.uniform(config.stay_minutes.min, config.stay_minutes.max);
    const int length = std::max(1, static_cast<int>(std::lround(minutes / grid.slot_minutes)));
    const Slot begin = std::max(checkin, previous_end + gap);
    const int hour = std::min(23, begin * grid.slot_minutes / 60);
    const std::size_t cell = pick_cell(rng, layout, hour, previous_cell);
    if (begin >= grid.horizon - 1) continue;
    const Slot end = std::min(begin + length, grid.horizon);
    stays.push_back({CellId{static_cast<std::int64_t>(cell)}, {begin, end}});
    previous_end = end;
    previous_cell = stays.back().cell;
  }
  return stays;
}

std::vector<std::vector<CellId>> make_days(const ScenarioConfig& config, const Layout& layout,
                                           const std::vector<Stay>& routine, std::size_t user) {
  Rng rng(derive_seed(config.seed, kDays, user));
  std::vector<std::vector<CellId>> days;
  for (int d = 0; d < config.history_days; ++d) {
    std::vector<CellId> where(static_cast<std::size_t>(layout.grid.horizon), kOutside);
    for (const auto& stay : routine) {
      const double keep = rng.uniform();
      const double swap = rng.uniform();
      const int hour = std::min(23, stay.interval.begin * layout.grid.slot_minutes / 60);
      const auto other = CellId{static_cast<std::int64_t>(pick_cell(rng, layout, hour, stay.cell))};
      CellId cell = stay.cell;
      if (keep >= config.routine_adherence) cell = swap < 0.5 ? other : kOutside;
      for (Slot s = stay.interval.begin; s < stay.interval.end; ++s) where[static_cast<std::size_t>(s)] = cell;
    }
    days.push_back(std::move(where));
  }
  return days;
}

// Largest lambda with sum_i min(cap_i, lambda * w_i) == target (caps assumed to cover it).
std::vector<double> water_fill(const std::vector<double>& caps, const std::vector<double>& weights, double target) {
  std::vector<double> out(caps.size(), 0.0);
  if (target <= 0.0 || caps.empty()) return out;
  double hi = 0.0;
  for (std::size_t i = 0; i < caps.size(); ++i) hi = std::max(hi, caps[i] / weights[i]);
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    double sum = 0.0;
    for (std::size_t i = 0; i < caps.size(); ++i) sum += std::min(caps[i], mid * weights[i]);
    (sum < target ? lo : hi) = mid;
  }
  for (std::size_t i = 0; i < caps.size(); ++i) out[i] = std::min(caps[i], hi * weights[i]);
  return out;
}

}  // namespace

std::vector<std::vector<Stay>> routine_stays(const ScenarioConfig& config) {
  if (auto v = validate(config); !v.empty()) throw ConfigError("invalid scenario config: " + v.front());
  const Layout layout = layout_of(config);
  std::vector<std::vector<Stay>> out;
  for (std::size_t u = 0; u < config.users; ++u) out.push_back(make_routine(config, layout, u));
  return out;
}

Scenario generate_scenario(const ScenarioConfig& config) {
  if (auto v = validate(config); !v.empty()) throw ConfigError("invalid scenario config: " + v.front());
  const Layout layout = layout_of(config);
  const TimeGrid& grid = layout.grid;
  const auto horizon = static_cast<std::size_t>(grid.horizon);

  Scenario scenario;
  {
    std::ostringstream id;
    id << "synthetic-seed" << config.seed << "-ratio" << config.supply_demand_ratio;
    scenario.id = id.str();
  }
  scenario.grid = grid;
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(config.microcells))));
  for (std::size_t c = 0; c < config.microcells; ++c) {
    Microcell cell;
    cell.id = CellId{static_cast<std::int64_t>(c)};
    cell.label = "venue-" + std::to_string(c);
    cell.x_m = static_cast<double>(c % side) * config.cell_spacing_m;
    cell.y_m = static_cast<double>(c / side) * config.cell_spacing_m;
    cell.radius_m = config.cell_radius_m;
    scenario.microcells.push_back(cell);
  }

  const auto roles = assign_roles(config);
  std::vector<double> cumulative(horizon, 0.0);
  for (std::size_t s = 1; s < horizon; ++s) cumulative[s] = cumulative[s - 1] + layout.drain[s - 1];

  struct Energy {
    double drain_scale = 1.0;
    double low = kThreshold;      // lowest SoC of the day, percent
    double weight = 1.0;          // provider share of the supply
    std::vector<double> offsets;  // per-day jitter, zero mean
  };
  std::vector<Energy> energy(config.users);
  double total_deficit = 0.0;
  std::vector<std::size_t> providers;
  for (std::size_t u = 0; u < config.users; ++u) {
    UserRecord user;
    user.id = UserId{static_cast<std::int64_t>(u)};
    user.role = roles[u];
    Rng dev(derive_seed(config.seed, kDevice, u));
    user.device.capacity_wh = dev.uniform(config.battery_capacity_wh.min, config.battery_capacity_wh.max);
    user.device.power_w = dev.uniform(config.device_power_w.min, config.device_power_w.max);
    user.device.max_intake_w = user.device.power_w;
    user.device.tsr = dev.uniform(config.tsr_range.min, config.tsr_range.max);
    user.device.reliability = dev.uniform(0.9, 1.0);

    Rng soc(derive_seed(config.seed, kSoc, u));
    auto& e = energy[u];
    const bool provider = roles[u] == Role::kProvider;
    const Range& scale = provider ? config.provider_drain_scale : config.consumer_drain_scale;
    e.drain_scale = soc.uniform(scale.min, scale.max);
    const double low = soc.uniform(config.consumer_low_soc.min, config.consumer_low_soc.max);
    e.weight = soc.uniform(0.5, 1.5);
    e.offsets.resize(static_cast<std::size_t>(config.history_days));
    for (double& o : e.offsets) o = soc.uniform(-kJitter, kJitter);
    const double mean = std::accumulate(e.offsets.begin(), e.offsets.end(), 0.0) / e.offsets.size();
    for (double& o : e.offsets) o -= mean;
    const double day_drain = e.drain_scale * cumulative.back();
    if (provider) {
      providers.push_back(u);
    } else {
      e.low = std::min(low, kTopSoc - day_drain);
      total_deficit += std::max(0.0, kThreshold - e.low) / 100.0 * user.device.capacity_wh;
    }
    scenario.users.push_back(std::move(user));
  }

  // Provider surplus is the only thing the ratio touches.
  const double target = config.supply_demand_ratio * total_deficit;
  if (target > 0.0 && providers.empty()) {
    throw ConfigError("supply_demand_ratio " + std::to_string(config.supply_demand_ratio) +
                      " is unreachable without providers");
  }
  std::vector<double> caps;
  std::vector<double> weights;
  for (std::size_t u : providers) {
    const double day_drain = energy[u].drain_scale * cumulative.back();
    caps.push_back(std::max(0.0, kTopSoc - day_drain - kThreshold) / 100.0 * scenario.users[u].device.capacity_wh);
    weights.push_back(energy[u].weight);
  }
  if (std::accumulate(caps.begin(), caps.end(), 0.0) < target * (1.0 + 1e-9)) {
    throw ConfigError("supply_demand_ratio " + std::to_string(config.supply_demand_ratio) +
                      " is unreachable: providers can cover at most " +
                      std::to_string(std::accumulate(caps.begin(), caps.end(), 0.0)) + " Wh of " +
                      std::to_string(target) + " Wh");
  }
  const auto surplus = water_fill(caps, weights, target);
  for (std::size_t i = 0; i < providers.size(); ++i) {
    const std::size_t u = providers[i];
    energy[u].low = kThreshold + surplus[i] / scenario.users[u].device.capacity_wh * 100.0;
  }

  for (std::size_t u = 0; u < config.users; ++u) {
    auto& user = scenario.users[u];
    const auto& e = energy[u];
    const double start = e.low + e.drain_scale * cumulative.back();
    const auto routine = make_routine(config, layout, u);
    auto days = make_days(config, layout, routine, u);
    for (int d = 0; d < config.history_days; ++d) {
      DailyTrace trace;
      trace.owner = user.id;
      trace.day = d;
      trace.locations = std::move(days[static_cast<std::size_t>(d)]);
      trace.soc.resize(horizon);
      for (std::size_t s = 0; s < horizon; ++s) {
        const double level = start - e.drain_scale * cumulative[s] + e.offsets[static_cast<std::size_t>(d)];
        trace.soc[s] = round2(std::clamp(level, 0.0, 100.0));
      }
      user.history.push_back(std::move(trace));
    }

    const auto pattern = estimate_mobility_pattern(user.history, grid, config.microcells);
    const auto stays = extract_stays(pattern);
    Rng flex(derive_seed(config.seed, kFlex, u));
    auto& marks = user.flexibility;
    for (std::size_t k = 0; k < stays.size(); ++k) {
      const bool ch = flex.bernoulli(config.changeable_probability) && config.microcells > 1;
      const bool sr = flex.bernoulli(config.stretchable_probability);
      const int alt_count = flex.uniform_int(1, 2);
      std::vector<CellId> alts;
      for (int a = 0; a < alt_count; ++a) {
        const auto c = CellId{flex.uniform_int(0, static_cast<int>(config.microcells) - 1)};
        if (c != stays[k].cell && std::find(alts.begin(), alts.end(), c) == alts.end()) alts.push_back(c);
      }
      const bool consumer = user.role == Role::kConsumer;
      const bool changeable = consumer && ch && !alts.empty();
      const bool stretchable = consumer && sr;
      marks.changeable.push_back(changeable ? 1 : 0);
      marks.stretchable.push_back(stretchable ? 1 : 0);
      if (changeable) {
        std::sort(alts.begin(), alts.end());
        marks.alternatives[k] = alts;
      }
      if (stretchable) {
        const Slot limit = k + 1 < stays.size() ? stays[k + 1].interval.begin : grid.horizon;
        const int length = stays[k].length();
        marks.stretch_bounds[k] = {std::max(1, length - config.max_stretch_slots),
                                   std::min(length + config.max_stretch_slots, limit - stays[k].interval.begin)};
      }
    }
  }
  return scenario;
}

double achieved_supply_demand_ratio(const Scenario& scenario, double reserve_percent, double threshold_percent) {
  double supply = 0.0;
  double demand = 0.0;
  for (const auto& user : scenario.users) {
    const auto usage = estimate_usage_behavior(user.history, user.device.capacity_wh);
    if (user.role == Role::kProvider) {
      supply += compute_surplus(usage, {0, scenario.grid.horizon}, reserve_percent);
    } else {
      demand += compute_deficit(usage, threshold_percent);
    }
  }
  if (demand <= 0.0) return supply > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return supply / demand;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    const auto last_newline = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const auto column = last_newline == std::string::npos ? upto + 1 : upto - last_newline;
    throw FormatError(origin + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
  }
}

namespace {

bool is_scalar_array(const json& j) {
  return j.is_array() && std::all_of(j.begin(), j.end(), [](const json& x) { return x.is_primitive(); });
}

void dump_into(std::string& out, const json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    bool first = true;
    for (const auto& item : j.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + json(item.key()).dump() + ": ";
      dump_into(out, item.value(), depth + 1);
    }
    out += "\n" + close_pad + "}";
  } else if (j.is_array() && !j.empty() && !is_scalar_array(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      dump_into(out, j[i], depth + 1);
    }
    out += "\n" + close_pad + "]";
  } else {
    out += j.dump();
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& context) {
  if (!j.contains(key)) throw FormatError(context + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const FormatError& e) {
    throw FormatError(context + "." + key + ": " + e.what());
  } catch (const json::exception& e) {
    throw FormatError(context + "." + key + ": " + e.what());
  }
}

json device_to_json(const DeviceProfile& d) {
  return json{{"capacity_wh", d.capacity_wh}, {"power_w", d.power_w}, {"ci_w", d.max_intake_w},
              {"tsr", d.tsr},                 {"rel", d.reliability}};
}

DeviceProfile device_from_json(const json& j, const std::string& context) {
  expect_keys(j, {"capacity_wh", "power_w", "ci_w", "tsr", "rel"}, context);
  DeviceProfile d;
  d.capacity_wh = field<double>(j, "capacity_wh", context);
  d.power_w = field<double>(j, "power_w", context);
  d.max_intake_w = field<double>(j, "ci_w", context);
  d.tsr = field<double>(j, "tsr", context);
  d.reliability = field<double>(j, "rel", context);
  return d;
}

json marks_to_json(const FlexibilityMarks& m) {
  json alts = json::object();
  for (const auto& [k, v] : m.alternatives) alts[std::to_string(k)] = v;
  json bounds = json::object();
  for (const auto& [k, v] : m.stretch_bounds) bounds[std::to_string(k)] = v;
  return json{{"changeable", m.changeable},
              {"stretchable", m.stretchable},
              {"alternatives", alts},
              {"stretch_bounds", bounds}};
}

std::size_t stay_index(const std::string& key, const std::string& context) {
  if (key.empty() || !std::all_of(key.begin(), key.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
    throw FormatError(context + ": key '" + key + "' is not a stay index");
  }
  return std::stoul(key);
}

FlexibilityMarks marks_from_json(const json& j, const std::string& context) {
  expect_keys(j, {"changeable", "stretchable", "alternatives", "stretch_bounds"}, context);
  FlexibilityMarks m;
  m.changeable = field<std::vector<std::uint8_t>>(j, "changeable", context);
  m.stretchable = field<std::vector<std::uint8_t>>(j, "stretchable", context);
  const auto alts = field<json>(j, "alternatives", context);
  if (!alts.is_object()) throw FormatError(context + ".alternatives: expected an object");
  for (const auto& item : alts.items()) {
    m.alternatives[stay_index(item.key(), context + ".alternatives")] =
        field<std::vector<CellId>>(alts, item.key().c_str(), context + ".alternatives");
  }
  const auto bounds = field<json>(j, "stretch_bounds", context);
  if (!bounds.is_object()) throw FormatError(context + ".stretch_bounds: expected an object");
  for (const auto& item : bounds.items()) {
    m.stretch_bounds[stay_index(item.key(), context + ".stretch_bounds")] =
        field<StretchBounds>(bounds, item.key().c_str(), context + ".stretch_bounds");
  }
  return m;
}

}  // namespace

std::string dump_json(const json& document) {
  std::string out;
  dump_into(out, document, 0);
  out += "\n";
  return out;
}

json scenario_to_json(const Scenario& scenario) {
  json users = json::array();
  for (const auto& user : scenario.users) {
    json history = json::array();
    for (const auto& trace : user.history) {
      history.push_back(json{{"day", trace.day}, {"locations", trace.locations}, {"soc", trace.soc}});
    }
    users.push_back(json{{"id", user.id},
                         {"role", to_string(user.role)},
                         {"device", device_to_json(user.device)},
                         {"history", history},
                         {"flexibility", marks_to_json(user.flexibility)}});
  }
  return json{{"version", kScenarioFormatVersion},
              {"id", scenario.id},
              {"grid", scenario.grid},
              {"microcells", scenario.microcells},
              {"users", users}};
}

Scenario scenario_from_json(const json& document) {
  expect_keys(document, {"version", "id", "grid", "microcells", "users"}, "scenario");
  const int version = field<int>(document, "version", "scenario");
  if (version != kScenarioFormatVersion) {
    throw FormatError("scenario: unsupported version " + std::to_string(version));
  }
  Scenario s;
  s.id = field<std::string>(document, "id", "scenario");
  s.grid = field<TimeGrid>(document, "grid", "scenario");
  const auto cells = field<json>(document, "microcells", "scenario");
  if (!cells.is_array()) throw FormatError("scenario.microcells: expected an array");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string context = "scenario.microcells[" + std::to_string(i) + "]";
    try {
      s.microcells.push_back(cells[i].get<Microcell>());
    } catch (const FormatError& e) {
      throw FormatError(context + ": " + e.what());
    } catch (const json::exception& e) {
      throw FormatError(context + ": " + e.what());
    }
  }
  const auto users = field<json>(document, "users", "scenario");
  if (!users.is_array()) throw FormatError("scenario.users: expected an array");
  for (std::size_t i = 0; i < users.size(); ++i) {
    const std::string context = "scenario.users[" + std::to_string(i) + "]";
    const json& j = users[i];
    expect_keys(j, {"id", "role", "device", "history", "flexibility"}, context);
    UserRecord user;
    user.id = field<UserId>(j, "id", context);
    const auto role = field<std::string>(j, "role", context);
    if (role == "provider") {
      user.role = Role::kProvider;
    } else if (role == "consumer") {
      user.role = Role::kConsumer;
    } else {
      throw FormatError(context + ".role: unknown role '" + role + "'");
    }
    user.device = device_from_json(field<json>(j, "device", context), context + ".device");
    const auto history = field<json>(j, "history", context);
    if (!history.is_array()) throw FormatError(context + ".history: expected an array");
    for (std::size_t d = 0; d < history.size(); ++d) {
      const std::string dc = context + ".history[" + std::to_string(d) + "]";
      expect_keys(history[d], {"day", "locations", "soc"}, dc);
      DailyTrace trace;
      trace.owner = user.id;
      trace.day = field<int>(history[d], "day", dc);
      trace.locations = field<std::vector<CellId>>(history[d], "locations", dc);
      trace.soc = field<std::vector<double>>(history[d], "soc", dc);
      user.history.push_back(std::move(trace));
    }
    user.flexibility = marks_from_json(field<json>(j, "flexibility", context), context + ".flexibility");
    s.users.push_back(std::move(user));
  }
  return s;
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << dump_json(scenario_to_json(scenario));
  if (!out) throw Error("failed writing " + path.string());
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  const auto document = parse_json_text(read_file(path), path.string());
  try {
    return scenario_from_json(document);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

namespace {

json range_to_json(const Range& r) { return json::array({r.min, r.max}); }

Range range_from_json(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError(context + ": expected [min, max]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json config_to_json(const ScenarioConfig& c) {
  return json{{"microcells", c.microcells},
              {"cell_spacing_m", c.cell_spacing_m},
              {"cell_radius_m", c.cell_radius_m},
              {"users", c.users},
              {"provider_fraction", c.provider_fraction},
              {"supply_demand_ratio", c.supply_demand_ratio},
              {"arrival_intensity", c.arrival_intensity},
              {"stay_minutes", range_to_json(c.stay_minutes)},
              {"stays_per_day", range_to_json(c.stays_per_day)},
              {"battery_capacity_wh", range_to_json(c.battery_capacity_wh)},
              {"device_power_w", range_to_json(c.device_power_w)},
              {"tsr_range", range_to_json(c.tsr_range)},
              {"drain_curve", c.drain_curve},
              {"consumer_drain_scale", range_to_json(c.consumer_drain_scale)},
              {"provider_drain_scale", range_to_json(c.provider_drain_scale)},
              {"consumer_low_soc", range_to_json(c.consumer_low_soc)},
              {"history_days", c.history_days},
              {"routine_adherence", c.routine_adherence},
              {"changeable_probability", c.changeable_probability},
              {"stretchable_probability", c.stretchable_probability},
              {"max_stretch_slots", c.max_stretch_slots},
              {"seed", c.seed}};
}

ScenarioConfig config_from_json(const json& j) {
  expect_keys(j,
              {"microcells", "cell_spacing_m", "cell_radius_m", "users", "provider_fraction", "supply_demand_ratio",
               "arrival_intensity", "stay_minutes", "stays_per_day", "battery_capacity_wh", "device_power_w",
               "tsr_range", "drain_curve", "consumer_drain_scale", "provider_drain_scale", "consumer_low_soc",
               "history_days", "routine_adherence", "changeable_probability", "stretchable_probability",
               "max_stretch_slots", "seed"},
              "config");
  ScenarioConfig c;
  const std::string ctx = "config";
  auto opt = [&](const char* key, auto& target) {
    if (j.contains(key)) target = field<std::decay_t<decltype(target)>>(j, key, ctx);
  };
  auto opt_range = [&](const char* key, Range& target) {
    if (j.contains(key)) target = range_from_json(j.at(key), ctx + "." + key);
  };
  opt("microcells", c.microcells);
  opt("cell_spacing_m", c.cell_spacing_m);
  opt("cell_radius_m", c.cell_radius_m);
  opt("users", c.users);
  opt("provider_fraction", c.provider_fraction);
  opt("supply_demand_ratio", c.supply_demand_ratio);
  opt("arrival_intensity", c.arrival_intensity);
  opt_range("stay_minutes", c.stay_minutes);
  opt_range("stays_per_day", c.stays_per_day);
  opt_range("battery_capacity_wh", c.battery_capacity_wh);
  opt_range("device_power_w", c.device_power_w);
  opt_range("tsr_range", c.tsr_range);
  opt("drain_curve", c.drain_curve);
  opt_range("consumer_drain_scale", c.consumer_drain_scale);
  opt_range("provider_drain_scale", c.provider_drain_scale);
  opt_range("consumer_low_soc", c.consumer_low_soc);
  opt("history_days", c.history_days);
  opt("routine_adherence", c.routine_adherence);
  opt("changeable_probability", c.changeable_probability);
  opt("stretchable_probability", c.stretchable_probability);
  opt("max_stretch_slots", c.max_stretch_slots);
  opt("seed", c.seed);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  const auto document = parse_json_text(read_file(path), path.string());
  return config_from_json(document);
}

}  // namespace crowdcharge
