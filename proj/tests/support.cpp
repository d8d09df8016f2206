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

#include "support.hpp"

#include <algorithm>

namespace crowdcharge::testing {

std::vector<CellId> place(const std::vector<Stay>& stays, const TimeGrid& grid) {
  std::vector<CellId> out(static_cast<std::size_t>(grid.horizon), kOutside);
  for (const auto& s : stays) {
    for (Slot t = s.interval.begin; t < s.interval.end; ++t) out[static_cast<std::size_t>(t)] = s.cell;
  }
  return out;
}

std::vector<double> soc_curve(const std::vector<std::pair<Slot, double>>& knots, const TimeGrid& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.horizon));
  for (Slot t = 0; t < grid.horizon; ++t) {
    double v = knots.front().second;
    if (t >= knots.back().first) {
      v = knots.back().second;
    } else {
      for (std::size_t i = 1; i < knots.size(); ++i) {
        if (t < knots[i].first) {
          const auto [a, va] = knots[i - 1];
          const auto [b, vb] = knots[i];
          v = t <= a ? va : va + (vb - va) * (t - a) / static_cast<double>(b - a);
          break;
        }
      }
    }
    out[static_cast<std::size_t>(t)] = v;
  }
  return out;
}

UserRecord repeat_user(std::int64_t id, Role role, const DeviceProfile& device, const std::vector<Stay>& stays,
                       const std::vector<double>& soc, int days, const TimeGrid& grid) {
  UserRecord user;
  user.id = UserId{id};
  user.role = role;
  user.device = device;
  for (int d = 0; d < days; ++d) user.history.push_back({user.id, d, place(stays, grid), soc});
  return user;
}

Scenario bare_scenario(std::size_t cells, const TimeGrid& grid) {
  Scenario s;
  s.id = "fixture";
  s.grid = grid;
  for (std::size_t c = 0; c < cells; ++c) {
    s.microcells.push_back({CellId{static_cast<std::int64_t>(c)}, "cell-" + std::to_string(c), 40.0 * c, 0.0, 5.0});
  }
  return s;
}

MobilityPattern pattern_of(UserId owner, std::size_t cells, const std::vector<Stay>& stays, const TimeGrid& grid) {
  const std::vector<DailyTrace> history{{owner, 0, place(stays, grid), std::vector<double>(grid.horizon, 50.0)}};
  return estimate_mobility_pattern(history, grid, cells);
}

bool single_consumer(const Scenario& source, std::size_t pick, Scenario& out) {
  std::vector<const UserRecord*> needy;
  for (const auto& u : source.users) {
    if (u.role != Role::kConsumer) continue;
    const auto usage = estimate_usage_behavior(u.history, u.device.capacity_wh);
    if (compute_deficit(usage) > 1e-9) needy.push_back(&u);
  }
  if (pick >= needy.size()) return false;
  out = source;
  out.id = source.id + "-single-" + std::to_string(pick);
  out.users.clear();
  auto keep = [&](const UserRecord& u) {
    UserRecord copy = u;
    copy.id = UserId{static_cast<std::int64_t>(out.users.size())};
    for (auto& day : copy.history) day.owner = copy.id;
    copy.flexibility = {};
    out.users.push_back(std::move(copy));
  };
  for (const auto& u : source.users) {
    if (u.role == Role::kProvider) keep(u);
  }
  keep(*needy[pick]);
  return true;
}

}  // namespace crowdcharge::testing
