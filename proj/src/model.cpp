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

#include "crowdcharge/model.hpp"

#include <cmath>

namespace crowdcharge {

Slot slot_of(int hours, int minutes, const TimeGrid& grid) {
  const int since_midnight = hours * 60 + minutes;
  if (hours < 0 || minutes < 0 || minutes >= 60 || since_midnight >= grid.horizon * grid.slot_minutes) {
    throw std::invalid_argument("clock time outside of one day: " + std::to_string(hours) + ":" +
                                std::to_string(minutes));
  }
  return since_midnight / grid.slot_minutes;
}

bool operator==(const ProactiveEnergyService& a, const ProactiveEnergyService& b) {
  auto same = [](const auto& x, const auto& y) { return x == y || (x && y && *x == *y); };
  return a.id == b.id && a.provider == b.provider && a.functionalities == b.functionalities && a.qos == b.qos &&
         same(a.mobility, b.mobility) && same(a.usage, b.usage);
}

std::string to_string(RequestOrigin origin) {
  switch (origin) {
    case RequestOrigin::kReactive:
      return "reactive";
    case RequestOrigin::kProactive:
      return "proactive";
    case RequestOrigin::kBruteForce:
      return "bruteforce";
  }
  return "unknown";
}

RequestOrigin origin_from_string(const std::string& text) {
  if (text == "reactive") return RequestOrigin::kReactive;
  if (text == "proactive") return RequestOrigin::kProactive;
  if (text == "bruteforce") return RequestOrigin::kBruteForce;
  throw FormatError("unknown request origin '" + text + "'");
}

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

Violations validate(const TimeGrid& grid) {
  Violations out;
  if (grid.slot_minutes <= 0) out.push_back("slot_minutes > 0 violated");
  if (grid.horizon <= 0) out.push_back("horizon > 0 violated");
  if (grid.slot_minutes * grid.horizon != 24 * 60) out.push_back("slot_duration x horizon = 24 hours violated");
  return out;
}

Violations validate(const Microcell& cell) {
  Violations out;
  if (cell.id.value() < 0) out.push_back("microcell id >= 0 violated");
  if (!(cell.radius_m > 0.0)) out.push_back("radius > 0 violated");
  return out;
}

Violations validate(const MobilityPattern& pattern) {
  Violations out;
  const std::size_t cols = pattern.columns();
  if (pattern.theta.size() % cols != 0) {
    out.push_back("theta size is a multiple of (microcells + 1) violated");
    return out;
  }
  for (int s = 0; s < pattern.horizon(); ++s) {
    double sum = 0.0;
    for (double p : pattern.row(s)) {
      if (!in_unit(p)) {
        out.push_back("theta entry in [0,1] violated at slot " + std::to_string(s));
        break;
      }
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) out.push_back("theta row sums to 1 violated at slot " + std::to_string(s));
  }
  return out;
}

Violations validate(const UsageBehavior& usage) {
  Violations out;
  for (std::size_t s = 0; s < usage.soc.size(); ++s) {
    if (!(usage.soc[s] >= 0.0 && usage.soc[s] <= 100.0)) {
      out.push_back("soc entry in [0,100] violated at slot " + std::to_string(s));
      break;
    }
  }
  if (!(usage.battery_capacity_wh > 0.0)) out.push_back("battery_capacity > 0 violated");
  return out;
}

Violations validate(const Flexibility& flexibility) {
  Violations out;
  const std::size_t n = flexibility.availability.size();
  if (flexibility.changeable.size() != n || flexibility.stretchable.size() != n) {
    out.push_back("|changeable| = |stretchable| = |availability| violated");
    return out;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (flexibility.changeable[k] > 1 || flexibility.stretchable[k] > 1) {
      out.push_back("Ch, Sr entries in {0,1} violated at stay " + std::to_string(k));
    }
    if (flexibility.changeable[k] == 1) {
      auto it = flexibility.alternatives.find(k);
      if (it == flexibility.alternatives.end() || it->second.empty()) {
        out.push_back("changeable stay has nonempty alternatives violated at stay " + std::to_string(k));
      }
    }
    if (flexibility.stretchable[k] == 1) {
      auto it = flexibility.stretch_bounds.find(k);
      const int nominal = flexibility.availability[k].length();
      if (it == flexibility.stretch_bounds.end() || it->second.min_slots > nominal ||
          it->second.max_slots < nominal || it->second.min_slots < 1) {
        out.push_back("min_slots <= nominal stay length <= max_slots violated at stay " + std::to_string(k));
      }
    }
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (flexibility.availability[k].interval.begin < flexibility.availability[k - 1].interval.end) {
      out.push_back("stays time-ordered and non-overlapping violated at stay " + std::to_string(k));
    }
  }
  return out;
}

Violations validate(const QoS& qos) {
  Violations out;
  if (!(qos.start < qos.end)) out.push_back("start < end violated");
  if (!(qos.deliverable_capacity_wh >= 0.0)) out.push_back("deliverable_capacity >= 0 violated");
  if (!(qos.intensity_w > 0.0)) out.push_back("intensity > 0 violated");
  if (!in_unit(qos.transmission_success_rate)) out.push_back("Tsr in [0,1] violated");
  if (!in_unit(qos.reliability)) out.push_back("Rel in [0,1] violated");
  return out;
}

Violations validate(const ProactiveEnergyService& service) {
  Violations out = validate(service.qos);
  if (service.id.value() < 0) out.push_back("service_id >= 0 violated");
  if (service.qos.location == kOutside) out.push_back("service location is a microcell violated");
  return out;
}

Violations validate(const EnergyRequest& request) {
  Violations out;
  if (!(request.required_energy_wh > 0.0)) out.push_back("required_energy > 0 violated");
  if (!(request.max_intake_w > 0.0)) out.push_back("max_intake > 0 violated");
  if (request.duration_slots < 1) out.push_back("duration >= 1 violated");
  return out;
}

}  // namespace crowdcharge
