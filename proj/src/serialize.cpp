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

#include "crowdcharge/serialize.hpp"

#include <algorithm>

namespace crowdcharge {

void expect_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!object.is_object()) throw FormatError(std::string(context) + ": expected an object");
  for (const auto& item : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw FormatError(std::string(context) + ": unknown field '" + item.key() + "'");
    }
  }
}

void to_json(json& j, const TimeGrid& grid) {
  j = json{{"slot_minutes", grid.slot_minutes}, {"horizon", grid.horizon}};
}
void from_json(const json& j, TimeGrid& grid) {
  expect_keys(j, {"slot_minutes", "horizon"}, "grid");
  j.at("slot_minutes").get_to(grid.slot_minutes);
  j.at("horizon").get_to(grid.horizon);
}

void to_json(json& j, const SlotRange& range) { j = json::array({range.begin, range.end}); }
void from_json(const json& j, SlotRange& range) {
  if (!j.is_array() || j.size() != 2) throw FormatError("slot range: expected [begin, end]");
  range.begin = j[0].get<Slot>();
  range.end = j[1].get<Slot>();
}

void to_json(json& j, const Microcell& cell) {
  j = json{{"id", cell.id}, {"label", cell.label}, {"x_m", cell.x_m}, {"y_m", cell.y_m}, {"radius_m", cell.radius_m}};
}
void from_json(const json& j, Microcell& cell) {
  expect_keys(j, {"id", "label", "x_m", "y_m", "radius_m"}, "microcell");
  j.at("id").get_to(cell.id);
  j.at("label").get_to(cell.label);
  j.at("x_m").get_to(cell.x_m);
  j.at("y_m").get_to(cell.y_m);
  j.at("radius_m").get_to(cell.radius_m);
}

void to_json(json& j, const Stay& stay) { j = json{{"cell", stay.cell}, {"interval", stay.interval}}; }
void from_json(const json& j, Stay& stay) {
  expect_keys(j, {"cell", "interval"}, "stay");
  j.at("cell").get_to(stay.cell);
  j.at("interval").get_to(stay.interval);
}

void to_json(json& j, const MobilityPattern& pattern) {
  j = json{{"owner", pattern.owner}, {"cell_count", pattern.cell_count}, {"theta", pattern.theta}};
}
void from_json(const json& j, MobilityPattern& pattern) {
  expect_keys(j, {"owner", "cell_count", "theta"}, "mobility pattern");
  j.at("owner").get_to(pattern.owner);
  j.at("cell_count").get_to(pattern.cell_count);
  j.at("theta").get_to(pattern.theta);
}

void to_json(json& j, const UsageBehavior& usage) {
  j = json{{"owner", usage.owner}, {"soc", usage.soc}, {"battery_capacity_wh", usage.battery_capacity_wh}};
}
void from_json(const json& j, UsageBehavior& usage) {
  expect_keys(j, {"owner", "soc", "battery_capacity_wh"}, "usage behavior");
  j.at("owner").get_to(usage.owner);
  j.at("soc").get_to(usage.soc);
  j.at("battery_capacity_wh").get_to(usage.battery_capacity_wh);
}

void to_json(json& j, const StretchBounds& bounds) { j = json::array({bounds.min_slots, bounds.max_slots}); }
void from_json(const json& j, StretchBounds& bounds) {
  if (!j.is_array() || j.size() != 2) throw FormatError("stretch bounds: expected [min_slots, max_slots]");
  bounds.min_slots = j[0].get<int>();
  bounds.max_slots = j[1].get<int>();
}

namespace {

// JSON object keys are strings; stay indices are written in decimal.
template <typename V>
json index_map_to_json(const std::map<std::size_t, V>& m) {
  json out = json::object();
  for (const auto& [k, v] : m) out[std::to_string(k)] = v;
  return out;
}

template <typename V>
std::map<std::size_t, V> index_map_from_json(const json& j, std::string_view context) {
  if (!j.is_object()) throw FormatError(std::string(context) + ": expected an object");
  std::map<std::size_t, V> out;
  for (const auto& item : j.items()) {
    std::size_t pos = 0;
    std::size_t index = 0;
    try {
      index = std::stoul(item.key(), &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.key().size()) {
      throw FormatError(std::string(context) + ": key '" + item.key() + "' is not a stay index");
    }
    out[index] = item.value().template get<V>();
  }
  return out;
}

}  // namespace

void to_json(json& j, const Flexibility& flexibility) {
  j = json{{"availability", flexibility.availability},
           {"changeable", flexibility.changeable},
           {"stretchable", flexibility.stretchable},
           {"alternatives", index_map_to_json(flexibility.alternatives)},
           {"stretch_bounds", index_map_to_json(flexibility.stretch_bounds)}};
}
void from_json(const json& j, Flexibility& flexibility) {
  expect_keys(j, {"availability", "changeable", "stretchable", "alternatives", "stretch_bounds"}, "flexibility");
  j.at("availability").get_to(flexibility.availability);
  j.at("changeable").get_to(flexibility.changeable);
  j.at("stretchable").get_to(flexibility.stretchable);
  flexibility.alternatives = index_map_from_json<std::vector<CellId>>(j.at("alternatives"), "alternatives");
  flexibility.stretch_bounds = index_map_from_json<StretchBounds>(j.at("stretch_bounds"), "stretch_bounds");
}

void to_json(json& j, const QoS& qos) {
  j = json{{"location", qos.location},
           {"range_m", qos.range_m},
           {"start", qos.start},
           {"end", qos.end},
           {"deliverable_capacity_wh", qos.deliverable_capacity_wh},
           {"intensity_w", qos.intensity_w},
           {"tsr", qos.transmission_success_rate},
           {"rel", qos.reliability}};
}
void from_json(const json& j, QoS& qos) {
  expect_keys(j, {"location", "range_m", "start", "end", "deliverable_capacity_wh", "intensity_w", "tsr", "rel"},
              "qos");
  j.at("location").get_to(qos.location);
  j.at("range_m").get_to(qos.range_m);
  j.at("start").get_to(qos.start);
  j.at("end").get_to(qos.end);
  j.at("deliverable_capacity_wh").get_to(qos.deliverable_capacity_wh);
  j.at("intensity_w").get_to(qos.intensity_w);
  j.at("tsr").get_to(qos.transmission_success_rate);
  j.at("rel").get_to(qos.reliability);
}

void to_json(json& j, const ProactiveEnergyService& service) {
  j = json{{"id", service.id},
           {"provider", service.provider},
           {"functionalities", service.functionalities},
           {"qos", service.qos},
           {"mobility", service.mobility ? json(*service.mobility) : json(nullptr)},
           {"usage", service.usage ? json(*service.usage) : json(nullptr)}};
}
void from_json(const json& j, ProactiveEnergyService& service) {
  expect_keys(j, {"id", "provider", "functionalities", "qos", "mobility", "usage"}, "service");
  j.at("id").get_to(service.id);
  j.at("provider").get_to(service.provider);
  j.at("functionalities").get_to(service.functionalities);
  j.at("qos").get_to(service.qos);
  const auto& m = j.at("mobility");
  service.mobility = m.is_null() ? nullptr : std::make_shared<const MobilityPattern>(m.get<MobilityPattern>());
  const auto& u = j.at("usage");
  service.usage = u.is_null() ? nullptr : std::make_shared<const UsageBehavior>(u.get<UsageBehavior>());
}

void to_json(json& j, const EnergyRequest& request) {
  j = json{{"id", request.id},
           {"consumer", request.consumer},
           {"issued_at", request.issued_at},
           {"location", request.location},
           {"required_energy_wh", request.required_energy_wh},
           {"max_intake_w", request.max_intake_w},
           {"duration_slots", request.duration_slots},
           {"origin", to_string(request.origin)}};
}
void from_json(const json& j, EnergyRequest& request) {
  expect_keys(j,
              {"id", "consumer", "issued_at", "location", "required_energy_wh", "max_intake_w", "duration_slots",
               "origin"},
              "request");
  j.at("id").get_to(request.id);
  j.at("consumer").get_to(request.consumer);
  j.at("issued_at").get_to(request.issued_at);
  j.at("location").get_to(request.location);
  j.at("required_energy_wh").get_to(request.required_energy_wh);
  j.at("max_intake_w").get_to(request.max_intake_w);
  j.at("duration_slots").get_to(request.duration_slots);
  request.origin = origin_from_string(j.at("origin").get<std::string>());
}

}  // namespace crowdcharge
