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

// JSON mapping for the model types. Readers are strict: an unknown key is a
// FormatError naming the key.

#include <initializer_list>
#include <string_view>

#include "crowdcharge/model.hpp"
#include "json.hpp"

namespace crowdcharge {

using json = nlohmann::json;

/// Throws FormatError if `object` is not an object or carries a key outside `allowed`.
void expect_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view context);

template <typename Tag>
void to_json(json& j, const StrongId<Tag>& id) {
  j = id.value();
}
template <typename Tag>
void from_json(const json& j, StrongId<Tag>& id) {
  id = StrongId<Tag>(j.get<std::int64_t>());
}

void to_json(json& j, const TimeGrid& grid);
void from_json(const json& j, TimeGrid& grid);
void to_json(json& j, const SlotRange& range);
void from_json(const json& j, SlotRange& range);
void to_json(json& j, const Microcell& cell);
void from_json(const json& j, Microcell& cell);
void to_json(json& j, const Stay& stay);
void from_json(const json& j, Stay& stay);
void to_json(json& j, const MobilityPattern& pattern);
void from_json(const json& j, MobilityPattern& pattern);
void to_json(json& j, const UsageBehavior& usage);
void from_json(const json& j, UsageBehavior& usage);
void to_json(json& j, const StretchBounds& bounds);
void from_json(const json& j, StretchBounds& bounds);
void to_json(json& j, const Flexibility& flexibility);
void from_json(const json& j, Flexibility& flexibility);
void to_json(json& j, const QoS& qos);
void from_json(const json& j, QoS& qos);
void to_json(json& j, const ProactiveEnergyService& service);
void from_json(const json& j, ProactiveEnergyService& service);
void to_json(json& j, const EnergyRequest& request);
void from_json(const json& j, EnergyRequest& request);

}  // namespace crowdcharge
