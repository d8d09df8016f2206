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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crowdcharge {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for every data-level failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class UnknownNodeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string what, std::vector<std::string> violations)
      : Error(std::move(what)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Broken precondition inside the engine: a bug, not bad data.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// Identifiers
// ---------------------------------------------------------------------------

template <typename Tag>
class StrongId {
 public:
  constexpr StrongId() = default;
  constexpr explicit StrongId(std::int64_t value) : value_(value) {}

  constexpr std::int64_t value() const { return value_; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(value_); }

  friend constexpr auto operator<=>(StrongId, StrongId) = default;

 private:
  std::int64_t value_ = -1;
};

using CellId = StrongId<struct CellTag>;
using UserId = StrongId<struct UserTag>;
using ServiceId = StrongId<struct ServiceTag>;
using RequestId = StrongId<struct RequestTag>;

/// Virtual location for a user who is in no microcell.
inline constexpr CellId kOutside{-1};

using Slot = int;

// ---------------------------------------------------------------------------
// Time
// ---------------------------------------------------------------------------

struct TimeGrid {
  int slot_minutes = 5;
  int horizon = 288;

  double slot_hours() const { return slot_minutes / 60.0; }
  bool contains(Slot s) const { return s >= 0 && s < horizon; }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Slot index of a wall-clock time. Throws std::invalid_argument outside [00:00, 24:00).
Slot slot_of(int hours, int minutes, const TimeGrid& grid = {});

/// Half-open slot interval [begin, end).
struct SlotRange {
  Slot begin = 0;
  Slot end = 0;

  int length() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(Slot s) const { return s >= begin && s < end; }

  friend bool operator==(const SlotRange&, const SlotRange&) = default;
};

// ---------------------------------------------------------------------------
// Space
// ---------------------------------------------------------------------------

struct Microcell {
  CellId id;
  std::string label;
  double x_m = 0.0;
  double y_m = 0.0;
  double radius_m = 5.0;

  friend bool operator==(const Microcell&, const Microcell&) = default;
};

/// A maximal visit of one microcell.
struct Stay {
  CellId cell;
  SlotRange interval;

  int length() const { return interval.length(); }

  friend bool operator==(const Stay&, const Stay&) = default;
};

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// Per-slot presence distribution over the microcells plus OUTSIDE.
///
/// Stored row-major as horizon x (cell_count + 1); the last column of each row
/// is the OUTSIDE probability.
struct MobilityPattern {
  UserId owner;
  std::size_t cell_count = 0;
  std::vector<double> theta;

  int horizon() const {
    return cell_count + 1 == 0 ? 0 : static_cast<int>(theta.size() / (cell_count + 1));
  }
  std::size_t columns() const { return cell_count + 1; }
  std::size_t column(CellId cell) const { return cell == kOutside ? cell_count : cell.index(); }

  double at(Slot slot, CellId cell) const { return theta[static_cast<std::size_t>(slot) * columns() + column(cell)]; }
  std::span<const double> row(Slot slot) const {
    return {theta.data() + static_cast<std::size_t>(slot) * columns(), columns()};
  }

  friend bool operator==(const MobilityPattern&, const MobilityPattern&) = default;
};

/// Expected state of charge per slot, in percent.
struct UsageBehavior {
  UserId owner;
  std::vector<double> soc;
  double battery_capacity_wh = 0.0;

  friend bool operator==(const UsageBehavior&, const UsageBehavior&) = default;
};

struct StretchBounds {
  int min_slots = 0;
  int max_slots = 0;

  friend bool operator==(const StretchBounds&, const StretchBounds&) = default;
};

/// Per-stay tolerance of a consumer to change venue or stay length.
struct Flexibility {
  std::vector<Stay> availability;
  std::vector<std::uint8_t> changeable;
  std::vector<std::uint8_t> stretchable;
  std::map<std::size_t, std::vector<CellId>> alternatives;
  std::map<std::size_t, StretchBounds> stretch_bounds;

  std::size_t size() const { return availability.size(); }
  bool is_changeable(std::size_t k) const { return k < changeable.size() && changeable[k] != 0; }
  bool is_stretchable(std::size_t k) const { return k < stretchable.size() && stretchable[k] != 0; }
  bool is_rigid(std::size_t k) const { return !is_changeable(k) && !is_stretchable(k); }

  friend bool operator==(const Flexibility&, const Flexibility&) = default;
};

// ---------------------------------------------------------------------------
// Services and requests
// ---------------------------------------------------------------------------

struct QoS {
  CellId location;
  double range_m = 5.0;
  Slot start = 0;
  Slot end = 0;
  double deliverable_capacity_wh = 0.0;  // source side, before transmission loss
  double intensity_w = 0.0;
  double transmission_success_rate = 1.0;
  double reliability = 1.0;

  SlotRange window() const { return {start, end}; }

  friend bool operator==(const QoS&, const QoS&) = default;
};

struct ProactiveEnergyService {
  ServiceId id;
  UserId provider;
  std::set<std::string> functionalities;
  QoS qos;
  std::shared_ptr<const MobilityPattern> mobility;
  std::shared_ptr<const UsageBehavior> usage;
};

/// Value equality; pattern references compare by content.
bool operator==(const ProactiveEnergyService& a, const ProactiveEnergyService& b);

enum class RequestOrigin { kReactive, kProactive, kBruteForce };

std::string to_string(RequestOrigin origin);
RequestOrigin origin_from_string(const std::string& text);

struct EnergyRequest {
  RequestId id;
  UserId consumer;
  Slot issued_at = 0;
  CellId location;
  double required_energy_wh = 0.0;
  double max_intake_w = 0.0;
  int duration_slots = 0;
  RequestOrigin origin = RequestOrigin::kReactive;

  SlotRange window() const { return {issued_at, issued_at + duration_slots}; }

  friend bool operator==(const EnergyRequest&, const EnergyRequest&) = default;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

using Violations = std::vector<std::string>;

Violations validate(const TimeGrid& grid);
Violations validate(const Microcell& cell);
Violations validate(const MobilityPattern& pattern);
Violations validate(const UsageBehavior& usage);
Violations validate(const Flexibility& flexibility);
Violations validate(const QoS& qos);
Violations validate(const ProactiveEnergyService& service);
Violations validate(const EnergyRequest& request);

}  // namespace crowdcharge

template <typename Tag>
struct std::hash<crowdcharge::StrongId<Tag>> {
  std::size_t operator()(crowdcharge::StrongId<Tag> id) const noexcept {
    return std::hash<std::int64_t>{}(id.value());
  }
};
