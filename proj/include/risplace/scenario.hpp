// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "risplace/beamform.hpp"
#include "risplace/channel.hpp"
#include "risplace/geom.hpp"

namespace risplace {

struct Hotspot {
  Cell region;
  double density{};  // users per m^2
  bool operator==(const Hotspot&) const = default;
};

/// Homogeneous PPP over one region.
struct HomogeneousUsers {
  double density{};
  Cell region;
  bool operator==(const HomogeneousUsers&) const = default;
};

/// Independent PPPs over disjoint-or-not circles; zero density elsewhere.
struct HotspotUsers {
  std::vector<Hotspot> hotspots;
  bool operator==(const HotspotUsers&) const = default;
};

using UserModel = std::variant<HomogeneousUsers, HotspotUsers>;

/// Expected number of users of one draw.
double expected_users(const UserModel& model);

struct PlacementConfig {
  int candidates = 40;       // T
  int instantiations = 50;   // accepted user draws per level
  double d_start = 2.0;      // m
  double d_p = 1.0;          // m
  std::optional<double> refine_radius;  // m; unset: the current quantization step
  double grid_resolution = 0.1;         // m
  bool operator==(const PlacementConfig&) const = default;
};

struct Scenario {
  std::string name;
  Point2 bs;
  Cell cell;
  std::vector<Obstacle> obstacles;
  UserModel users = HomogeneousUsers{};
  RfParams rf;
  PlacementConfig placement;
  SolverConfig solver;
  std::uint64_t seed = 1;
  bool operator==(const Scenario&) const = default;
};

/// Checks every invariant of the scenario, throwing Error(ValidationError)
/// with the offending key path.
void validate(const Scenario& sc);

}  // namespace risplace
