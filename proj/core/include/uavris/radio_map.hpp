#pragma once

#include <string>
#include <vector>

#include "uavris/config.hpp"
#include "uavris/rng.hpp"

namespace uavris {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

// Axis-aligned cuboid footprint with a height above ground (z in [0, height]).
struct Building {
  double x_min = 0, x_max = 0;
  double y_min = 0, y_max = 0;
  double height = 0;

  bool footprint_contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct Arena {
  double x_min = 0, x_max = 0;
  double y_min = 0, y_max = 0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct RadioMap {
  Arena arena;
  std::vector<Building> buildings;
};

struct MobileUser {
  double x = 0, y = 0;
  double heading = 0;  // radians
  double speed = 0;    // m/s
};

struct Scenario {
  RadioMap map;
  Vec3 ris_position;
  double uav_altitude = 0;
  std::vector<MobileUser> users;
  std::uint64_t rng_seed = 0;
  double mobility_jitter_halfwidth = 0.0;  // heading jitter per slot
};

struct ScenarioConfig {
  double arena_x = 100.0;
  double arena_y = 100.0;
  int n_buildings = 12;
  std::pair<double, double> building_wh_range = {8.0, 24.0};
  std::pair<double, double> building_h_range = {20.0, 60.0};
  int n_users = 2;
  double user_speed = 1.0;          // m/s
  double jitter_halfwidth = 0.3927; // pi/8 per slot
  double ris_x = 50.0, ris_y = 50.0, ris_z = 30.0;
  double uav_altitude = 100.0;
  std::uint64_t seed = 0;

  static ScenarioConfig from_config(const KeyValueConfig& cfg);
  static const std::set<std::string>& known_keys();
};

// True iff the open segment (p, q) has no point strictly inside any
// building cuboid. Boundary grazing counts as line of sight; a degenerate
// segment (p == q) is line of sight.
bool is_los(const RadioMap& map, const Vec3& p, const Vec3& q);

// Advances every user by speed*dt along its heading, then perturbs the
// heading by a uniform draw in [-jitter_halfwidth, +jitter_halfwidth].
// Users reflect off arena walls; speed is preserved.
void step_mobility(std::vector<MobileUser>& users, double dt,
                   double jitter_halfwidth, const Arena& arena, Rng& rng);

// Deterministic scenario construction: same config + seed gives an
// identical Scenario. Throws ConfigError when placement cannot satisfy the
// non-overlap / outside-footprint constraints within bounded retries.
Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng);

}  // namespace uavris
