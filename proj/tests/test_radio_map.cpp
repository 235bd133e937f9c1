#include "doctest.h"
#include "uavris/radio_map.hpp"

#include <cmath>

using namespace uavris;

namespace {

RadioMap empty_map(double ax = 100, double ay = 100) {
  RadioMap m;
  m.arena = {0, ax, 0, ay};
  return m;
}

// Dense-sampling occlusion oracle: walk `samples` evenly spaced interior
// points of the segment and test strict point-in-cuboid containment.
bool sampling_oracle_los(const RadioMap& map, const Vec3& p, const Vec3& q,
                         int samples = 100000) {
  for (int i = 1; i < samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const double x = p.x + t * (q.x - p.x);
    const double y = p.y + t * (q.y - p.y);
    const double z = p.z + t * (q.z - p.z);
    for (const auto& b : map.buildings)
      if (x > b.x_min && x < b.x_max && y > b.y_min && y < b.y_max &&
          z > 0.0 && z < b.height)
        return false;
  }
  return true;
}

RadioMap random_map(Rng& rng, int n_buildings) {
  RadioMap m = empty_map();
  for (int i = 0; i < n_buildings; ++i) {
    Building b;
    b.x_min = rng.uniform(0, 90);
    b.x_max = b.x_min + rng.uniform(2, 10);
    b.y_min = rng.uniform(0, 90);
    b.y_max = b.y_min + rng.uniform(2, 10);
    b.height = rng.uniform(10, 80);
    m.buildings.push_back(b);
  }
  return m;
}

Vec3 random_point(Rng& rng, double z_max) {
  return {rng.uniform(0, 100), rng.uniform(0, 100), rng.uniform(0, z_max)};
}

}  // namespace

TEST_CASE("vertical segment over empty map is LoS") {
  const RadioMap m = empty_map();
  CHECK(is_los(m, {50, 50, 100}, {50, 50, 0}));
}

TEST_CASE("segment through a cuboid is blocked, matching the sampling oracle") {
  RadioMap m = empty_map();
  m.buildings.push_back({4, 6, 4, 6, 80});
  const Vec3 uav{0, 0, 100}, mu{10, 10, 0};
  CHECK_FALSE(is_los(m, uav, mu));
  CHECK_FALSE(sampling_oracle_los(m, uav, mu));
}

TEST_CASE("boundary contact is not blockage") {
  RadioMap m = empty_map();
  m.buildings.push_back({4, 6, 4, 6, 80});
  // Slides along the x_min face.
  CHECK(is_los(m, {4, 0, 10}, {4, 10, 10}));
  // Grazes the top face.
  CHECK(is_los(m, {0, 5, 80}, {10, 5, 80}));
  // Degenerate segment.
  CHECK(is_los(m, {5, 5, 100}, {5, 5, 100}));
}

TEST_CASE("occlusion is symmetric and monotone under added buildings") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    RadioMap m = random_map(rng, 1 + static_cast<int>(rng.uniform_index(5)));
    const Vec3 a = random_point(rng, 120), b = random_point(rng, 120);
    const bool los_ab = is_los(m, a, b);
    CHECK(los_ab == is_los(m, b, a));
    RadioMap more = m;
    more.buildings.push_back(
        {20, 40, 20, 40, 60});
    if (!los_ab) CHECK_FALSE(is_los(more, a, b));
  }
}

TEST_CASE("slab test equals the dense sampling oracle on random instances") {
  Rng rng(99);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const RadioMap m = random_map(rng, 1 + static_cast<int>(rng.uniform_index(6)));
    const Vec3 a = random_point(rng, 120), b = random_point(rng, 120);
    CHECK(is_los(m, a, b) == sampling_oracle_los(m, a, b, 20000));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("straight-line mobility step") {
  std::vector<MobileUser> users = {{10, 10, 0.0, 1.0}};
  Arena arena{0, 100, 0, 100};
  Rng rng(1);
  step_mobility(users, 1.0, 0.0, arena, rng);
  CHECK(users[0].x == doctest::Approx(11.0));
  CHECK(users[0].y == doctest::Approx(10.0));
}

TEST_CASE("outward heading at the edge reflects back inside") {
  std::vector<MobileUser> users = {{99.5, 50, 0.0, 2.0}};  // heading +x
  Arena arena{0, 100, 0, 100};
  Rng rng(1);
  step_mobility(users, 1.0, 0.0, arena, rng);
  CHECK(users[0].x == doctest::Approx(98.5));
  CHECK(std::cos(users[0].heading) < 0.0);  // mirrored
}

TEST_CASE("mobility containment over many jittered steps") {
  Arena arena{0, 50, 0, 50};
  std::vector<MobileUser> users;
  Rng rng(7);
  for (int k = 0; k < 5; ++k)
    users.push_back({rng.uniform(0, 50), rng.uniform(0, 50),
                     rng.uniform(0, 6.28), 3.0});
  const double jitter = std::acos(-1.0) / 8.0;
  for (int t = 0; t < 10000; ++t) {
    step_mobility(users, 1.0, jitter, arena, rng);
    for (const auto& u : users) {
      REQUIRE(arena.contains(u.x, u.y));
    }
  }
}

TEST_CASE("generate_scenario is deterministic per seed") {
  ScenarioConfig cfg;
  cfg.arena_x = cfg.arena_y = 60;
  cfg.n_buildings = 6;
  cfg.n_users = 4;
  cfg.seed = 7;
  Rng r1(cfg.seed), r2(cfg.seed);
  const Scenario a = generate_scenario(cfg, r1);
  const Scenario b = generate_scenario(cfg, r2);
  REQUIRE(a.map.buildings.size() == b.map.buildings.size());
  for (size_t i = 0; i < a.map.buildings.size(); ++i) {
    CHECK(a.map.buildings[i].x_min == b.map.buildings[i].x_min);
    CHECK(a.map.buildings[i].height == b.map.buildings[i].height);
  }
  REQUIRE(a.users.size() == b.users.size());
  for (size_t i = 0; i < a.users.size(); ++i) {
    CHECK(a.users[i].x == b.users[i].x);
    CHECK(a.users[i].heading == b.users[i].heading);
  }
  CHECK(a.ris_position.x == b.ris_position.x);
  CHECK(a.ris_position.z == b.ris_position.z);
}

TEST_CASE("zero building density leaves every link LoS") {
  ScenarioConfig cfg;
  cfg.n_buildings = 0;
  cfg.n_users = 3;
  Rng rng(1);
  const Scenario sc = generate_scenario(cfg, rng);
  CHECK(sc.map.buildings.empty());
  for (const auto& u : sc.users)
    CHECK(is_los(sc.map, {50, 50, cfg.uav_altitude}, {u.x, u.y, 0}));
}

TEST_CASE("generated users start outside every footprint") {
  ScenarioConfig cfg;
  cfg.arena_x = cfg.arena_y = 40;
  cfg.n_buildings = 5;
  cfg.n_users = 4;
  cfg.seed = 3;
  Rng rng(cfg.seed);
  const Scenario sc = generate_scenario(cfg, rng);
  for (const auto& u : sc.users) {
    bool inside = false;
    for (const auto& b : sc.map.buildings) inside |= b.footprint_contains(u.x, u.y);
    CHECK_FALSE(inside);
  }
  // RIS ends up on a building face with z below the host's height.
  bool on_face = false;
  for (const auto& b : sc.map.buildings) {
    const bool x_face = (sc.ris_position.x == b.x_min || sc.ris_position.x == b.x_max) &&
                        sc.ris_position.y >= b.y_min && sc.ris_position.y <= b.y_max;
    const bool y_face = (sc.ris_position.y == b.y_min || sc.ris_position.y == b.y_max) &&
                        sc.ris_position.x >= b.x_min && sc.ris_position.x <= b.x_max;
    if ((x_face || y_face) && sc.ris_position.z <= b.height) on_face = true;
  }
  CHECK(on_face);
}

TEST_CASE("infeasible placement reports the constraint") {
  ScenarioConfig cfg;
  cfg.arena_x = cfg.arena_y = 10;
  cfg.n_buildings = 50;  // cannot fit without overlap
  cfg.building_wh_range = {6, 9};
  try {
    Rng rng(1);
    generate_scenario(cfg, rng);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("overlap") != std::string::npos);
  }
}
