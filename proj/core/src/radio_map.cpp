#include "uavris/radio_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uavris {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Clips parameter interval [t0,t1] against slab lo <= o + t*d <= hi.
// Returns false when the interval empties. With d == 0 the segment runs
// parallel to the slab: it survives only if o lies strictly inside, since
// we want strict-interior intersection semantics.
bool clip_axis(double o, double d, double lo, double hi, double& t0, double& t1) {
  if (d == 0.0) return o > lo && o < hi;
  double ta = (lo - o) / d;
  double tb = (hi - o) / d;
  if (ta > tb) std::swap(ta, tb);
  t0 = std::max(t0, ta);
  t1 = std::min(t1, tb);
  return t0 < t1;
}

bool segment_hits_building(const Vec3& p, const Vec3& q, const Building& b) {
  const double dx = q.x - p.x, dy = q.y - p.y, dz = q.z - p.z;
  // Open segment: endpoints touching a face are not blockage.
  double t0 = 0.0, t1 = 1.0;
  if (!clip_axis(p.x, dx, b.x_min, b.x_max, t0, t1)) return false;
  if (!clip_axis(p.y, dy, b.y_min, b.y_max, t0, t1)) return false;
  if (!clip_axis(p.z, dz, 0.0, b.height, t0, t1)) return false;
  // t0 < t1 guarantees a parameter interval of interior points; tangency
  // (t0 == t1) already failed the strict inequality inside clip_axis.
  return true;
}

}  // namespace

bool is_los(const RadioMap& map, const Vec3& p, const Vec3& q) {
  if (p.x == q.x && p.y == q.y && p.z == q.z) return true;
  for (const auto& b : map.buildings)
    if (segment_hits_building(p, q, b)) return false;
  return true;
}

void step_mobility(std::vector<MobileUser>& users, double dt,
                   double jitter_halfwidth, const Arena& arena, Rng& rng) {
  if (dt <= 0.0) throw std::invalid_argument("step_mobility: dt must be > 0");
  for (auto& u : users) {
    double x = u.x + std::cos(u.heading) * u.speed * dt;
    double y = u.y + std::sin(u.heading) * u.speed * dt;
    double heading = u.heading;
    // Mirror reflections; loop handles a step that crosses two walls.
    for (int guard = 0; guard < 8; ++guard) {
      bool bounced = false;
      if (x < arena.x_min) { x = 2.0 * arena.x_min - x; heading = std::numbers::pi - heading; bounced = true; }
      if (x > arena.x_max) { x = 2.0 * arena.x_max - x; heading = std::numbers::pi - heading; bounced = true; }
      if (y < arena.y_min) { y = 2.0 * arena.y_min - y; heading = -heading; bounced = true; }
      if (y > arena.y_max) { y = 2.0 * arena.y_max - y; heading = -heading; bounced = true; }
      if (!bounced) break;
    }
    // A pathological speed*dt larger than several arena spans lands here.
    x = std::clamp(x, arena.x_min, arena.x_max);
    y = std::clamp(y, arena.y_min, arena.y_max);
    if (jitter_halfwidth > 0.0)
      heading += rng.uniform(-jitter_halfwidth, jitter_halfwidth);
    heading = std::fmod(heading, kTwoPi);
    if (heading < 0.0) heading += kTwoPi;
    u.x = x;
    u.y = y;
    u.heading = heading;
  }
}

ScenarioConfig ScenarioConfig::from_config(const KeyValueConfig& cfg) {
  ScenarioConfig s;
  s.arena_x = cfg.get_double("arena_x", s.arena_x);
  s.arena_y = cfg.get_double("arena_y", s.arena_y);
  s.n_buildings = static_cast<int>(cfg.get_int("n_buildings", s.n_buildings));
  s.building_wh_range = cfg.get_range("building_wh_range", s.building_wh_range);
  s.building_h_range = cfg.get_range("building_h_range", s.building_h_range);
  s.n_users = static_cast<int>(cfg.get_int("n_users", s.n_users));
  s.user_speed = cfg.get_double("user_speed", s.user_speed);
  s.jitter_halfwidth = cfg.get_double("jitter_halfwidth", s.jitter_halfwidth);
  s.ris_x = cfg.get_double("ris_x", s.ris_x);
  s.ris_y = cfg.get_double("ris_y", s.ris_y);
  s.ris_z = cfg.get_double("ris_z", s.ris_z);
  s.uav_altitude = cfg.get_double("uav_altitude", s.uav_altitude);
  s.seed = cfg.get_u64("seed", s.seed);
  if (s.arena_x <= 0 || s.arena_y <= 0) throw ConfigError("arena size must be positive");
  if (s.n_users <= 0) throw ConfigError("n_users must be positive");
  if (s.n_buildings < 0) throw ConfigError("n_buildings must be >= 0");
  if (s.user_speed < 0) throw ConfigError("user_speed must be >= 0");
  return s;
}

const std::set<std::string>& ScenarioConfig::known_keys() {
  static const std::set<std::string> keys = {
      "arena_x", "arena_y", "n_buildings", "building_wh_range",
      "building_h_range", "n_users", "user_speed", "jitter_halfwidth",
      "ris_x", "ris_y", "ris_z", "uav_altitude", "seed"};
  return keys;
}

namespace {

bool overlaps(const Building& a, const Building& b) {
  return a.x_min < b.x_max && b.x_min < a.x_max &&
         a.y_min < b.y_max && b.y_min < a.y_max;
}

bool inside_any_footprint(const std::vector<Building>& bs, double x, double y) {
  return std::any_of(bs.begin(), bs.end(),
                     [&](const Building& b) { return b.footprint_contains(x, y); });
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng) {
  constexpr int kMaxRetries = 2000;

  Scenario sc;
  sc.rng_seed = cfg.seed;
  sc.map.arena = {0.0, cfg.arena_x, 0.0, cfg.arena_y};
  sc.uav_altitude = cfg.uav_altitude;
  sc.mobility_jitter_halfwidth = cfg.jitter_halfwidth;

  for (int i = 0; i < cfg.n_buildings; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      const double w = rng.uniform(cfg.building_wh_range.first, cfg.building_wh_range.second);
      const double d = rng.uniform(cfg.building_wh_range.first, cfg.building_wh_range.second);
      if (w >= cfg.arena_x || d >= cfg.arena_y) continue;
      Building b;
      b.x_min = rng.uniform(0.0, cfg.arena_x - w);
      b.x_max = b.x_min + w;
      b.y_min = rng.uniform(0.0, cfg.arena_y - d);
      b.y_max = b.y_min + d;
      b.height = rng.uniform(cfg.building_h_range.first, cfg.building_h_range.second);
      if (b.height <= 0.0) continue;
      const bool clash = std::any_of(sc.map.buildings.begin(), sc.map.buildings.end(),
                                     [&](const Building& o) { return overlaps(b, o); });
      if (clash) continue;
      sc.map.buildings.push_back(b);
      placed = true;
      break;
    }
    if (!placed)
      throw ConfigError(
          "generate_scenario: could not place building " + std::to_string(i) +
          " without overlap (arena too dense for n_buildings/building_wh_range)");
  }

  // RIS mount rule: snap onto the nearest face of the nearest building and
  // cap z at that building's height. With an empty map the configured point
  // is used as a free-standing mast.
  sc.ris_position = {cfg.ris_x, cfg.ris_y, cfg.ris_z};
  if (!sc.map.buildings.empty()) {
    const Building* host = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : sc.map.buildings) {
      const double cx = 0.5 * (b.x_min + b.x_max);
      const double cy = 0.5 * (b.y_min + b.y_max);
      const double d2 = (cx - cfg.ris_x) * (cx - cfg.ris_x) +
                        (cy - cfg.ris_y) * (cy - cfg.ris_y);
      if (d2 < best) {
        best = d2;
        host = &b;
      }
    }
    // Project onto the footprint rectangle, then push to the closest edge.
    double x = std::clamp(cfg.ris_x, host->x_min, host->x_max);
    double y = std::clamp(cfg.ris_y, host->y_min, host->y_max);
    const double dxl = x - host->x_min, dxr = host->x_max - x;
    const double dyl = y - host->y_min, dyr = host->y_max - y;
    const double m = std::min({dxl, dxr, dyl, dyr});
    if (m == dxl) x = host->x_min;
    else if (m == dxr) x = host->x_max;
    else if (m == dyl) y = host->y_min;
    else y = host->y_max;
    sc.ris_position = {x, y, std::min(cfg.ris_z, host->height)};
  }

  for (int k = 0; k < cfg.n_users; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
      const double x = rng.uniform(0.0, cfg.arena_x);
      const double y = rng.uniform(0.0, cfg.arena_y);
      if (inside_any_footprint(sc.map.buildings, x, y)) continue;
      MobileUser u;
      u.x = x;
      u.y = y;
      u.heading = rng.uniform(0.0, kTwoPi);
      u.speed = cfg.user_speed;
      sc.users.push_back(u);
      placed = true;
      break;
    }
    if (!placed)
      throw ConfigError(
          "generate_scenario: could not place user " + std::to_string(k) +
          " outside building footprints (buildings cover the arena)");
  }
  return sc;
}

}  // namespace uavris
