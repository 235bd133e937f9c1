#include "doctest.h"
#include "uavris/config.hpp"
#include "uavris/rng.hpp"

#include <cmath>

using namespace uavris;

TEST_CASE("rng is deterministic per seed and diverges across seeds") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
  }
  bool any_diff = false;
  Rng a2(42);
  for (int i = 0; i < 10; ++i) any_diff |= a2.next_u64() != c.next_u64();
  CHECK(any_diff);
}

TEST_CASE("rng state round-trips") {
  Rng a(7);
  a.next_u64();
  a.normal();
  const auto s = a.state();
  Rng b(0);
  b.set_state(s);
  for (int i = 0; i < 16; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform01 stays in [0,1) and uniform_index in range") {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.uniform_index(7) < 7);
  }
}

TEST_CASE("normal draws have roughly unit variance") {
  Rng r(3);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.02);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("config parses key=value with comments and ranges") {
  const auto cfg = KeyValueConfig::from_string(
      "# comment\n"
      "arena_x = 100\n"
      "building_wh_range = 4, 12\n"
      "name=mini # trailing\n");
  CHECK(cfg.get_double("arena_x") == 100.0);
  CHECK(cfg.get_range("building_wh_range") == std::pair<double, double>{4.0, 12.0});
  CHECK(cfg.get_string("name") == "mini");
  CHECK(cfg.get_double("missing", 5.0) == 5.0);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(KeyValueConfig::from_string("novalue\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::from_string("a=1\na=2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::from_string("x=abc\n").get_double("x"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::from_string("r=5,1\n").get_range("r"), ConfigError);
}

TEST_CASE("unknown keys are rejected by name") {
  const auto cfg = KeyValueConfig::from_string("good=1\nbogus_key=2\n");
  try {
    cfg.ensure_known_keys({"good"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
  }
}
