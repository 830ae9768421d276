#include <doctest.h>

#include <cmath>

#include "lstc/road_map.hpp"

using namespace lstc;
using namespace lstc::sim;

namespace {
MapConfig plan_cfg(const std::string& plan) {
  MapConfig cfg;
  cfg.plan = plan;
  return cfg;
}
}  // namespace

TEST_CASE("straight 200 m: checkpoints at 50/100/150/200") {
  const RoadMap map = build_map(plan_cfg("straight:200"), 0);
  CHECK(map.total_length() == doctest::Approx(200.0));
  REQUIRE(map.checkpoints().size() == 4);
  CHECK(map.checkpoints()[0] == doctest::Approx(50.0));
  CHECK(map.checkpoints()[1] == doctest::Approx(100.0));
  CHECK(map.checkpoints()[2] == doctest::Approx(150.0));
  CHECK(map.checkpoints()[3] == doctest::Approx(200.0));
}

TEST_CASE("arc geometry: radius 50, sweep pi/2") {
  const RoadMap map = build_map(plan_cfg("arc:50:1.5707963267948966"), 0);
  const double L = map.total_length();
  CHECK(L == doctest::Approx(50.0 * M_PI / 2).epsilon(1e-12));
  CHECK(map.heading_at(L) == doctest::Approx(M_PI / 2).epsilon(1e-12));
  const Vec2 end = map.point_at(L);
  CHECK(end.norm() == doctest::Approx(50.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("same seed gives a byte-identical map") {
  MapConfig cfg;
  cfg.segments_min = 5;
  cfg.segments_max = 5;
  const RoadMap a = build_map(cfg, 12345);
  const RoadMap b = build_map(cfg, 12345);
  REQUIRE(a.segments().size() == b.segments().size());
  for (size_t i = 0; i < a.segments().size(); ++i) {
    CHECK(a.segments()[i].kind == b.segments()[i].kind);
    CHECK(a.segments()[i].length == b.segments()[i].length);
    CHECK(a.segments()[i].radius == b.segments()[i].radius);
    CHECK(a.segments()[i].sweep == b.segments()[i].sweep);
  }
  CHECK(a.polyline().size() == b.polyline().size());
  const RoadMap c = build_map(cfg, 54321);
  bool differs = c.segments().size() != a.segments().size();
  for (size_t i = 0; !differs && i < a.segments().size(); ++i)
    differs = a.segments()[i].length != c.segments()[i].length ||
              a.segments()[i].radius != c.segments()[i].radius;
  CHECK(differs);
}

TEST_CASE("generated maps respect the total length range") {
  MapConfig cfg;
  cfg.total_len_min = 300.0;
  cfg.total_len_max = 500.0;
  for (int seed = 0; seed < 10; ++seed) {
    const RoadMap map = build_map(cfg, seed);
    CHECK(map.total_length() >= 300.0);
    CHECK(map.total_length() <= 500.0);
  }
}

TEST_CASE("frenet projection inverts lane_point") {
  const RoadMap map = build_map(plan_cfg("straight:80 | arc:60:0.9 | straight:40"), 0);
  for (double s : {10.0, 79.0, 95.0, 130.0, 150.0}) {
    for (int lane : {0, 1, 2}) {
      const Vec2 p = map.lane_point(s, lane);
      const Frenet f = map.project(p);
      CHECK(f.s == doctest::Approx(s).epsilon(1e-3));
      CHECK(f.d == doctest::Approx(map.lane_offset(lane)).epsilon(1e-2));
    }
  }
}

TEST_CASE("segments join continuously") {
  const RoadMap map = build_map(plan_cfg("straight:50 | arc:45:-1.0 | straight:60"), 0);
  const auto spans = map.segment_spans();
  REQUIRE(spans.size() == 3);
  for (const auto& [b, e] : spans) {
    const Vec2 before = map.point_at(e - 1e-6);
    const Vec2 after = map.point_at(e + 1e-6);
    CHECK((after - before).norm() < 1e-4);
  }
}

TEST_CASE("infeasible map configs are rejected") {
  MapConfig cfg;
  cfg.segments_min = 0;
  cfg.segments_max = 0;
  CHECK_THROWS_AS(build_map(cfg, 1), std::invalid_argument);

  MapConfig tight;
  tight.radius_min = 1.0;  // inside the road half width
  CHECK_THROWS_AS(build_map(tight, 1), std::invalid_argument);

  MapConfig impossible;
  impossible.total_len_min = 1e9;
  impossible.total_len_max = 2e9;
  CHECK_THROWS_AS(build_map(impossible, 1), std::invalid_argument);

  CHECK_THROWS_AS(build_map(plan_cfg("zigzag:10"), 1), std::invalid_argument);
  CHECK_THROWS_AS(build_map(plan_cfg(" | "), 1), std::invalid_argument);
}

TEST_CASE("lane helpers") {
  const RoadMap map = build_map(plan_cfg("straight:100"), 0);
  CHECK(map.lanes() == 3);
  CHECK(map.lane_offset(0) == doctest::Approx(-3.5));
  CHECK(map.lane_offset(1) == doctest::Approx(0.0));
  CHECK(map.lane_offset(2) == doctest::Approx(3.5));
  CHECK(map.half_width() == doctest::Approx(5.25));
  CHECK(map.nearest_lane(-3.0) == 0);
  CHECK(map.nearest_lane(0.2) == 1);
  CHECK(map.nearest_lane(9.0) == 2);
}
