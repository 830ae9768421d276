#include <doctest.h>

#include <cmath>

#include "lstc/geometry.hpp"

using namespace lstc::geom;

TEST_CASE("ray_circle hits, misses and inside cases") {
  const Vec2 o{0, 0};
  const Vec2 dir{1, 0};
  auto t = ray_circle(o, dir, {10, 0}, 1.0);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(9.0).epsilon(1e-12));

  CHECK_FALSE(ray_circle(o, dir, {10, 3}, 1.0).has_value());
  CHECK_FALSE(ray_circle(o, dir, {-10, 0}, 1.0).has_value());  // behind

  t = ray_circle(o, dir, {0.2, 0}, 1.0);  // origin inside
  REQUIRE(t.has_value());
  CHECK(*t == 0.0);

  // grazing tangent
  t = ray_circle(o, dir, {5, 1}, 1.0);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("ray_segment basic intersection") {
  auto t = ray_segment({0, 0}, {1, 0}, {3, -1}, {3, 1});
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(3.0));
  CHECK_FALSE(ray_segment({0, 0}, {1, 0}, {3, 1}, {3, 2}).has_value());
  CHECK_FALSE(ray_segment({0, 0}, {1, 0}, {-3, -1}, {-3, 1}).has_value());
  // parallel
  CHECK_FALSE(ray_segment({0, 0}, {1, 0}, {1, 1}, {5, 1}).has_value());
}

TEST_CASE("ray_obb axis-aligned and rotated") {
  Obb box{{5, 0}, 0.0, 2.0, 1.0};
  auto t = ray_obb({0, 0}, {1, 0}, box);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(3.0));

  // from the side
  t = ray_obb({5, 5}, {0, -1}, box);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(4.0));

  // origin inside
  t = ray_obb({5, 0.5}, {1, 0}, box);
  REQUIRE(t.has_value());
  CHECK(*t == 0.0);

  // miss
  CHECK_FALSE(ray_obb({0, 3}, {1, 0}, box).has_value());

  // rotated 90 degrees: long axis now vertical
  Obb rot{{5, 0}, M_PI / 2, 2.0, 1.0};
  t = ray_obb({0, 0}, {1, 0}, rot);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(4.0));
}

TEST_CASE("disc overlap tests") {
  CHECK(disc_overlaps_disc({0, 0}, 1.0, {1.5, 0}, 1.0));
  CHECK_FALSE(disc_overlaps_disc({0, 0}, 1.0, {2.5, 0}, 1.0));

  Obb box{{5, 0}, 0.0, 2.0, 1.0};
  CHECK(disc_overlaps_obb({2.5, 0}, 1.0, box));       // touches the end
  CHECK_FALSE(disc_overlaps_obb({1.5, 0}, 1.0, box));
  CHECK(disc_overlaps_obb({5, 0}, 0.1, box));         // center inside
  CHECK(disc_overlaps_obb({7.5, 1.5}, 1.0, box));     // corner
  CHECK_FALSE(disc_overlaps_obb({7.8, 1.8}, 1.0, box));
}

TEST_CASE("wrap_angle stays in [-pi, pi]") {
  CHECK(wrap_angle(3 * M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-3 * M_PI) == doctest::Approx(-M_PI).epsilon(1e-12));
  CHECK(wrap_angle(0.3) == doctest::Approx(0.3));
}
