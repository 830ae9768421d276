#pragma once

#include <cmath>
#include <optional>

namespace lstc::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double norm2() const { return x * x + y * y; }
  Vec2 perp() const { return {-y, x}; }  // left normal
};

inline Vec2 unit_from_angle(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

inline double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

// Oriented rectangle: center, heading of the long axis, half extents.
struct Obb {
  Vec2 center;
  double heading = 0.0;
  double half_len = 0.0;
  double half_wid = 0.0;
};

// Distance along a unit-direction ray to the first circle hit; 0 when the
// origin is inside. nullopt when there is no hit with t >= 0.
std::optional<double> ray_circle(Vec2 origin, Vec2 dir, Vec2 center,
                                 double radius);

// First hit of a ray with segment [a, b].
std::optional<double> ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b);

std::optional<double> ray_obb(Vec2 origin, Vec2 dir, const Obb& box);

bool disc_overlaps_disc(Vec2 c1, double r1, Vec2 c2, double r2);
bool disc_overlaps_obb(Vec2 c, double r, const Obb& box);

}  // namespace lstc::geom
