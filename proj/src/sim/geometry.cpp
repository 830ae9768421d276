#include "lstc/geometry.hpp"

#include <algorithm>
#include <limits>

namespace lstc::geom {

std::optional<double> ray_circle(Vec2 origin, Vec2 dir, Vec2 center,
                                 double radius) {
  const Vec2 oc = center - origin;
  const double b = dir.dot(oc);
  const double disc = b * b - oc.norm2() + radius * radius;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  const double t1 = b - s;
  if (t1 >= 0.0) return t1;
  const double t2 = b + s;
  if (t2 >= 0.0) return 0.0;  // origin inside the circle
  return std::nullopt;
}

std::optional<double> ray_segment(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
  const Vec2 e = b - a;
  const double denom = dir.cross(e);
  if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
  const Vec2 ao = a - origin;
  const double t = ao.cross(e) / denom;
  const double u = ao.cross(dir) / denom;
  if (t >= 0.0 && u >= 0.0 && u <= 1.0) return t;
  return std::nullopt;
}

std::optional<double> ray_obb(Vec2 origin, Vec2 dir, const Obb& box) {
  // Slab test in the box frame: u = long axis, n = left normal.
  const Vec2 u = unit_from_angle(box.heading);
  const Vec2 n = u.perp();
  const Vec2 rel = origin - box.center;
  const double o[2] = {rel.dot(u), rel.dot(n)};
  const double d[2] = {dir.dot(u), dir.dot(n)};
  const double h[2] = {box.half_len, box.half_wid};

  double tmin = 0.0;
  double tmax = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2; ++i) {
    if (std::abs(d[i]) < 1e-15) {
      if (std::abs(o[i]) > h[i]) return std::nullopt;
      continue;
    }
    double t1 = (-h[i] - o[i]) / d[i];
    double t2 = (h[i] - o[i]) / d[i];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
    if (tmin > tmax) return std::nullopt;
  }
  return tmin;  // 0 when the origin is inside
}

bool disc_overlaps_disc(Vec2 c1, double r1, Vec2 c2, double r2) {
  const double rr = r1 + r2;
  return (c1 - c2).norm2() <= rr * rr;
}

bool disc_overlaps_obb(Vec2 c, double r, const Obb& box) {
  const Vec2 u = unit_from_angle(box.heading);
  const Vec2 n = u.perp();
  const Vec2 rel = c - box.center;
  const double px = std::clamp(rel.dot(u), -box.half_len, box.half_len);
  const double py = std::clamp(rel.dot(n), -box.half_wid, box.half_wid);
  const Vec2 closest = box.center + u * px + n * py;
  return (c - closest).norm2() <= r * r;
}

}  // namespace lstc::geom
