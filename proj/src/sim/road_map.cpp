#include "lstc/road_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lstc/rng.hpp"

namespace lstc::sim {

namespace {

// Pose after driving u meters into a segment that starts at (start, theta0).
void segment_pose(const SegmentSpec& seg, Vec2 start, double theta0, double u,
                  Vec2* pos, double* heading) {
  if (seg.kind == SegmentSpec::Kind::straight) {
    *pos = start + geom::unit_from_angle(theta0) * u;
    *heading = theta0;
    return;
  }
  const double sgn = seg.sweep >= 0.0 ? 1.0 : -1.0;
  const double theta = theta0 + sgn * u / seg.radius;
  const double r = seg.radius * sgn;
  *pos = {start.x + r * (std::sin(theta) - std::sin(theta0)),
          start.y - r * (std::cos(theta) - std::cos(theta0))};
  *heading = theta;
}

double segment_length(const SegmentSpec& seg) {
  return seg.kind == SegmentSpec::Kind::straight
             ? seg.length
             : seg.radius * std::abs(seg.sweep);
}

}  // namespace

RoadMap::RoadMap(std::vector<SegmentSpec> segments, const MapConfig& cfg)
    : segments_(std::move(segments)),
      lanes_(cfg.lanes),
      lane_width_(cfg.lane_width),
      sample_step_(cfg.sample_step) {
  if (segments_.empty())
    throw std::invalid_argument("road map needs at least one segment");
  if (lanes_ < 1) throw std::invalid_argument("road map needs >= 1 lane");

  Vec2 pos{0.0, 0.0};
  double heading = 0.0;
  double s = 0.0;
  for (const auto& seg : segments_) {
    const double len = segment_length(seg);
    if (!(len > 0.0))
      throw std::invalid_argument("road segment with non-positive length");
    if (seg.kind == SegmentSpec::Kind::arc && seg.radius <= half_width())
      throw std::invalid_argument("arc radius must exceed road half width");
    geo_.push_back({seg, pos, heading, s, len});
    segment_pose(seg, pos, heading, len, &pos, &heading);
    s += len;
  }
  total_length_ = s;

  // Reference-line polyline at sample_step resolution, exact endpoints.
  pts_.push_back(geo_.front().start);
  cum_s_.push_back(0.0);
  for (const auto& g : geo_) {
    const int steps = std::max(1, static_cast<int>(std::ceil(g.length / sample_step_)));
    for (int i = 1; i <= steps; ++i) {
      const double u = std::min(g.length, i * g.length / steps);
      Vec2 p;
      double h;
      segment_pose(g.spec, g.start, g.start_heading, u, &p, &h);
      pts_.push_back(p);
      cum_s_.push_back(g.s_begin + u);
    }
  }

  const double spacing = cfg.checkpoint_spacing;
  for (double cs = spacing; cs < total_length_ - 1e-9; cs += spacing) {
    checkpoint_s_.push_back(cs);
  }
  checkpoint_s_.push_back(total_length_);  // destination is the last one
  for (double cs : checkpoint_s_) checkpoint_pos_.push_back(point_at(cs));
}

std::vector<std::pair<double, double>> RoadMap::segment_spans() const {
  std::vector<std::pair<double, double>> out;
  for (const auto& g : geo_) out.emplace_back(g.s_begin, g.s_begin + g.length);
  return out;
}

const RoadMap::SegmentGeom& RoadMap::segment_at(double s) const {
  // geo_ is small (a handful of segments); linear scan is fine.
  for (const auto& g : geo_) {
    if (s <= g.s_begin + g.length) return g;
  }
  return geo_.back();
}

Vec2 RoadMap::point_at(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const SegmentGeom& g = segment_at(s);
  Vec2 p;
  double h;
  segment_pose(g.spec, g.start, g.start_heading, s - g.s_begin, &p, &h);
  return p;
}

double RoadMap::heading_at(double s) const {
  s = std::clamp(s, 0.0, total_length_);
  const SegmentGeom& g = segment_at(s);
  Vec2 p;
  double h;
  segment_pose(g.spec, g.start, g.start_heading, s - g.s_begin, &p, &h);
  return h;
}

Vec2 RoadMap::lane_point(double s, int lane) const {
  const Vec2 p = point_at(s);
  const double h = heading_at(s);
  return p + geom::unit_from_angle(h).perp() * lane_offset(lane);
}

int RoadMap::nearest_lane(double d) const {
  int best = 0;
  double best_dist = std::abs(d - lane_offset(0));
  for (int l = 1; l < lanes_; ++l) {
    const double dist = std::abs(d - lane_offset(l));
    if (dist < best_dist) {
      best_dist = dist;
      best = l;
    }
  }
  return best;
}

Frenet RoadMap::project(Vec2 p, int hint) const {
  const int n = static_cast<int>(pts_.size());
  int lo = 0;
  int hi = n - 1;
  if (hint >= 0) {
    // The ego moves a fraction of a meter per step; a generous window
    // around the previous match is enough.
    const int window = static_cast<int>(40.0 / sample_step_);
    lo = std::max(0, hint - window);
    hi = std::min(n - 1, hint + window);
  }
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  Vec2 best_pt{};
  Vec2 best_dir{1.0, 0.0};
  int best_idx = 0;
  for (int i = lo; i < hi; ++i) {
    const Vec2 a = pts_[i];
    const Vec2 b = pts_[i + 1];
    const Vec2 e = b - a;
    const double len2 = e.norm2();
    if (len2 <= 0.0) continue;
    const double t = std::clamp((p - a).dot(e) / len2, 0.0, 1.0);
    const Vec2 q = a + e * t;
    const double d2 = (p - q).norm2();
    if (d2 < best_d2) {
      best_d2 = d2;
      best_pt = q;
      best_s = cum_s_[i] + t * std::sqrt(len2);
      best_dir = e * (1.0 / std::sqrt(len2));
      best_idx = i;
    }
  }
  Frenet f;
  f.s = best_s;
  f.d = best_dir.cross(p - best_pt);
  f.heading = heading_at(best_s);
  f.idx = best_idx;
  return f;
}

std::vector<SegmentSpec> parse_plan(const std::string& plan) {
  std::vector<SegmentSpec> out;
  std::string token;
  std::stringstream ss(plan);
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(ss, token, '|')) {
    token = trim(token);
    if (token.empty()) continue;
    std::stringstream ts(token);
    std::string kind, a, b;
    std::getline(ts, kind, ':');
    std::getline(ts, a, ':');
    std::getline(ts, b, ':');
    kind = trim(kind);
    SegmentSpec seg;
    try {
      if (kind == "straight") {
        seg.kind = SegmentSpec::Kind::straight;
        seg.length = std::stod(a);
      } else if (kind == "arc") {
        seg.kind = SegmentSpec::Kind::arc;
        seg.radius = std::stod(a);
        seg.sweep = std::stod(b);
      } else {
        throw std::invalid_argument("kind");
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("bad map plan token: '" + token + "'");
    }
    out.push_back(seg);
  }
  if (out.empty()) throw std::invalid_argument("map plan is empty");
  return out;
}

RoadMap build_map(const MapConfig& cfg, std::uint64_t seed) {
  if (!cfg.plan.empty()) return RoadMap(parse_plan(cfg.plan), cfg);

  if (cfg.segments_min < 1 || cfg.segments_max < cfg.segments_min)
    throw std::invalid_argument("map config: bad segment count range");
  if (cfg.segment_len_min <= 0 || cfg.segment_len_max < cfg.segment_len_min)
    throw std::invalid_argument("map config: bad segment length range");
  if (cfg.radius_min <= 0.5 * cfg.lanes * cfg.lane_width)
    throw std::invalid_argument("map config: radius_min inside road width");
  if (cfg.sweep_min <= 0 || cfg.sweep_max < cfg.sweep_min)
    throw std::invalid_argument("map config: bad sweep range");

  Rng rng(mix_seed(seed, 0xa11ce));
  for (int attempt = 0; attempt < 256; ++attempt) {
    const int n = rng.uniform_int(cfg.segments_min, cfg.segments_max);
    std::vector<SegmentSpec> plan;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      SegmentSpec seg;
      if (rng.bernoulli(0.5)) {
        seg.kind = SegmentSpec::Kind::straight;
        seg.length = rng.uniform(cfg.segment_len_min, cfg.segment_len_max);
      } else {
        seg.kind = SegmentSpec::Kind::arc;
        seg.radius = rng.uniform(cfg.radius_min, cfg.radius_max);
        seg.sweep = rng.uniform(cfg.sweep_min, cfg.sweep_max) *
                    (rng.bernoulli(0.5) ? 1.0 : -1.0);
      }
      total += segment_length(seg);
      plan.push_back(seg);
    }
    if (total >= cfg.total_len_min && total <= cfg.total_len_max)
      return RoadMap(std::move(plan), cfg);
  }
  throw std::invalid_argument(
      "map config: could not hit the total length range; adjust segment or "
      "length bounds");
}

}  // namespace lstc::sim
