#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lstc/geometry.hpp"

namespace lstc::sim {

using geom::Vec2;

struct SegmentSpec {
  enum class Kind { straight, arc };
  Kind kind = Kind::straight;
  double length = 0.0;  // straight: meters
  double radius = 0.0;  // arc
  double sweep = 0.0;   // arc: signed radians, positive = left turn
};

struct MapConfig {
  int lanes = 3;
  double lane_width = 3.5;
  int segments_min = 3;
  int segments_max = 6;
  double segment_len_min = 60.0;
  double segment_len_max = 150.0;
  double radius_min = 40.0;
  double radius_max = 120.0;
  double sweep_min = 0.3;
  double sweep_max = 1.2;
  double total_len_min = 150.0;
  double total_len_max = 900.0;
  double checkpoint_spacing = 50.0;
  double sample_step = 0.5;  // polyline resolution for projection
  // Optional explicit plan, e.g. "straight:200 | arc:80:0.9". When set the
  // random generator is bypassed.
  std::string plan;
};

struct Frenet {
  double s = 0.0;        // arc length of the closest route point
  double d = 0.0;        // signed lateral offset, positive = left
  double heading = 0.0;  // route tangent at s
  int idx = 0;           // polyline hint for the next query
};

// A connected route of straights and arcs. The reference line is the road
// center; lanes sit at fixed lateral offsets from it.
class RoadMap {
 public:
  RoadMap(std::vector<SegmentSpec> segments, const MapConfig& cfg);

  double total_length() const { return total_length_; }
  int lanes() const { return lanes_; }
  double lane_width() const { return lane_width_; }
  double half_width() const { return 0.5 * lanes_ * lane_width_; }
  double lane_offset(int lane) const {
    return (lane - 0.5 * (lanes_ - 1)) * lane_width_;
  }
  int nearest_lane(double d) const;

  Vec2 point_at(double s) const;
  double heading_at(double s) const;
  Vec2 lane_point(double s, int lane) const;

  Frenet project(Vec2 p, int hint = -1) const;

  const std::vector<double>& checkpoints() const { return checkpoint_s_; }
  const std::vector<Vec2>& checkpoint_positions() const {
    return checkpoint_pos_;
  }
  Vec2 destination() const { return point_at(total_length_); }

  const std::vector<SegmentSpec>& segments() const { return segments_; }
  // (s_begin, s_end) per segment.
  std::vector<std::pair<double, double>> segment_spans() const;
  // Reference-line polyline (used for projection and boundary rendering).
  const std::vector<Vec2>& polyline() const { return pts_; }
  const std::vector<double>& polyline_s() const { return cum_s_; }
  double sample_step() const { return sample_step_; }

 private:
  struct SegmentGeom {
    SegmentSpec spec;
    Vec2 start;
    double start_heading = 0.0;
    double s_begin = 0.0;
    double length = 0.0;
  };

  const SegmentGeom& segment_at(double s) const;

  std::vector<SegmentSpec> segments_;
  std::vector<SegmentGeom> geo_;
  int lanes_;
  double lane_width_;
  double sample_step_;
  double total_length_ = 0.0;
  std::vector<Vec2> pts_;
  std::vector<double> cum_s_;
  std::vector<double> checkpoint_s_;
  std::vector<Vec2> checkpoint_pos_;
};

// Same seed, same config -> identical map. Throws std::invalid_argument on
// an infeasible generation config.
RoadMap build_map(const MapConfig& cfg, std::uint64_t seed);

std::vector<SegmentSpec> parse_plan(const std::string& plan);

}  // namespace lstc::sim
