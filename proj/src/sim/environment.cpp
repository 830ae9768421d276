#include "lstc/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lstc::sim {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::running: return "running";
    case Termination::success: return "success";
    case Termination::departure: return "departure";
    case Termination::max_steps: return "max_steps";
  }
  return "?";
}

double compute_reward(const RewardParts& p, const EnvConfig& cfg) {
  return cfg.c_dis * p.dis + cfg.c_speed * p.speed + cfg.c_yaw * p.yaw +
         cfg.c_steering * p.steering + p.term;
}

TrafficState populate_traffic(const RoadMap& map, const TrafficConfig& cfg,
                              double ego_spawn_s, int ego_lane, Rng& rng) {
  TrafficState out;
  const double total = map.total_length();

  // Vehicles: Poisson count per lane, positions resampled (not dropped) on
  // conflict so the expected count stays density * km * lanes.
  for (int lane = 0; lane < map.lanes(); ++lane) {
    const int count = rng.poisson(cfg.density * total / 1000.0);
    for (int i = 0; i < count; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 32 && !placed; ++attempt) {
        const double s = rng.uniform(0.0, std::max(1.0, total - 5.0));
        if (lane == ego_lane && s > ego_spawn_s - 10.0 &&
            s < ego_spawn_s + cfg.spawn_clearance) {
          continue;
        }
        bool conflict = false;
        for (const auto& v : out.vehicles) {
          if (v.lane == lane && std::abs(v.s - s) < 6.0) {
            conflict = true;
            break;
          }
        }
        if (conflict) continue;
        out.vehicles.push_back({lane, s, cfg.speed, true});
        placed = true;
      }
    }
  }
  std::sort(out.vehicles.begin(), out.vehicles.end(),
            [](const TrafficVehicle& a, const TrafficVehicle& b) {
              return a.lane != b.lane ? a.lane < b.lane : a.s < b.s;
            });

  // Obstacle clusters, one coin flip per road segment.
  for (const auto& [s_begin, s_end] : map.segment_spans()) {
    if (!rng.bernoulli(cfg.accident_prob)) continue;
    const int lane = rng.uniform_int(0, map.lanes() - 1);
    double center_s =
        rng.uniform(std::min(s_begin + 5.0, s_end), std::max(s_begin, s_end - 5.0));
    if (lane == ego_lane && std::abs(center_s - ego_spawn_s) < cfg.spawn_clearance)
      center_s = std::min(total - 5.0, ego_spawn_s + cfg.spawn_clearance + 10.0);
    const int discs = rng.uniform_int(2, 4);
    for (int i = 0; i < discs; ++i) {
      const double ds = rng.uniform(-3.0, 3.0);
      const double jitter = rng.uniform(-0.8, 0.8);
      const double radius =
          rng.uniform(cfg.obstacle_radius_min, cfg.obstacle_radius_max);
      const double s = std::clamp(center_s + ds, 0.0, total);
      const geom::Vec2 base = map.lane_point(s, lane);
      const geom::Vec2 n = geom::unit_from_angle(map.heading_at(s)).perp();
      out.obstacles.push_back({base + n * jitter, radius, lane, s});
    }
  }
  return out;
}

Environment::Environment(std::shared_ptr<const RoadMap> map, EnvConfig cfg,
                         TrafficConfig traffic_cfg)
    : cfg_(cfg), traffic_cfg_(traffic_cfg) {
  set_map(std::move(map));
}

void Environment::set_map(std::shared_ptr<const RoadMap> map) {
  map_ = std::move(map);
  rebuild_boundaries();
  traffic_ = {};
  vehicle_boxes_.clear();
  status_ = Termination::running;
}

void Environment::rebuild_boundaries() {
  boundary_left_.clear();
  boundary_right_.clear();
  const double hw = map_->half_width();
  const double total = map_->total_length();
  const int n = static_cast<int>(std::floor(total / boundary_step_)) + 1;
  for (int i = 0; i <= n; ++i) {
    const double s = std::min(total, i * boundary_step_);
    const geom::Vec2 p = map_->point_at(s);
    const geom::Vec2 nl = geom::unit_from_angle(map_->heading_at(s)).perp();
    boundary_left_.push_back(p + nl * hw);
    boundary_right_.push_back(p + nl * (-hw));
  }
}

const Observation& Environment::reset(std::uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7ea11));
  ego_lane_ = (map_->lanes() - 1) / 2;
  traffic_ = populate_traffic(*map_, traffic_cfg_, cfg_.spawn_s, ego_lane_, rng);

  ego_ = EgoState{};
  ego_.pos = map_->lane_point(cfg_.spawn_s, ego_lane_);
  ego_.heading = map_->heading_at(cfg_.spawn_s);
  ego_.progress = cfg_.spawn_s;
  ego_.lateral = map_->lane_offset(ego_lane_);

  status_ = Termination::running;
  step_count_ = 0;
  route_hint_ = -1;
  const Frenet f = map_->project(ego_.pos);
  route_hint_ = f.idx;

  rebuild_vehicle_boxes();
  obs_ = build_observation();
  return obs_;
}

void Environment::set_traffic(TrafficState t) {
  traffic_ = std::move(t);
  rebuild_vehicle_boxes();
  obs_ = build_observation();
}

void Environment::set_ego_pose(geom::Vec2 pos, double heading, double speed) {
  ego_.pos = pos;
  ego_.heading = heading;
  ego_.speed = speed;
  const Frenet f = map_->project(pos);
  route_hint_ = f.idx;
  ego_.progress = f.s;
  ego_.lateral = f.d;
  ego_lane_ = map_->nearest_lane(f.d);
  obs_ = build_observation();
}

void Environment::rebuild_vehicle_boxes() {
  vehicle_boxes_.clear();
  for (const auto& v : traffic_.vehicles) {
    if (!v.active) continue;
    geom::Obb box;
    box.center = map_->lane_point(v.s, v.lane);
    box.heading = map_->heading_at(v.s);
    box.half_len = traffic_cfg_.vehicle_half_len;
    box.half_wid = traffic_cfg_.vehicle_half_wid;
    vehicle_boxes_.push_back(box);
  }
}

void Environment::update_traffic() {
  const double total = map_->total_length();
  for (auto& v : traffic_.vehicles) {
    if (!v.active) continue;
    bool blocked = false;
    auto ahead = [&](int lane, double s) {
      if (lane != v.lane) return false;
      const double ds = s - v.s;
      return ds > 0.0 && ds <= traffic_cfg_.gap_follow;
    };
    for (const auto& o : traffic_.vehicles) {
      if (&o != &v && o.active && ahead(o.lane, o.s)) {
        blocked = true;
        break;
      }
    }
    if (!blocked) {
      for (const auto& ob : traffic_.obstacles) {
        if (ahead(ob.lane, ob.s)) {
          blocked = true;
          break;
        }
      }
    }
    if (!blocked && ahead(ego_lane_, ego_.progress)) blocked = true;

    const double dv = (blocked ? -traffic_cfg_.decel : traffic_cfg_.accel) *
                      cfg_.dt;
    v.speed = std::clamp(v.speed + dv, 0.0, traffic_cfg_.speed);
    v.s += v.speed * cfg_.dt;
    if (v.s >= total) v.active = false;  // done; despawn
  }
}

bool Environment::check_collision() const {
  for (const auto& box : vehicle_boxes_) {
    if (geom::disc_overlaps_obb(ego_.pos, cfg_.ego_radius, box)) return true;
  }
  for (const auto& ob : traffic_.obstacles) {
    if (geom::disc_overlaps_disc(ego_.pos, cfg_.ego_radius, ob.pos, ob.radius))
      return true;
  }
  return false;
}

StepOutcome Environment::step(const Action& action) {
  if (status_ != Termination::running)
    throw std::logic_error("Environment::step called on a finished episode");

  const double steer_cmd = std::clamp(action[0], -1.0, 1.0);
  const double accel_cmd = std::clamp(action[1], -1.0, 1.0);
  const double delta = steer_cmd * cfg_.delta_max;
  const double accel = accel_cmd >= 0.0 ? accel_cmd * cfg_.accel_max
                                        : -accel_cmd * cfg_.accel_min;

  const double v0 = ego_.speed;
  const double yaw_rate = (v0 / cfg_.wheelbase) * std::tan(delta);
  const double heading0 = ego_.heading;
  ego_.heading = heading0 + yaw_rate * cfg_.dt;
  ego_.pos = ego_.pos + geom::unit_from_angle(heading0) * (v0 * cfg_.dt);
  ego_.speed = std::clamp(v0 + accel * cfg_.dt, 0.0, cfg_.v_max);
  ego_.steering = delta;
  ego_.yaw_rate = yaw_rate;

  update_traffic();
  rebuild_vehicle_boxes();

  const Frenet f = map_->project(ego_.pos, route_hint_);
  route_hint_ = f.idx;
  const double progress_prev = ego_.progress;
  ego_.progress = f.s;
  ego_.lateral = f.d;
  ego_lane_ = map_->nearest_lane(f.d);

  StepOutcome out;
  out.info.collision = check_collision();
  const bool reached = ego_.progress >= map_->total_length() - 1e-9;
  out.info.departure = !reached && std::abs(f.d) > map_->half_width();

  step_count_ += 1;
  if (reached) {
    status_ = Termination::success;
  } else if (out.info.departure) {
    status_ = Termination::departure;
  } else if (step_count_ >= cfg_.max_episode_steps) {
    status_ = Termination::max_steps;
  }

  out.cost = (out.info.collision ? 1 : 0) + (out.info.departure ? 1 : 0);
  out.feasible = out.cost == 0;

  out.info.parts.dis = ego_.progress - progress_prev;
  out.info.parts.speed = ego_.speed / cfg_.v_max;
  out.info.parts.yaw = std::abs(yaw_rate * cfg_.dt);
  out.info.parts.steering = std::abs(delta) / cfg_.delta_max;
  out.info.parts.term = status_ == Termination::success ? cfg_.r_success
                        : status_ == Termination::departure ? cfg_.r_departure
                                                            : 0.0;
  out.reward = compute_reward(out.info.parts, cfg_);
  out.info.progress = ego_.progress;

  ego_.prev_cmd = {steer_cmd, accel_cmd};
  obs_ = build_observation();
  out.observation = obs_;
  out.status = status_;
  return out;
}

std::array<double, kLidarRays> Environment::lidar_scan() const {
  std::array<double, kLidarRays> out;
  const double range = cfg_.lidar_range;
  const geom::Vec2 origin = ego_.pos;

  // Boundary window: +-75 m of route arc length is enough to cover
  // every boundary point within lidar range of the ego.
  const int n_b = static_cast<int>(boundary_left_.size());
  const int i_lo = std::max(
      0, static_cast<int>((ego_.progress - 75.0) / boundary_step_));
  const int i_hi = std::min(
      n_b - 1, static_cast<int>((ego_.progress + 75.0) / boundary_step_) + 1);

  for (int k = 0; k < kLidarRays; ++k) {
    const double angle = ego_.heading + 2.0 * M_PI * k / kLidarRays;
    const geom::Vec2 dir = geom::unit_from_angle(angle);
    double hit = range;

    for (const auto& ob : traffic_.obstacles) {
      if ((ob.pos - origin).norm() > range + ob.radius) continue;
      if (auto t = geom::ray_circle(origin, dir, ob.pos, ob.radius))
        hit = std::min(hit, *t);
    }
    for (const auto& box : vehicle_boxes_) {
      if ((box.center - origin).norm() > range + box.half_len) continue;
      if (auto t = geom::ray_obb(origin, dir, box)) hit = std::min(hit, *t);
    }
    for (int i = i_lo; i < i_hi; ++i) {
      if (auto t = geom::ray_segment(origin, dir, boundary_left_[i],
                                     boundary_left_[i + 1]))
        hit = std::min(hit, *t);
      if (auto t = geom::ray_segment(origin, dir, boundary_right_[i],
                                     boundary_right_[i + 1]))
        hit = std::min(hit, *t);
    }
    out[k] = std::min(1.0, hit / range);
  }
  return out;
}

Observation Environment::build_observation() const {
  Observation obs{};
  const auto lidar = lidar_scan();
  std::copy(lidar.begin(), lidar.end(), obs.begin());

  const double hw = map_->half_width();
  const Frenet f = map_->project(ego_.pos, route_hint_);
  const double heading_err = geom::wrap_angle(ego_.heading - f.heading);
  const int lane = map_->nearest_lane(f.d);

  int i = kLidarRays;
  obs[i++] = ego_.steering / cfg_.delta_max;
  obs[i++] = heading_err / M_PI;
  obs[i++] = std::clamp(ego_.yaw_rate, -1.0, 1.0);
  obs[i++] = ego_.speed / cfg_.v_max;
  obs[i++] = std::clamp((hw - f.d) / hw, 0.0, 1.0);
  obs[i++] = std::clamp((hw + f.d) / hw, 0.0, 1.0);
  obs[i++] = ego_.prev_cmd[0];
  obs[i++] = ego_.prev_cmd[1];
  obs[i++] = std::clamp((f.d - map_->lane_offset(lane)) / map_->lane_width(),
                        -1.0, 1.0);

  const auto& cps = map_->checkpoints();
  const auto& cpp = map_->checkpoint_positions();
  size_t k0 = 0;
  while (k0 < cps.size() && cps[k0] < ego_.progress - 1e-9) ++k0;
  for (int j = 0; j < kCheckpointSlots; ++j) {
    const size_t idx = k0 + j;
    obs[i + j] = idx < cps.size()
                     ? std::clamp((cpp[idx] - ego_.pos).norm() /
                                      cfg_.checkpoint_norm,
                                  0.0, 1.0)
                     : 0.0;
  }
  return obs;
}

}  // namespace lstc::sim
