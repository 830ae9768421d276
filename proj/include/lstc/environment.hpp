#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "lstc/geometry.hpp"
#include "lstc/rng.hpp"
#include "lstc/road_map.hpp"

namespace lstc::sim {

inline constexpr int kLidarRays = 30;
inline constexpr int kEgoBlock = 9;
inline constexpr int kCheckpointSlots = 10;
inline constexpr int kObsDim = kLidarRays + kEgoBlock + kCheckpointSlots;  // 49

using Observation = std::array<double, kObsDim>;
using Action = std::array<double, 2>;  // [steer_cmd, accel_cmd] in [-1,1]

struct EnvConfig {
  double dt = 0.1;
  double v_max = 80.0 / 3.6;  // 80 km/h
  double delta_max = 0.6;
  double wheelbase = 2.5;
  double ego_radius = 1.0;
  double accel_min = -5.0;
  double accel_max = 3.0;
  int max_episode_steps = 1000;
  double lidar_range = 50.0;
  double checkpoint_norm = 500.0;
  double spawn_s = 5.0;
  // Reward: R = c_dis*R_dis + c_speed*R_speed + c_yaw*R_yaw
  //           + c_steering*R_steering + R_term
  double c_dis = 1.0;
  double c_speed = 0.1;
  double c_yaw = -0.4;
  double c_steering = -0.4;
  double r_success = 10.0;
  double r_departure = -5.0;
};

struct TrafficConfig {
  double density = 12.0;  // vehicles per km per lane
  double speed = 30.0 / 3.6;
  double accident_prob = 0.8;  // obstacle cluster probability per segment
  double gap_follow = 10.0;    // brake when an agent is this close ahead
  double decel = 3.0;
  double accel = 2.0;
  double vehicle_half_len = 2.25;
  double vehicle_half_wid = 0.95;
  double spawn_clearance = 25.0;
  double obstacle_radius_min = 0.4;
  double obstacle_radius_max = 0.8;
};

struct TrafficVehicle {
  int lane = 0;
  double s = 0.0;
  double speed = 0.0;
  bool active = true;
};

struct Obstacle {
  geom::Vec2 pos;
  double radius = 0.5;
  int lane = 0;
  double s = 0.0;
};

struct TrafficState {
  std::vector<TrafficVehicle> vehicles;
  std::vector<Obstacle> obstacles;
};

// Lane-following vehicles (Poisson count per lane) plus obstacle clusters
// per road segment with probability accident_prob. Nothing is placed
// overlapping the ego spawn.
TrafficState populate_traffic(const RoadMap& map, const TrafficConfig& cfg,
                              double ego_spawn_s, int ego_lane, Rng& rng);

enum class Termination { running, success, departure, max_steps };
const char* to_string(Termination t);

struct RewardParts {
  double dis = 0.0;       // longitudinal route progress this step (m)
  double speed = 0.0;     // v/v_max
  double yaw = 0.0;       // |heading change| (rad)
  double steering = 0.0;  // |steering angle| / delta_max
  double term = 0.0;      // +10 success, -5 departure, else 0
};

double compute_reward(const RewardParts& parts, const EnvConfig& cfg);

struct StepInfo {
  bool collision = false;
  bool departure = false;
  double progress = 0.0;
  RewardParts parts;
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  int cost = 0;  // 0..2: collision and departure can coincide
  bool feasible = true;
  Termination status = Termination::running;
  StepInfo info;
};

struct EgoState {
  geom::Vec2 pos;
  double heading = 0.0;
  double speed = 0.0;
  double steering = 0.0;  // current steering angle (rad)
  double yaw_rate = 0.0;  // heading change of the last step / dt
  double progress = 0.0;  // route arc length
  double lateral = 0.0;   // signed offset from the road center
  Action prev_cmd{0.0, 0.0};
};

// Deterministic 2D driving episode: kinematic-bicycle ego on a lane road
// with lane-following traffic and static obstacle clusters.
//
// Per step, with pre-step speed v and heading psi:
//   delta     = steer_cmd * delta_max
//   a         = accel_cmd >= 0 ? accel_cmd * accel_max
//                              : -accel_cmd * accel_min
//   yaw_rate  = (v / wheelbase) * tan(delta)
//   psi'      = psi + yaw_rate * dt
//   pos'      = pos + v * dt * (cos psi, sin psi)
//   v'        = clamp(v + a * dt, 0, v_max)
class Environment {
 public:
  Environment(std::shared_ptr<const RoadMap> map, EnvConfig cfg,
              TrafficConfig traffic_cfg);

  // Starts a new episode; same seed gives the same episode.
  const Observation& reset(std::uint64_t seed);
  // Advances one step. Throws std::logic_error on a finished episode.
  StepOutcome step(const Action& action);

  std::array<double, kLidarRays> lidar_scan() const;
  Observation build_observation() const;

  Termination status() const { return status_; }
  const EgoState& ego() const { return ego_; }
  const RoadMap& map() const { return *map_; }
  const EnvConfig& config() const { return cfg_; }
  const TrafficState& traffic() const { return traffic_; }
  int step_count() const { return step_count_; }
  const Observation& observation() const { return obs_; }

  // Test hooks: replace traffic with a hand-built scene / teleport the ego.
  void set_traffic(TrafficState t);
  void set_ego_pose(geom::Vec2 pos, double heading, double speed = 0.0);
  // Swap the road for the next episode (takes effect immediately; call
  // before reset).
  void set_map(std::shared_ptr<const RoadMap> map);

 private:
  void rebuild_boundaries();
  void update_traffic();
  void rebuild_vehicle_boxes();
  bool check_collision() const;

  std::shared_ptr<const RoadMap> map_;
  EnvConfig cfg_;
  TrafficConfig traffic_cfg_;
  TrafficState traffic_;
  std::vector<geom::Obb> vehicle_boxes_;
  // Side boundaries sampled for the lidar, ~5 m resolution.
  std::vector<geom::Vec2> boundary_left_;
  std::vector<geom::Vec2> boundary_right_;
  double boundary_step_ = 5.0;

  EgoState ego_;
  Termination status_ = Termination::running;
  int step_count_ = 0;
  int route_hint_ = 0;
  Observation obs_{};
  int ego_lane_ = 0;
};

}  // namespace lstc::sim
