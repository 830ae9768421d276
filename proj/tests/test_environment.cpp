#include <doctest.h>

#include <cmath>
#include <memory>

#include "lstc/environment.hpp"

using namespace lstc;
using namespace lstc::sim;

namespace {

std::shared_ptr<const RoadMap> make_road(const std::string& plan,
                                         double lane_width = 3.5) {
  MapConfig cfg;
  cfg.plan = plan;
  cfg.lane_width = lane_width;
  return std::make_shared<const RoadMap>(build_map(cfg, 0));
}

TrafficConfig no_traffic() {
  TrafficConfig t;
  t.density = 0.0;
  t.accident_prob = 0.0;
  return t;
}

}  // namespace

TEST_CASE("zero steering on a straight road keeps the heading") {
  Environment env(make_road("straight:300"), EnvConfig{}, no_traffic());
  env.reset(1);
  const double h0 = env.ego().heading;
  env.step({0.0, 0.5});
  CHECK(env.ego().heading == h0);
}

TEST_CASE("bicycle yaw rate: v=10, delta=0.1 -> (10/2.5)*tan(0.1)") {
  EnvConfig cfg;
  Environment env(make_road("straight:300"), cfg, no_traffic());
  env.reset(1);
  env.set_ego_pose(env.ego().pos, env.ego().heading, 10.0);
  const double steer_cmd = 0.1 / cfg.delta_max;
  env.step({steer_cmd, 0.0});
  CHECK(env.ego().yaw_rate ==
        doctest::Approx((10.0 / 2.5) * std::tan(0.1)).epsilon(1e-12));
  CHECK(env.ego().yaw_rate == doctest::Approx(0.40134).epsilon(1e-4));
}

TEST_CASE("coasting: zero accel and steering keep speed and heading") {
  Environment env(make_road("straight:300"), EnvConfig{}, no_traffic());
  env.reset(1);
  env.set_ego_pose(env.ego().pos, env.ego().heading, 7.0);
  const double h0 = env.ego().heading;
  for (int i = 0; i < 20; ++i) env.step({0.0, 0.0});
  CHECK(env.ego().speed == 7.0);
  CHECK(env.ego().heading == h0);
}

TEST_CASE("overlapping an obstacle costs 1 and does not terminate") {
  Environment env(make_road("straight:300"), EnvConfig{}, no_traffic());
  env.reset(1);
  TrafficState t;
  const auto ego = env.ego();
  t.obstacles.push_back({ego.pos + geom::Vec2{3.0, 0.0}, 0.6, 1, ego.progress + 3.0});
  env.set_traffic(std::move(t));
  const StepOutcome out = env.step({0.0, 1.0});  // drive into it
  // after one step at a=3: v=0.3, moves 0; second step approaches
  CHECK(out.cost == (out.info.collision ? 1 : 0));
  Environment env2(make_road("straight:300"), EnvConfig{}, no_traffic());
  env2.reset(1);
  TrafficState t2;
  t2.obstacles.push_back({env2.ego().pos, 0.6, 1, env2.ego().progress});
  env2.set_traffic(std::move(t2));  // overlap right away
  const StepOutcome hit = env2.step({0.0, 0.0});
  CHECK(hit.info.collision);
  CHECK(hit.cost == 1);
  CHECK_FALSE(hit.feasible);
  CHECK(hit.status == Termination::running);  // collisions do not terminate
}

TEST_CASE("lane departure terminates with -5 and cost 1") {
  EnvConfig cfg;
  Environment env(make_road("straight:300"), cfg, no_traffic());
  env.reset(1);
  // place the ego just inside the left boundary, moving fast outward
  const auto& map = env.map();
  const geom::Vec2 p = map.point_at(50.0) +
                       geom::unit_from_angle(map.heading_at(50.0)).perp() * 5.0;
  env.set_ego_pose(p, map.heading_at(50.0) + 0.8, 10.0);
  StepOutcome out = env.step({0.0, 0.0});
  int guard = 0;
  while (out.status == Termination::running && ++guard < 10)
    out = env.step({0.0, 0.0});
  CHECK(out.status == Termination::departure);
  CHECK(out.info.departure);
  CHECK(out.cost >= 1);
  CHECK_FALSE(out.feasible);
  CHECK(out.info.parts.term == -5.0);
  CHECK_THROWS_AS(env.step({0.0, 0.0}), std::logic_error);
}

TEST_CASE("reaching the destination is a success with +10") {
  EnvConfig cfg;
  cfg.spawn_s = 5.0;
  Environment env(make_road("straight:60"), cfg, no_traffic());
  env.reset(1);
  StepOutcome out = env.step({0.0, 1.0});
  int guard = 0;
  while (out.status == Termination::running && ++guard < 500)
    out = env.step({0.0, 1.0});
  CHECK(out.status == Termination::success);
  CHECK(out.info.parts.term == 10.0);
  CHECK(out.cost == 0);
}

TEST_CASE("max steps terminates the episode") {
  EnvConfig cfg;
  cfg.max_episode_steps = 25;
  Environment env(make_road("straight:300"), cfg, no_traffic());
  env.reset(1);
  StepOutcome out = env.step({0.0, 0.0});
  while (out.status == Termination::running) out = env.step({0.0, 0.0});
  CHECK(env.step_count() == 25);
  CHECK(out.status == Termination::max_steps);
}

TEST_CASE("compute_reward: paper coefficients") {
  EnvConfig cfg;
  RewardParts parts;
  parts.dis = 0.5;
  parts.speed = 0.5;  // 40 km/h of 80
  parts.yaw = 0.0;
  parts.steering = 0.0;
  parts.term = 0.0;
  CHECK(compute_reward(parts, cfg) == doctest::Approx(0.55).epsilon(1e-12));
  parts.term = 10.0;
  CHECK(compute_reward(parts, cfg) == doctest::Approx(10.55).epsilon(1e-12));
}

TEST_CASE("reward decomposition matches the returned reward") {
  Environment env(make_road("straight:120 | arc:60:0.8"), EnvConfig{},
                  no_traffic());
  env.reset(3);
  Rng rng(9);
  while (env.status() == Termination::running && env.step_count() < 200) {
    const Action a{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const StepOutcome out = env.step(a);
    const double recomposed = compute_reward(out.info.parts, env.config());
    CHECK(out.reward == doctest::Approx(recomposed).epsilon(1e-12));
  }
}

TEST_CASE("lidar: open world reads 1 everywhere") {
  // a very wide road pushes the boundaries outside lidar range
  Environment env(make_road("straight:300", 40.0), EnvConfig{}, no_traffic());
  env.reset(1);
  env.set_ego_pose(env.map().point_at(150.0), 0.0, 0.0);
  for (double v : env.lidar_scan()) CHECK(v == 1.0);
}

TEST_CASE("lidar: disc 10 m dead ahead reads 9/50") {
  Environment env(make_road("straight:300", 40.0), EnvConfig{}, no_traffic());
  env.reset(1);
  const auto ego = env.ego();
  TrafficState t;
  t.obstacles.push_back(
      {ego.pos + geom::unit_from_angle(ego.heading) * 10.0, 1.0, 1, 0.0});
  env.set_traffic(std::move(t));
  const auto scan = env.lidar_scan();
  CHECK(scan[0] == doctest::Approx(0.18).epsilon(1e-12));
}

TEST_CASE("lidar: rotating the ego by one ray spacing permutes readings") {
  Environment env(make_road("straight:400"), EnvConfig{}, no_traffic());
  env.reset(1);
  TrafficState t;
  const geom::Vec2 c = env.map().point_at(200.0);
  t.obstacles.push_back({c + geom::Vec2{12.0, 2.0}, 0.8, 1, 0.0});
  t.obstacles.push_back({c + geom::Vec2{-7.0, -1.0}, 0.5, 1, 0.0});
  t.obstacles.push_back({c + geom::Vec2{3.0, 6.0}, 1.1, 1, 0.0});
  env.set_traffic(t);

  env.set_ego_pose(c, 0.3, 0.0);
  const auto base = env.lidar_scan();
  env.set_ego_pose(c, 0.3 + 2.0 * M_PI / kLidarRays, 0.0);
  const auto rotated = env.lidar_scan();
  for (int k = 0; k < kLidarRays; ++k)
    CHECK(rotated[k] == doctest::Approx(base[(k + 1) % kLidarRays]).epsilon(1e-9));
}

TEST_CASE("lidar: shrinking an obstacle never decreases a reading") {
  Environment env(make_road("straight:300"), EnvConfig{}, no_traffic());
  env.reset(1);
  const geom::Vec2 c = env.map().point_at(100.0);
  env.set_ego_pose(c, 0.15, 0.0);
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    TrafficState big;
    TrafficState small;
    for (int i = 0; i < 4; ++i) {
      const geom::Vec2 pos =
          c + geom::Vec2{rng.uniform(-30, 30), rng.uniform(-4, 4)};
      const double r = rng.uniform(0.5, 2.0);
      big.obstacles.push_back({pos, r, 1, 0.0});
      small.obstacles.push_back({pos, r * 0.5, 1, 0.0});
    }
    env.set_traffic(big);
    const auto scan_big = env.lidar_scan();
    env.set_traffic(small);
    const auto scan_small = env.lidar_scan();
    for (int k = 0; k < kLidarRays; ++k) {
      CHECK(scan_small[k] >= scan_big[k] - 1e-12);
      CHECK(scan_big[k] >= 0.0);
      CHECK(scan_big[k] <= 1.0);
    }
  }
}

TEST_CASE("observation: 49 slots, fresh spawn block, bounds") {
  Environment env(make_road("straight:400"), EnvConfig{}, no_traffic());
  const Observation& obs = env.reset(1);
  REQUIRE(obs.size() == 49u);
  // ego block: [steering, heading_err, yaw_rate, v, d_left, d_right,
  //             prev_steer, prev_accel, lane_offset]
  CHECK(obs[30] == 0.0);
  CHECK(obs[31] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(obs[32] == 0.0);
  CHECK(obs[33] == 0.0);
  CHECK(obs[34] == doctest::Approx(1.0));  // centered: d_L == d_R
  CHECK(obs[35] == doctest::Approx(1.0));
  CHECK(obs[36] == 0.0);
  CHECK(obs[37] == 0.0);
  CHECK(obs[38] == doctest::Approx(0.0).epsilon(1e-9));

  // all slots bounded across a random episode
  Rng rng(5);
  while (env.status() == Termination::running && env.step_count() < 300) {
    const StepOutcome out = env.step({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    for (double v : out.observation) {
      CHECK(std::isfinite(v));
      CHECK(v >= -1.0 - 1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("observation: checkpoint slots") {
  EnvConfig cfg;
  cfg.spawn_s = 50.0;  // exactly on checkpoint 0
  Environment env(make_road("straight:400"), cfg, no_traffic());
  const Observation& obs = env.reset(1);
  CHECK(obs[39] == doctest::Approx(0.0).epsilon(1e-9));  // at checkpoint
  // straight road: the next slots are 50/500, 100/500, ...
  CHECK(obs[40] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(obs[41] == doctest::Approx(0.2).epsilon(1e-6));
  // 400 m road has 8 checkpoints; slots past the destination read 0
  CHECK(obs[46] == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(obs[47] == doctest::Approx(0.0));
  CHECK(obs[48] == doctest::Approx(0.0));
}

TEST_CASE("populate_traffic: empty when density and accident prob are zero") {
  const auto map = make_road("straight:1000");
  Rng rng(1);
  const TrafficState t = populate_traffic(*map, no_traffic(), 5.0, 1, rng);
  CHECK(t.vehicles.empty());
  CHECK(t.obstacles.empty());
}

TEST_CASE("populate_traffic: Poisson counts hit the configured density") {
  const auto map = make_road("straight:1000");
  TrafficConfig cfg;
  cfg.density = 12.0;
  cfg.accident_prob = 0.0;
  long total = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(mix_seed(77, s));
    total += static_cast<long>(populate_traffic(*map, cfg, 5.0, 1, rng).vehicles.size());
  }
  const double mean = static_cast<double>(total) / seeds;
  // E = 12 veh/km/lane * 1 km * 3 lanes = 36, sigma_mean = 6/sqrt(1000)
  const double sigma_mean = 6.0 / std::sqrt(static_cast<double>(seeds));
  CHECK(std::abs(mean - 36.0) < 3.0 * sigma_mean);
}

TEST_CASE("populate_traffic: deterministic under a fixed seed") {
  const auto map = make_road("straight:800");
  TrafficConfig cfg;
  Rng r1(42), r2(42);
  const TrafficState a = populate_traffic(*map, cfg, 5.0, 1, r1);
  const TrafficState b = populate_traffic(*map, cfg, 5.0, 1, r2);
  REQUIRE(a.vehicles.size() == b.vehicles.size());
  for (size_t i = 0; i < a.vehicles.size(); ++i) {
    CHECK(a.vehicles[i].s == b.vehicles[i].s);
    CHECK(a.vehicles[i].lane == b.vehicles[i].lane);
  }
  REQUIRE(a.obstacles.size() == b.obstacles.size());
  for (size_t i = 0; i < a.obstacles.size(); ++i) {
    CHECK(a.obstacles[i].pos.x == b.obstacles[i].pos.x);
    CHECK(a.obstacles[i].radius == b.obstacles[i].radius);
  }
  CHECK(!a.obstacles.empty());  // accident_prob 0.8 on one long segment
}

TEST_CASE("populate_traffic: nothing overlaps the ego spawn") {
  const auto map = make_road("straight:500");
  TrafficConfig cfg;
  cfg.density = 60.0;  // crowd the road
  for (int s = 0; s < 50; ++s) {
    Rng rng(mix_seed(3, s));
    const TrafficState t = populate_traffic(*map, cfg, 5.0, 1, rng);
    const geom::Vec2 spawn = map->lane_point(5.0, 1);
    for (const auto& v : t.vehicles) {
      geom::Obb box{map->lane_point(v.s, v.lane), map->heading_at(v.s),
                    cfg.vehicle_half_len, cfg.vehicle_half_wid};
      CHECK_FALSE(geom::disc_overlaps_obb(spawn, 1.0, box));
    }
    for (const auto& o : t.obstacles)
      CHECK_FALSE(geom::disc_overlaps_disc(spawn, 1.0, o.pos, o.radius));
  }
}

TEST_CASE("episodes are deterministic given seed and actions") {
  const auto map = make_road("straight:200 | arc:80:0.7 | straight:100");
  TrafficConfig traffic;  // full traffic
  Environment a(map, EnvConfig{}, traffic);
  Environment b(map, EnvConfig{}, traffic);
  a.reset(99);
  b.reset(99);
  Rng rng(1);
  for (int i = 0; i < 150 && a.status() == Termination::running; ++i) {
    const Action act{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const StepOutcome oa = a.step(act);
    const StepOutcome ob = b.step(act);
    CHECK(oa.reward == ob.reward);
    CHECK(oa.cost == ob.cost);
    CHECK(oa.observation == ob.observation);
    if (oa.status != Termination::running) break;
  }
}

TEST_CASE("traffic gap keeping: brake behind an in-lane blocker") {
  const auto map = make_road("straight:400");
  TrafficConfig cfg;
  cfg.density = 0.0;
  cfg.accident_prob = 0.0;
  Environment env(map, EnvConfig{}, cfg);
  env.reset(1);
  TrafficState t;
  t.vehicles.push_back({0, 50.0, cfg.speed, true});  // blocked by the obstacle
  t.vehicles.push_back({2, 50.0, cfg.speed, true});  // free lane
  t.obstacles.push_back({map->lane_point(58.0, 0), 0.5, 0, 58.0});
  env.set_traffic(std::move(t));
  env.step({0.0, 0.0});
  const auto& vehicles = env.traffic().vehicles;
  // one step: blocked vehicle sheds decel*dt, free vehicle stays at target
  CHECK(vehicles[0].speed ==
        doctest::Approx(cfg.speed - cfg.decel * 0.1).epsilon(1e-12));
  CHECK(vehicles[1].speed == doctest::Approx(cfg.speed));
  CHECK(vehicles[1].s == doctest::Approx(50.0 + cfg.speed * 0.1));
}
