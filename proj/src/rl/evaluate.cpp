#include "lstc/evaluate.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lstc/gaussian.hpp"

namespace lstc::rl {

namespace {

EpisodeRecord run_episode(sim::Environment& env, const nn::Mlp& policy,
                          std::uint64_t episode_seed) {
  EpisodeRecord rec;
  sim::Observation obs = env.reset(episode_seed);
  nn::ForwardCache cache = nn::make_cache(policy);
  int feasible = 0;
  while (env.status() == sim::Termination::running) {
    nn::mlp_forward_cached(policy, obs, cache);
    const nn::GaussianAction ga =
        nn::gaussian_mean_action(cache.act.back(), *policy.log_std);
    const sim::StepOutcome out = env.step({ga.action[0], ga.action[1]});
    rec.reward += out.reward;
    rec.cost += out.cost;
    feasible += out.feasible ? 1 : 0;
    rec.steps += 1;
    obs = out.observation;
  }
  rec.success = env.status() == sim::Termination::success;
  rec.feasible_rate =
      rec.steps > 0 ? static_cast<double>(feasible) / rec.steps : 1.0;
  return rec;
}

void mean_std(const std::vector<double>& xs, double* mean, double* std_out) {
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - m) * (x - m);
  var /= static_cast<double>(xs.size());
  *mean = m;
  *std_out = std::sqrt(std::max(0.0, var));
}

}  // namespace

EvalSummary aggregate_records(const std::vector<EpisodeRecord>& records,
                              int group_size, int repeats) {
  if (static_cast<int>(records.size()) != group_size * repeats)
    throw std::invalid_argument("aggregate_records: record count mismatch");
  std::vector<double> g_success, g_cost, g_reward, g_feasible;
  for (int r = 0; r < repeats; ++r) {
    double s = 0, c = 0, w = 0, f = 0;
    for (int i = 0; i < group_size; ++i) {
      const auto& rec = records[static_cast<size_t>(r) * group_size + i];
      s += rec.success ? 1.0 : 0.0;
      c += rec.cost;
      w += rec.reward;
      f += rec.feasible_rate;
    }
    g_success.push_back(s / group_size);
    g_cost.push_back(c / group_size);
    g_reward.push_back(w / group_size);
    g_feasible.push_back(f / group_size);
  }
  EvalSummary out;
  out.group_size = group_size;
  out.repeats = repeats;
  out.episodes = records;
  mean_std(g_success, &out.success_mean, &out.success_std);
  mean_std(g_cost, &out.cost_mean, &out.cost_std);
  mean_std(g_reward, &out.reward_mean, &out.reward_std);
  mean_std(g_feasible, &out.feasible_mean, &out.feasible_std);
  return out;
}

EvalSummary evaluate(const nn::Mlp& policy,
                     const std::vector<std::shared_ptr<const sim::RoadMap>>& maps,
                     const sim::EnvConfig& env_cfg,
                     const sim::TrafficConfig& traffic_cfg, int group_size,
                     int repeats, std::uint64_t seed) {
  if (maps.empty()) throw std::invalid_argument("evaluate: no maps");
  if (group_size < 1 || repeats < 1)
    throw std::invalid_argument("evaluate: group_size and repeats must be >= 1");
  sim::Environment env(maps.front(), env_cfg, traffic_cfg);
  std::vector<EpisodeRecord> records;
  for (int r = 0; r < repeats; ++r) {
    for (int i = 0; i < group_size; ++i) {
      const std::uint64_t ep_key = mix_seed(seed, r, i);
      const int map_index = static_cast<int>(ep_key % maps.size());
      env.set_map(maps[map_index]);
      EpisodeRecord rec = run_episode(env, policy, ep_key);
      rec.repeat = r;
      rec.episode = i;
      rec.map_index = map_index;
      records.push_back(rec);
    }
  }
  return aggregate_records(records, group_size, repeats);
}

std::string summary_table(const EvalSummary& s) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "metric              mean      std\n"
                "success rate      %7.3f  %7.3f\n"
                "episode cost      %7.3f  %7.3f\n"
                "episode reward    %7.3f  %7.3f\n"
                "feasible rate     %7.3f  %7.3f\n"
                "(%d episodes: %d groups of %d)\n",
                s.success_mean, s.success_std, s.cost_mean, s.cost_std,
                s.reward_mean, s.reward_std, s.feasible_mean, s.feasible_std,
                s.group_size * s.repeats, s.repeats, s.group_size);
  return buf;
}

void write_summary_csv(const EvalSummary& s, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write eval csv: " + path);
  out << "repeat,episode,map_index,steps,reward,cost,success,feasible_rate\n";
  char buf[256];
  for (const auto& r : s.episodes) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g,%.17g,%d,%.17g\n",
                  r.repeat, r.episode, r.map_index, r.steps, r.reward, r.cost,
                  r.success ? 1 : 0, r.feasible_rate);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf),
                "# summary,success,%.17g,%.17g,cost,%.17g,%.17g,reward,%.17g,"
                "%.17g,feasible,%.17g,%.17g\n",
                s.success_mean, s.success_std, s.cost_mean, s.cost_std,
                s.reward_mean, s.reward_std, s.feasible_mean, s.feasible_std);
  out << buf;
}

std::vector<std::string> export_trajectories(
    const nn::Mlp& policy, std::shared_ptr<const sim::RoadMap> map,
    const sim::EnvConfig& env_cfg, const sim::TrafficConfig& traffic_cfg,
    int episodes, std::uint64_t seed, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  sim::Environment env(std::move(map), env_cfg, traffic_cfg);
  nn::ForwardCache cache = nn::make_cache(policy);
  std::vector<std::string> paths;
  for (int e = 0; e < episodes; ++e) {
    const std::string path =
        (fs::path(out_dir) / ("trajectory_" + std::to_string(e) + ".csv"))
            .string();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write trajectory: " + path);
    out << "t,x,y,heading,speed,steer_cmd,accel_cmd,reward,cost,collision,"
           "departure,progress\n";
    sim::Observation obs = env.reset(mix_seed(seed, 0xeb, e));
    int t = 0;
    char buf[512];
    while (env.status() == sim::Termination::running) {
      nn::mlp_forward_cached(policy, obs, cache);
      const nn::GaussianAction ga =
          nn::gaussian_mean_action(cache.act.back(), *policy.log_std);
      const sim::StepOutcome stepped = env.step({ga.action[0], ga.action[1]});
      const auto& ego = env.ego();
      std::snprintf(buf, sizeof(buf),
                    "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d,"
                    "%.17g\n",
                    t, ego.pos.x, ego.pos.y, ego.heading, ego.speed,
                    ga.action[0], ga.action[1], stepped.reward, stepped.cost,
                    stepped.info.collision ? 1 : 0,
                    stepped.info.departure ? 1 : 0, stepped.info.progress);
      out << buf;
      obs = stepped.observation;
      ++t;
    }
    paths.push_back(path);
  }
  return paths;
}

}  // namespace lstc::rl
