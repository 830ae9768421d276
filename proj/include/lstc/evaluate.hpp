#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lstc/environment.hpp"
#include "lstc/mlp.hpp"

namespace lstc::rl {

struct EpisodeRecord {
  int repeat = 0;
  int episode = 0;
  int map_index = 0;
  int steps = 0;
  double reward = 0.0;
  double cost = 0.0;
  bool success = false;
  double feasible_rate = 0.0;
};

// Group protocol: `group_size` episodes form a group, `repeats` groups are
// run; the summary is mean and (population) std over the group means.
struct EvalSummary {
  int group_size = 0;
  int repeats = 0;
  double success_mean = 0.0, success_std = 0.0;
  double cost_mean = 0.0, cost_std = 0.0;
  double reward_mean = 0.0, reward_std = 0.0;
  double feasible_mean = 0.0, feasible_std = 0.0;
  std::vector<EpisodeRecord> episodes;
};

// Frozen-policy evaluation with the Gaussian mean action (no sampling).
// The policy is untouched; maps are picked per episode from `maps`.
EvalSummary evaluate(const nn::Mlp& policy,
                     const std::vector<std::shared_ptr<const sim::RoadMap>>& maps,
                     const sim::EnvConfig& env_cfg,
                     const sim::TrafficConfig& traffic_cfg, int group_size,
                     int repeats, std::uint64_t seed);

// Recomputes the summary from the per-episode records (same aggregation).
EvalSummary aggregate_records(const std::vector<EpisodeRecord>& records,
                              int group_size, int repeats);

std::string summary_table(const EvalSummary& s);
void write_summary_csv(const EvalSummary& s, const std::string& path);

// One CSV per episode: per-step pose, speed, action, reward, cost and
// collision/departure flags. Returns the written paths.
std::vector<std::string> export_trajectories(
    const nn::Mlp& policy, std::shared_ptr<const sim::RoadMap> map,
    const sim::EnvConfig& env_cfg, const sim::TrafficConfig& traffic_cfg,
    int episodes, std::uint64_t seed, const std::string& out_dir);

}  // namespace lstc::rl
