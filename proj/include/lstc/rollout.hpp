#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "lstc/environment.hpp"
#include "lstc/mlp.hpp"

namespace lstc::rl {

enum class EpisodeEnd {
  success,
  departure,
  timeout,    // environment step limit; bootstrapped
  truncated,  // rollout budget cut the episode; bootstrapped
};

struct EpisodeSpan {
  int begin = 0;
  int end = 0;  // exclusive
  EpisodeEnd kind = EpisodeEnd::truncated;
  double bootstrap_v = 0.0;   // V(s_T) when the end bootstraps
  double bootstrap_vc = 0.0;  // cost critic dito
  double total_reward = 0.0;
  double total_cost = 0.0;

  bool bootstrapped() const {
    return kind == EpisodeEnd::timeout || kind == EpisodeEnd::truncated;
  }
};

// One epoch of on-policy experience. Actions are the pre-clip Gaussian
// samples; log-probs were evaluated at the same points, so the ratio
// pi_new/pi_old is exactly 1 right after a snapshot.
struct RolloutBuffer {
  std::vector<double> obs;      // size * kObsDim
  std::vector<double> actions;  // size * 2
  std::vector<double> logp_old;
  std::vector<double> rewards;
  std::vector<double> costs;
  std::vector<double> v_pred;
  std::vector<double> vc_pred;
  std::vector<std::uint8_t> feasible;
  std::vector<EpisodeSpan> episodes;

  std::vector<double> adv;       // reward advantages (normalized per epoch)
  std::vector<double> adv_cost;  // cost advantages (raw)
  std::vector<double> ret;       // reward return targets
  std::vector<double> ret_cost;  // cost return targets

  int size() const { return static_cast<int>(rewards.size()); }
  std::span<const double> obs_at(int i) const {
    return {obs.data() + static_cast<size_t>(i) * sim::kObsDim, sim::kObsDim};
  }
  std::span<const double> action_at(int i) const {
    return {actions.data() + static_cast<size_t>(i) * 2, 2};
  }
};

// Worker pool of identical environments over a shared map set. Worker w
// of epoch e derives all of its randomness from (seed, e, w), which is
// what makes checkpoint resume replay the exact same experience.
class EnvPool {
 public:
  EnvPool(std::vector<std::shared_ptr<const sim::RoadMap>> maps,
          sim::EnvConfig env_cfg, sim::TrafficConfig traffic_cfg,
          int workers);

  int workers() const { return static_cast<int>(envs_.size()); }
  sim::Environment& env(int w) { return envs_[w]; }
  const std::vector<std::shared_ptr<const sim::RoadMap>>& maps() const {
    return maps_;
  }

 private:
  std::vector<std::shared_ptr<const sim::RoadMap>> maps_;
  std::vector<sim::Environment> envs_;
};

// Collects >= total_steps transitions under the given snapshots,
// deterministically in (seed, epoch). Value predictions for both critics
// are recorded at every visited state.
RolloutBuffer collect_rollout(EnvPool& pool, const nn::Mlp& policy,
                              const nn::Mlp& value, const nn::Mlp& cost_value,
                              int total_steps, std::uint64_t seed,
                              std::uint64_t epoch);

struct GaeEpisode {
  int begin = 0;
  int end = 0;
  bool bootstrapped = false;
  double bootstrap_value = 0.0;
};

// delta_t = x_t + gamma*V(s_{t+1}) - V(s_t); A_t = sum_k (gamma*lambda)^k
// delta_{t+k} within the episode; ret = A + V. Terminal episodes use
// V(s_T)=0, bootstrapped ones use the recorded bootstrap value.
void compute_gae(std::span<const double> x, std::span<const double> pred,
                 double gamma, double lambda,
                 const std::vector<GaeEpisode>& episodes,
                 std::vector<double>* adv, std::vector<double>* ret);

std::vector<GaeEpisode> reward_gae_episodes(const RolloutBuffer& buf);
std::vector<GaeEpisode> cost_gae_episodes(const RolloutBuffer& buf);

// In-place shift/scale to zero mean, unit variance (eps-guarded).
void normalize_advantages(std::vector<double>& adv);

// Flattened (n+1)-observation windows, one per buffer step. A window never
// crosses an episode start; past the episode it repeats the last recorded
// observation. Label: infeasible iff any step in [t, min(t+n, end-1)] has
// nonzero cost.
struct WindowSet {
  int n = 0;
  int width = 0;  // (n+1) * kObsDim
  int count = 0;
  std::vector<double> data;
  std::vector<std::uint8_t> infeasible;

  std::span<const double> window(int i) const {
    return {data.data() + static_cast<size_t>(i) * width,
            static_cast<size_t>(width)};
  }
};

WindowSet extract_windows(const RolloutBuffer& buf, int n);

struct BufferStats {
  double mean_ep_reward = 0.0;
  double mean_ep_cost = 0.0;       // undiscounted
  double mean_disc_cost = 0.0;     // discounted from episode starts
  double success_rate = 0.0;
  double feasible_rate = 0.0;
  int completed_episodes = 0;
};

BufferStats buffer_stats(const RolloutBuffer& buf, double gamma);

}  // namespace lstc::rl
