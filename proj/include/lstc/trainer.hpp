#pragma once

#include <memory>
#include <vector>

#include "lstc/config.hpp"
#include "lstc/lagrange.hpp"
#include "lstc/losses.hpp"
#include "lstc/mlp.hpp"
#include "lstc/rollout.hpp"

namespace lstc::rl {

struct EpochReport {
  long epoch = 0;  // 1-based
  long steps = 0;  // cumulative environment steps
  double ep_reward = 0.0;
  double ep_cost = 0.0;
  double disc_cost = 0.0;  // C-hat, discounted from episode starts
  double success_rate = 0.0;
  double feasible_rate = 0.0;
  double b_plus = 0.0;  // pre-update short-term violation statistic
  double lambda_l = 0.0;
  double lambda_s = 0.0;
  double loss_pi = 0.0;
  double loss_v = 0.0;
  double loss_vc = 0.0;
  double loss_b = 0.0;
};

// Dual-constraint PPO trainer. One train_epoch() call runs: rollout, GAE
// for reward and cost, window extraction, multiplier update, validation-net
// update, then clipped policy/critic updates with the validation net
// frozen. Modes: lstc (both constraints), ppo-lag (long-term only), ppo
// (both multipliers pinned to zero).
class Trainer {
 public:
  explicit Trainer(const RunConfig& cfg);

  EpochReport train_epoch();
  bool done() const { return steps_done_ >= cfg_.total_steps; }

  long epoch() const { return epoch_; }
  long steps_done() const { return steps_done_; }
  const RunConfig& config() const { return cfg_; }

  nn::Mlp& policy() { return policy_; }
  nn::Mlp& value() { return value_; }
  nn::Mlp& cost_value() { return cost_value_; }
  nn::Mlp& validation() { return validation_; }
  const nn::Mlp& policy() const { return policy_; }
  LagrangeState& lagrange() { return lagrange_; }

  // Used by checkpoint restore.
  void set_progress(long epoch, long steps) {
    epoch_ = epoch;
    steps_done_ = steps;
  }

  const std::vector<std::shared_ptr<const sim::RoadMap>>& maps() const {
    return maps_;
  }

 private:
  RunConfig cfg_;
  std::vector<std::shared_ptr<const sim::RoadMap>> maps_;
  std::unique_ptr<EnvPool> pool_;
  nn::Mlp policy_, value_, cost_value_, validation_;
  LagrangeState lagrange_;
  long epoch_ = 0;
  long steps_done_ = 0;
};

// The training map set for a config (map.seed + index per map).
std::vector<std::shared_ptr<const sim::RoadMap>> build_training_maps(
    const RunConfig& cfg);
std::vector<std::shared_ptr<const sim::RoadMap>> build_eval_maps(
    const RunConfig& cfg);

}  // namespace lstc::rl
