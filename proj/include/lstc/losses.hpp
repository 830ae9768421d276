#pragma once

#include <span>
#include <vector>

#include "lstc/mlp.hpp"
#include "lstc/rollout.hpp"

namespace lstc::rl {

// Clipped surrogate for one sample: min(r*A, clip(r,1-e,1+e)*A).
double ppo_surrogate(double ratio, double adv, double clip_eps);
double ppo_surrogate_mean(std::span<const double> ratios,
                          std::span<const double> advs, double clip_eps);

// Gradient of the minimized negative surrogate for one minibatch.
// `b_values` holds the frozen validation scores per buffer step (may be
// empty when lambda_s is pinned to zero). G = A - lambda_l*A_c -
// lambda_s*B; the penalty terms are skipped exactly when their multiplier
// is zero, so the lambda=0 path is bit-identical to plain PPO.
// Returns the minibatch loss. Throws on a non-finite G, naming the index.
double lagrangian_policy_gradient(const nn::Mlp& policy,
                                  const RolloutBuffer& buf,
                                  std::span<const int> idx,
                                  std::span<const double> b_values,
                                  double lambda_l, double lambda_s,
                                  double clip_eps, double entropy_coef,
                                  nn::MlpGrads* grads, int threads);

// The plain clipped-surrogate path (G = A). Same machinery as above with
// both penalties absent.
double ppo_policy_gradient(const nn::Mlp& policy, const RolloutBuffer& buf,
                           std::span<const int> idx, double clip_eps,
                           double entropy_coef, nn::MlpGrads* grads,
                           int threads);

// MSE between net(obs) and target over the minibatch; returns the loss.
double critic_gradient(const nn::Mlp& net, const RolloutBuffer& buf,
                       std::span<const int> idx,
                       std::span<const double> targets, nn::MlpGrads* grads,
                       int threads);

// Hinge loss of the validation net over a window minibatch:
//   mean over feasible windows of max(B, 0)
// + mean over infeasible windows of max(-B, 0).
// Either term vanishes when its class is absent. grads may be null for a
// loss-only evaluation.
double validation_loss(const nn::Mlp& net, const WindowSet& ws,
                       std::span<const int> idx, nn::MlpGrads* grads,
                       int threads);

// B score per window under the (frozen) validation net.
std::vector<double> validation_scores(const nn::Mlp& net, const WindowSet& ws,
                                      int threads);

// mean over all windows of max(B, 0) -- the short-term violation statistic.
double mean_positive_score(std::span<const double> b_values);

}  // namespace lstc::rl
