#pragma once

#include <array>
#include <span>

#include "lstc/rng.hpp"

namespace lstc::nn {

inline constexpr int kActionDim = 2;

// One sampled action from the diagonal-Gaussian policy head. The log
// probability is the density at the pre-clip sample; `action` is what the
// environment receives after clipping to [-1, 1].
struct GaussianAction {
  std::array<double, kActionDim> mean;
  std::array<double, kActionDim> log_std;
  std::array<double, kActionDim> pre_clip;
  std::array<double, kActionDim> action;
  double log_prob;
};

double gaussian_log_prob(std::span<const double> mean,
                         std::span<const double> log_std,
                         std::span<const double> sample);

GaussianAction gaussian_sample(std::span<const double> mean,
                               std::span<const double> log_std, Rng& rng);

// Deterministic variant used for evaluation: action = clip(mean).
GaussianAction gaussian_mean_action(std::span<const double> mean,
                                    std::span<const double> log_std);

}  // namespace lstc::nn
