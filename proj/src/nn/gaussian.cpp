#include "lstc/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lstc::nn {

namespace {
const double kLog2Pi = std::log(2.0 * std::numbers::pi);
}

double gaussian_log_prob(std::span<const double> mean,
                         std::span<const double> log_std,
                         std::span<const double> sample) {
  if (mean.size() != log_std.size() || mean.size() != sample.size())
    throw std::invalid_argument("gaussian_log_prob: size mismatch");
  double lp = -0.5 * kLog2Pi * static_cast<double>(mean.size());
  for (size_t i = 0; i < mean.size(); ++i) {
    const double z = (sample[i] - mean[i]) / std::exp(log_std[i]);
    lp += -0.5 * z * z - log_std[i];
  }
  return lp;
}

GaussianAction gaussian_sample(std::span<const double> mean,
                               std::span<const double> log_std, Rng& rng) {
  GaussianAction out{};
  for (int i = 0; i < kActionDim; ++i) {
    out.mean[i] = mean[i];
    out.log_std[i] = log_std[i];
    const double z = rng.normal();
    out.pre_clip[i] = mean[i] + std::exp(log_std[i]) * z;
    out.action[i] = std::clamp(out.pre_clip[i], -1.0, 1.0);
  }
  out.log_prob = gaussian_log_prob(mean, log_std, out.pre_clip);
  return out;
}

GaussianAction gaussian_mean_action(std::span<const double> mean,
                                    std::span<const double> log_std) {
  GaussianAction out{};
  for (int i = 0; i < kActionDim; ++i) {
    out.mean[i] = mean[i];
    out.log_std[i] = log_std[i];
    out.pre_clip[i] = mean[i];
    out.action[i] = std::clamp(mean[i], -1.0, 1.0);
  }
  out.log_prob = gaussian_log_prob(mean, log_std, out.pre_clip);
  return out;
}

}  // namespace lstc::nn
