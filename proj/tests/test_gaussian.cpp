#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lstc/gaussian.hpp"

using namespace lstc;
using nn::GaussianAction;

TEST_CASE("density at the mean: logp = -sum(log_std) - log(2*pi)") {
  const std::vector<double> mean{0.3, -0.2};
  const std::vector<double> log_std{-0.5, 0.25};
  const GaussianAction a = nn::gaussian_mean_action(mean, log_std);
  const double want = -(-0.5 + 0.25) - std::log(2.0 * std::numbers::pi);
  CHECK(a.log_prob == doctest::Approx(want).epsilon(1e-14));
  CHECK(a.action[0] == 0.3);
  CHECK(a.action[1] == -0.2);
}

TEST_CASE("unit gaussian at sample [1,1]: logp = -1 - log(2*pi)") {
  const std::vector<double> mean{0.0, 0.0};
  const std::vector<double> log_std{0.0, 0.0};
  const std::vector<double> sample{1.0, 1.0};
  const double lp = nn::gaussian_log_prob(mean, log_std, sample);
  CHECK(lp == doctest::Approx(-1.0 - std::log(2.0 * std::numbers::pi))
                  .epsilon(1e-14));
}

TEST_CASE("sampling is deterministic under a fixed seed and stays clipped") {
  const std::vector<double> mean{0.0, 0.9};
  const std::vector<double> log_std{0.5, 0.5};
  Rng r1(404), r2(404);
  for (int i = 0; i < 100; ++i) {
    const GaussianAction a = nn::gaussian_sample(mean, log_std, r1);
    const GaussianAction b = nn::gaussian_sample(mean, log_std, r2);
    CHECK(a.action == b.action);
    CHECK(a.log_prob == b.log_prob);
    for (double v : a.action) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
    // log-prob belongs to the pre-clip sample
    CHECK(a.log_prob ==
          doctest::Approx(nn::gaussian_log_prob(mean, log_std, a.pre_clip))
              .epsilon(1e-15));
  }
}

TEST_CASE("ratio identity: same parameters give ratio 1") {
  const std::vector<double> mean{0.1, -0.4};
  const std::vector<double> log_std{-0.7, -0.7};
  Rng rng(7);
  const GaussianAction a = nn::gaussian_sample(mean, log_std, rng);
  const double again = nn::gaussian_log_prob(mean, log_std, a.pre_clip);
  CHECK(std::exp(again - a.log_prob) == 1.0);
}
