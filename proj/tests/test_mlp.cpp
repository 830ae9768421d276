#include <doctest.h>

#include <cmath>
#include <vector>

#include "lstc/mlp.hpp"
#include "lstc/rng.hpp"

using namespace lstc;
using nn::Mlp;
using nn::Vector;

namespace {

Mlp random_net(const std::vector<int>& sizes, nn::Activation act,
               std::uint64_t seed) {
  Rng rng(seed);
  return nn::make_mlp(sizes, act, rng);
}

// Straight-line reference forward pass, independent of the kernel path.
Vector reference_forward(const Mlp& net, const Vector& input) {
  Vector cur = input;
  for (int l = 0; l < net.layer_count(); ++l) {
    const auto& w = net.w[l];
    Vector next(w.rows, 0.0);
    for (int r = 0; r < w.rows; ++r) {
      double acc = net.b[l][r];
      for (int c = 0; c < w.cols; ++c) acc += w.row(r)[c] * cur[c];
      next[r] = acc;
    }
    if (l != net.layer_count() - 1) {
      for (auto& v : next)
        v = net.hidden_act == nn::Activation::tanh ? std::tanh(v)
                                                   : std::max(0.0, v);
    }
    cur = std::move(next);
  }
  return cur;
}

// Scalar loss used for finite differencing: sum of upstream .* output,
// mean-reduced over the batch (mirrors mlp_gradient's reduction).
double fd_loss(const Mlp& net, const std::vector<Vector>& inputs,
               const std::vector<Vector>& upstream) {
  double acc = 0.0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const Vector out = reference_forward(net, inputs[i]);
    for (size_t j = 0; j < out.size(); ++j) acc += upstream[i][j] * out[j];
  }
  return acc / static_cast<double>(inputs.size());
}

struct FlatParam {
  double* ptr;
  double* grad;
};

std::vector<FlatParam> flatten(Mlp& net, nn::MlpGrads& grads) {
  std::vector<FlatParam> out;
  for (size_t l = 0; l < net.w.size(); ++l) {
    for (size_t i = 0; i < net.w[l].a.size(); ++i)
      out.push_back({&net.w[l].a[i], &grads.dw[l].a[i]});
    for (size_t i = 0; i < net.b[l].size(); ++i)
      out.push_back({&net.b[l][i], &grads.db[l][i]});
  }
  return out;
}

}  // namespace

TEST_CASE("forward: all-zero parameters give a zero output") {
  Rng rng(7);
  Mlp net = nn::make_mlp({5, 8, 3}, nn::Activation::tanh, rng);
  for (auto& w : net.w) std::fill(w.a.begin(), w.a.end(), 0.0);
  for (auto& b : net.b) std::fill(b.begin(), b.end(), 0.0);
  const Vector out = nn::mlp_forward(net, Vector{1.0, -2.0, 0.5, 3.0, -1.0});
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("forward: single linear layer is affine") {
  Rng rng(7);
  Mlp net = nn::make_mlp({1, 1}, nn::Activation::tanh, rng);
  net.w[0].a = {2.0};
  net.b[0] = {1.0};
  const Vector out = nn::mlp_forward(net, Vector{3.0});
  CHECK(out[0] == 7.0);
}

TEST_CASE("forward matches the straight-line reference to 1e-12") {
  Mlp net = random_net({49, 64, 64, 1}, nn::Activation::tanh, 42);
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Vector input(49);
    for (auto& v : input) v = rng.normal();
    const Vector got = nn::mlp_forward(net, input);
    const Vector want = reference_forward(net, input);
    CHECK(std::abs(got[0] - want[0]) <= 1e-12 * std::max(1.0, std::abs(want[0])));
  }
}

TEST_CASE("forward is pure: repeated calls are bit-identical") {
  Mlp net = random_net({6, 16, 2}, nn::Activation::tanh, 99);
  Vector input{0.1, -0.2, 0.3, 0.4, -0.5, 0.6};
  const Vector a = nn::mlp_forward(net, input);
  const Vector b = nn::mlp_forward(net, input);
  CHECK(a == b);
}

TEST_CASE("forward rejects a dimension mismatch") {
  Mlp net = random_net({4, 8, 1}, nn::Activation::tanh, 1);
  CHECK_THROWS_AS((void)nn::mlp_forward(net, Vector{1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("gradient: zero upstream gives zero gradients") {
  Mlp net = random_net({3, 8, 2}, nn::Activation::tanh, 5);
  const std::vector<Vector> inputs{{0.1, 0.2, 0.3}, {-1.0, 0.5, 2.0}};
  const std::vector<Vector> upstream{{0.0, 0.0}, {0.0, 0.0}};
  const nn::MlpGrads g = nn::mlp_gradient(net, inputs, upstream);
  for (const auto& m : g.dw)
    for (double v : m.a) CHECK(v == 0.0);
  for (const auto& b : g.db)
    for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("gradient: hand-differentiated tanh scalar net") {
  // f(x) = 1 * tanh(0.5 x) with zero biases; dL/dw = (1 - tanh(0.5)^2) * x.
  Rng rng(11);
  Mlp net = nn::make_mlp({1, 1, 1}, nn::Activation::tanh, rng);
  net.w[0].a = {0.5};
  net.w[1].a = {1.0};
  net.b[0] = {0.0};
  net.b[1] = {0.0};
  const nn::MlpGrads g = nn::mlp_gradient(net, {{1.0}}, {{1.0}});
  const double th = std::tanh(0.5);
  CHECK(g.dw[0].a[0] == doctest::Approx((1.0 - th * th) * 1.0).epsilon(1e-12));
  CHECK(g.dw[1].a[0] == doctest::Approx(th).epsilon(1e-12));
}

TEST_CASE("gradient matches central finite differences") {
  for (auto sizes : {std::vector<int>{3, 8, 2}, std::vector<int>{5, 16, 16, 1}}) {
    for (auto act : {nn::Activation::tanh, nn::Activation::relu}) {
      Mlp net = random_net(sizes, act, 77 + sizes.size());
      Rng rng(1234);
      std::vector<Vector> inputs;
      std::vector<Vector> upstream;
      for (int i = 0; i < 3; ++i) {
        Vector in(sizes.front());
        for (auto& v : in) v = rng.normal();
        Vector up(sizes.back());
        for (auto& v : up) v = rng.normal();
        inputs.push_back(in);
        upstream.push_back(up);
      }
      nn::MlpGrads grads = nn::mlp_gradient(net, inputs, upstream);
      auto flat = flatten(net, grads);
      const double h = 1e-5;
      for (const auto& [p, g] : flat) {
        const double saved = *p;
        *p = saved + h;
        const double up_val = fd_loss(net, inputs, upstream);
        *p = saved - h;
        const double dn_val = fd_loss(net, inputs, upstream);
        *p = saved;
        const double fd = (up_val - dn_val) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(*g), 1e-3});
        CHECK(std::abs(fd - *g) / denom < 1e-4);
      }
    }
  }
}

TEST_CASE("gradient reports the offending batch index for non-finite input") {
  Mlp net = random_net({2, 4, 1}, nn::Activation::tanh, 3);
  const std::vector<Vector> inputs{{0.1, 0.2}, {0.3, 0.4}};
  const std::vector<Vector> upstream{{1.0}, {std::nan("")}};
  CHECK_THROWS_WITH_AS(nn::mlp_gradient(net, inputs, upstream),
                       doctest::Contains("batch index 1"), std::runtime_error);
}

TEST_CASE("adam: zero gradient leaves parameters, bumps the counter") {
  Mlp net = random_net({3, 4, 1}, nn::Activation::tanh, 21);
  const Mlp before = net;
  nn::MlpGrads g = nn::make_grads(net);
  nn::adam_step(net, g, 3e-4);
  CHECK(nn::params_equal(net, before));
  CHECK(net.adam.step == 1);
}

TEST_CASE("adam: first step moves by ~lr*sign(g)") {
  Mlp net = random_net({2, 3, 1}, nn::Activation::tanh, 22);
  const Mlp before = net;
  nn::MlpGrads g = nn::make_grads(net);
  Rng rng(5);
  for (auto& m : g.dw)
    for (auto& v : m.a) v = rng.normal() * 10.0;  // |g| >> eps
  for (auto& b : g.db)
    for (auto& v : b) v = rng.normal() * 10.0;
  const double lr = 1e-3;
  nn::adam_step(net, g, lr);
  for (size_t l = 0; l < net.w.size(); ++l) {
    for (size_t i = 0; i < net.w[l].a.size(); ++i) {
      const double delta = net.w[l].a[i] - before.w[l].a[i];
      const double want = -lr * (g.dw[l].a[i] > 0 ? 1.0 : -1.0);
      CHECK(std::abs(delta - want) < 1e-6);
    }
  }
}

TEST_CASE("adam: two steps match a straight-line reimplementation") {
  Mlp net = random_net({3, 5, 2}, nn::Activation::tanh, 23);
  nn::MlpGrads g = nn::make_grads(net);
  Rng rng(6);
  for (auto& m : g.dw)
    for (auto& v : m.a) v = rng.normal();
  for (auto& b : g.db)
    for (auto& v : b) v = rng.normal();

  // Reference Adam over the flattened first-layer weights.
  std::vector<double> p = net.w[0].a;
  std::vector<double> m(p.size(), 0.0), v(p.size(), 0.0);
  const double lr = 3e-4, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= 2; ++t) {
    for (size_t i = 0; i < p.size(); ++i) {
      const double gi = g.dw[0].a[i];
      m[i] = b1 * m[i] + (1 - b1) * gi;
      v[i] = b2 * v[i] + (1 - b2) * gi * gi;
      const double mhat = m[i] / (1 - std::pow(b1, t));
      const double vhat = v[i] / (1 - std::pow(b2, t));
      p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
  nn::adam_step(net, g, lr);
  nn::adam_step(net, g, lr);
  for (size_t i = 0; i < p.size(); ++i)
    CHECK(std::abs(net.w[0].a[i] - p[i]) <=
          1e-12 * std::max(1.0, std::abs(p[i])));
}

TEST_CASE("export/import round-trips every parameter") {
  Mlp net = random_net({4, 8, 2}, nn::Activation::tanh, 31);
  net.log_std = Vector{-0.7, -0.7};
  net.adam.m_log_std.assign(2, 0.0);
  net.adam.v_log_std.assign(2, 0.0);
  nn::MlpGrads g = nn::make_grads(net);
  for (auto& m : g.dw)
    for (auto& v : m.a) v = 0.01;
  nn::adam_step(net, g, 1e-3);

  Rng rng(32);
  Mlp other = nn::make_mlp({4, 8, 2}, nn::Activation::tanh, rng);
  other.log_std = Vector{0.0, 0.0};
  nn::import_params(other, nn::export_params(net, true));
  CHECK(nn::params_equal(net, other));
  CHECK(other.adam.step == net.adam.step);
  CHECK(other.adam.mw[0].a == net.adam.mw[0].a);
}

TEST_CASE("layer dimensions must chain") {
  Rng rng(1);
  CHECK_THROWS_AS(nn::make_mlp({0, 4}, nn::Activation::tanh, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(nn::make_mlp({4}, nn::Activation::tanh, rng),
                  std::invalid_argument);
}
