#include <doctest.h>

#include <cmath>
#include <vector>

#include "lstc/kernels.hpp"
#include "lstc/rng.hpp"

using namespace lstc;
namespace k = lstc::kernels;

namespace {

std::vector<double> randn(int n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

struct BackendGuard {
  k::Backend saved;
  BackendGuard() : saved(k::active_backend()) {}
  ~BackendGuard() { k::set_backend(saved); }
};

}  // namespace

TEST_CASE("affine computes Wx+b") {
  const double w[] = {1, 2, 3, 4};  // [[1,2],[3,4]]
  const double b[] = {10, 20};
  const double x[] = {1, -1};
  double y[2];
  k::affine(w, b, x, y, 2, 2);
  CHECK(y[0] == doctest::Approx(9.0));
  CHECK(y[1] == doctest::Approx(19.0));
}

TEST_CASE("matvec_t is the transpose product") {
  const double w[] = {1, 2, 3, 4, 5, 6};  // 2x3
  const double v[] = {1, 10};
  double out[3];
  k::matvec_t(w, v, out, 2, 3);
  CHECK(out[0] == doctest::Approx(41.0));
  CHECK(out[1] == doctest::Approx(52.0));
  CHECK(out[2] == doctest::Approx(63.0));
}

TEST_CASE("adam_update zero gradient leaves parameters in place") {
  std::vector<double> p{1.0, -2.0, 3.0};
  std::vector<double> g{0.0, 0.0, 0.0};
  std::vector<double> m(3, 0.0), v(3, 0.0);
  k::adam_update(3, p.data(), g.data(), m.data(), v.data(), 1e-3, 0.9, 0.999,
                 1e-8, 1.0 - 0.9, 1.0 - 0.999);
  CHECK(p[0] == 1.0);
  CHECK(p[1] == -2.0);
  CHECK(p[2] == 3.0);
}

TEST_CASE("scalar and simd backends agree") {
  if (k::best_backend() == k::Backend::scalar) return;  // nothing to compare
  BackendGuard guard;
  Rng rng(123);

  for (int trial = 0; trial < 20; ++trial) {
    const int rows = rng.uniform_int(1, 70);
    const int cols = rng.uniform_int(1, 300);
    const auto w = randn(rows * cols, rng);
    const auto b = randn(rows, rng);
    const auto x = randn(cols, rng);
    const auto u = randn(rows, rng);
    const auto grads = randn(cols, rng);
    auto adam_m0 = randn(cols, rng);
    auto adam_v0 = randn(cols, rng);
    for (auto& z : adam_v0) z = std::abs(z);

    struct Out {
      std::vector<double> y, mt, outer, axpy, scale, tanh, tanh_b, p, m, v;
      double dot = 0.0;
    };
    auto run = [&](k::Backend backend) {
      REQUIRE(k::set_backend(backend));
      Out o;
      o.y.resize(rows);
      k::affine(w.data(), b.data(), x.data(), o.y.data(), rows, cols);
      o.dot = k::dot(cols, x.data(), x.data());
      o.mt.resize(cols);
      k::matvec_t(w.data(), u.data(), o.mt.data(), rows, cols);
      o.outer = w;
      k::outer_acc(o.outer.data(), u.data(), x.data(), rows, cols);
      o.axpy = x;
      k::axpy(cols, 0.37, x.data(), o.axpy.data());
      o.scale = x;
      k::scale(cols, -1.25, o.scale.data());
      o.tanh.resize(cols);
      k::tanh_vec(cols, x.data(), o.tanh.data());
      o.tanh_b.resize(cols);
      k::tanh_backward(cols, o.tanh.data(), x.data(), o.tanh_b.data());
      o.p = x;
      o.m = adam_m0;
      o.v = adam_v0;
      k::adam_update(cols, o.p.data(), grads.data(), o.m.data(), o.v.data(),
                     3e-4, 0.9, 0.999, 1e-8, 0.5, 0.25);
      return o;
    };

    const Out s = run(k::Backend::scalar);
    const Out a = run(k::Backend::avx2);

    // Reductions agree to tight tolerance (summation order differs).
    for (int r = 0; r < rows; ++r)
      CHECK(s.y[r] == doctest::Approx(a.y[r]).epsilon(1e-13));
    CHECK(s.dot == doctest::Approx(a.dot).epsilon(1e-13));

    // Elementwise kernels are bit-exact.
    CHECK(s.mt == a.mt);
    CHECK(s.outer == a.outer);
    CHECK(s.axpy == a.axpy);
    CHECK(s.scale == a.scale);
    CHECK(s.tanh == a.tanh);
    CHECK(s.tanh_b == a.tanh_b);
    CHECK(s.p == a.p);
    CHECK(s.m == a.m);
    CHECK(s.v == a.v);
  }
}

TEST_CASE("backend can be forced to scalar") {
  BackendGuard guard;
  REQUIRE(k::set_backend(k::Backend::scalar));
  CHECK(k::active_backend() == k::Backend::scalar);
}
