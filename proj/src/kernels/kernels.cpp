#include "lstc/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

namespace lstc::kernels {

namespace scalar {

void affine(const double* w, const double* b, const double* x, double* y,
            int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    const double* wr = w + static_cast<long>(r) * cols;
    double acc = 0.0;
    for (int c = 0; c < cols; ++c) acc += wr[c] * x[c];
    y[r] = acc + b[r];
  }
}

void matvec_t(const double* w, const double* v, double* out, int rows,
              int cols) {
  for (int c = 0; c < cols; ++c) out[c] = 0.0;
  for (int r = 0; r < rows; ++r) {
    const double* wr = w + static_cast<long>(r) * cols;
    const double vr = v[r];
    for (int c = 0; c < cols; ++c) out[c] += vr * wr[c];
  }
}

void outer_acc(double* a, const double* u, const double* v, int rows,
               int cols) {
  for (int r = 0; r < rows; ++r) {
    double* ar = a + static_cast<long>(r) * cols;
    const double ur = u[r];
    for (int c = 0; c < cols; ++c) ar[c] += ur * v[c];
  }
}

void axpy(int n, double alpha, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double dot(int n, const double* x, const double* y) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void scale(int n, double alpha, double* x) {
  for (int i = 0; i < n; ++i) x[i] *= alpha;
}

void tanh_vec(int n, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void tanh_backward(int n, const double* y, const double* g_post,
                   double* g_pre) {
  for (int i = 0; i < n; ++i) g_pre[i] = g_post[i] * (1.0 - y[i] * y[i]);
}

void adam_update(int n, double* p, const double* g, double* m, double* v,
                 double lr, double beta1, double beta2, double eps,
                 double bias1, double bias2) {
  for (int i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    const double mhat = m[i] / bias1;
    const double vhat = v[i] / bias2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace scalar

#if defined(__x86_64__) || defined(__i386__)
#define LSTC_HAVE_AVX2_KERNELS 1
namespace avx2 {
void affine(const double*, const double*, const double*, double*, int, int);
void matvec_t(const double*, const double*, double*, int, int);
void outer_acc(double*, const double*, const double*, int, int);
void axpy(int, double, const double*, double*);
double dot(int, const double*, const double*);
void scale(int, double, double*);
void tanh_vec(int, const double*, double*);
void tanh_backward(int, const double*, const double*, double*);
void adam_update(int, double*, const double*, double*, double*, double,
                 double, double, double, double, double);
}  // namespace avx2
#endif

namespace {

struct Ops {
  void (*affine)(const double*, const double*, const double*, double*, int,
                 int);
  void (*matvec_t)(const double*, const double*, double*, int, int);
  void (*outer_acc)(double*, const double*, const double*, int, int);
  void (*axpy)(int, double, const double*, double*);
  double (*dot)(int, const double*, const double*);
  void (*scale)(int, double, double*);
  void (*tanh_vec)(int, const double*, double*);
  void (*tanh_backward)(int, const double*, const double*, double*);
  void (*adam_update)(int, double*, const double*, double*, double*, double,
                      double, double, double, double, double);
};

constexpr Ops kScalarOps = {
    scalar::affine,   scalar::matvec_t,      scalar::outer_acc,
    scalar::axpy,     scalar::dot,           scalar::scale,
    scalar::tanh_vec, scalar::tanh_backward, scalar::adam_update};

#ifdef LSTC_HAVE_AVX2_KERNELS
constexpr Ops kAvx2Ops = {
    avx2::affine,   avx2::matvec_t,      avx2::outer_acc,
    avx2::axpy,     avx2::dot,           avx2::scale,
    avx2::tanh_vec, avx2::tanh_backward, avx2::adam_update};
#endif

bool cpu_has_avx2() {
#ifdef LSTC_HAVE_AVX2_KERNELS
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect_backend() {
  if (const char* env = std::getenv("LSTC_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<const Ops*> g_ops{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

const Ops* ops() {
  const Ops* p = g_ops.load(std::memory_order_acquire);
  if (p) return p;
  set_backend(detect_backend());
  return g_ops.load(std::memory_order_acquire);
}

}  // namespace

Backend active_backend() {
  ops();
  return g_backend.load(std::memory_order_acquire);
}

Backend best_backend() {
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

bool set_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      g_ops.store(&kScalarOps, std::memory_order_release);
      g_backend.store(Backend::scalar, std::memory_order_release);
      return true;
    case Backend::avx2:
#ifdef LSTC_HAVE_AVX2_KERNELS
      if (cpu_has_avx2()) {
        g_ops.store(&kAvx2Ops, std::memory_order_release);
        g_backend.store(Backend::avx2, std::memory_order_release);
        return true;
      }
#endif
      return false;
  }
  return false;
}

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "unknown";
}

void affine(const double* w, const double* b, const double* x, double* y,
            int rows, int cols) {
  ops()->affine(w, b, x, y, rows, cols);
}
void matvec_t(const double* w, const double* v, double* out, int rows,
              int cols) {
  ops()->matvec_t(w, v, out, rows, cols);
}
void outer_acc(double* a, const double* u, const double* v, int rows,
               int cols) {
  ops()->outer_acc(a, u, v, rows, cols);
}
void axpy(int n, double alpha, const double* x, double* y) {
  ops()->axpy(n, alpha, x, y);
}
double dot(int n, const double* x, const double* y) {
  return ops()->dot(n, x, y);
}
void scale(int n, double alpha, double* x) { ops()->scale(n, alpha, x); }
void tanh_vec(int n, const double* x, double* y) { ops()->tanh_vec(n, x, y); }
void tanh_backward(int n, const double* y, const double* g_post,
                   double* g_pre) {
  ops()->tanh_backward(n, y, g_post, g_pre);
}
void adam_update(int n, double* p, const double* g, double* m, double* v,
                 double lr, double beta1, double beta2, double eps,
                 double bias1, double bias2) {
  ops()->adam_update(n, p, g, m, v, lr, beta1, beta2, eps, bias1, bias2);
}

}  // namespace lstc::kernels
