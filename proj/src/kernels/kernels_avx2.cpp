// AVX2+FMA kernel variants. Elementwise kernels use separate mul/add so
// they stay bit-exact against the scalar reference; only the reductions
// (dot, affine) use FMA and a different summation order.
#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include <cmath>

namespace lstc::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

inline double dot_row(const double* x, const double* y, int n) {
  __m256d acc = _mm256_setzero_pd();
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(x + i);
    const __m256d b = _mm256_loadu_pd(y + i);
    acc = _mm256_fmadd_pd(a, b, acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += x[i] * y[i];
  return sum;
}

}  // namespace

void affine(const double* w, const double* b, const double* x, double* y,
            int rows, int cols) {
  for (int r = 0; r < rows; ++r) {
    y[r] = dot_row(w + static_cast<long>(r) * cols, x, cols) + b[r];
  }
}

void axpy(int n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(yv, _mm256_mul_pd(va, xv)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void matvec_t(const double* w, const double* v, double* out, int rows,
              int cols) {
  for (int c = 0; c < cols; ++c) out[c] = 0.0;
  for (int r = 0; r < rows; ++r) {
    axpy(cols, v[r], w + static_cast<long>(r) * cols, out);
  }
}

void outer_acc(double* a, const double* u, const double* v, int rows,
               int cols) {
  for (int r = 0; r < rows; ++r) {
    axpy(cols, u[r], v, a + static_cast<long>(r) * cols);
  }
}

double dot(int n, const double* x, const double* y) {
  return dot_row(x, y, n);
}

void scale(int n, double alpha, double* x) {
  const __m256d va = _mm256_set1_pd(alpha);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] *= alpha;
}

// No vector tanh: both backends go through libm so results match exactly.
void tanh_vec(int n, const double* x, double* y) {
  for (int i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void tanh_backward(int n, const double* y, const double* g_post,
                   double* g_pre) {
  const __m256d one = _mm256_set1_pd(1.0);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d gv = _mm256_loadu_pd(g_post + i);
    const __m256d d = _mm256_sub_pd(one, _mm256_mul_pd(yv, yv));
    _mm256_storeu_pd(g_pre + i, _mm256_mul_pd(gv, d));
  }
  for (; i < n; ++i) g_pre[i] = g_post[i] * (1.0 - y[i] * y[i]);
}

void adam_update(int n, double* p, const double* g, double* m, double* v,
                 double lr, double beta1, double beta2, double eps,
                 double bias1, double bias2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vc1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vc2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vbias1 = _mm256_set1_pd(bias1);
  const __m256d vbias2 = _mm256_set1_pd(bias2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  int i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gv = _mm256_loadu_pd(g + i);
    __m256d mv = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    mv = _mm256_add_pd(_mm256_mul_pd(vb1, mv), _mm256_mul_pd(vc1, gv));
    vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv),
                       _mm256_mul_pd(vc2, _mm256_mul_pd(gv, gv)));
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_div_pd(mv, vbias1);
    const __m256d vhat = _mm256_div_pd(vv, vbias2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(p + i, _mm256_sub_pd(_mm256_loadu_pd(p + i), step));
  }
  for (; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i]);
    const double mhat = m[i] / bias1;
    const double vhat = v[i] / bias2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

}  // namespace lstc::kernels::avx2

#endif  // x86
