#pragma once

namespace lstc::kernels {

// Dense double-precision primitives behind the network math. A scalar
// reference implementation always exists; on x86 an AVX2+FMA variant is
// selected at runtime. Elementwise kernels (axpy, outer_acc, matvec_t,
// scale, tanh_backward, adam_update) are bit-exact across backends;
// reductions (dot, affine) differ only in summation order and are
// equivalence-tested to tight tolerance.
enum class Backend { scalar, avx2 };

Backend active_backend();
Backend best_backend();
// Force a backend (used by tests and the LSTC_KERNELS env override).
// Returns false if the CPU cannot run it.
bool set_backend(Backend b);
const char* backend_name(Backend b);

// y = W x + b with W row-major [rows x cols].
void affine(const double* w, const double* b, const double* x, double* y,
            int rows, int cols);

// out = W^T v. Accumulated row by row so every backend sums in the same
// order per output element.
void matvec_t(const double* w, const double* v, double* out, int rows,
              int cols);

// A += u v^T, A row-major [rows x cols].
void outer_acc(double* a, const double* u, const double* v, int rows,
               int cols);

void axpy(int n, double alpha, const double* x, double* y);
double dot(int n, const double* x, const double* y);
void scale(int n, double alpha, double* x);

void tanh_vec(int n, const double* x, double* y);
// g_pre = g_post * (1 - y^2), y being the stored tanh output.
void tanh_backward(int n, const double* y, const double* g_post,
                   double* g_pre);

// One Adam step over a flat parameter block. bias1/bias2 are the
// precomputed corrections 1-beta1^t and 1-beta2^t.
void adam_update(int n, double* p, const double* g, double* m, double* v,
                 double lr, double beta1, double beta2, double eps,
                 double bias1, double bias2);

}  // namespace lstc::kernels
