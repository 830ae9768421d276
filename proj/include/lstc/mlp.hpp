#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lstc/rng.hpp"

namespace lstc::nn {

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
  const double* row(int r) const {
    return a.data() + static_cast<size_t>(r) * cols;
  }
};

using Vector = std::vector<double>;

enum class Activation { tanh, relu };

Activation activation_from_string(const std::string& s);
const char* to_string(Activation a);

struct AdamState {
  std::vector<Matrix> mw, vw;  // per layer, shaped like the weights
  std::vector<Vector> mb, vb;
  Vector m_log_std, v_log_std;
  long step = 0;
};

// A fixed-topology fully connected net: tanh/relu hidden layers, linear
// output, optional learnable log-std vector for the Gaussian policy head.
struct Mlp {
  std::vector<int> sizes;  // input, hidden..., output
  Activation hidden_act = Activation::tanh;
  std::vector<Matrix> w;  // w[k]: [sizes[k+1] x sizes[k]]
  std::vector<Vector> b;
  std::optional<Vector> log_std;
  AdamState adam;

  int input_size() const { return sizes.front(); }
  int output_size() const { return sizes.back(); }
  int layer_count() const { return static_cast<int>(w.size()); }
  long param_count() const;
};

// Gradients shaped like the parameters of one Mlp.
struct MlpGrads {
  std::vector<Matrix> dw;
  std::vector<Vector> db;
  Vector dlog_std;

  void zero();
  void add(const MlpGrads& other);
  void scale(double s);
};

// Per-sample activations kept around for the backward pass. act[0] is the
// input, act[k] the post-activation output of layer k-1.
struct ForwardCache {
  std::vector<Vector> act;
};

Mlp make_mlp(const std::vector<int>& sizes, Activation hidden_act, Rng& rng,
             double out_scale = 1.0);
MlpGrads make_grads(const Mlp& net);
ForwardCache make_cache(const Mlp& net);

Vector mlp_forward(const Mlp& net, std::span<const double> input);
// Forward pass that fills `cache`; cache.act.back() is the output.
void mlp_forward_cached(const Mlp& net, std::span<const double> input,
                        ForwardCache& cache);
// Backprop dL/d(output) for one sample, accumulating parameter gradients.
// When g_input is non-null it receives dL/d(input).
void mlp_backward_acc(const Mlp& net, const ForwardCache& cache,
                      std::span<const double> g_out, MlpGrads& grads,
                      double* g_input = nullptr);

// Batch gradient, mean-reduced: upstream[i] is dL/d(output) for inputs[i].
MlpGrads mlp_gradient(const Mlp& net, const std::vector<Vector>& inputs,
                      const std::vector<Vector>& upstream);

// Adam with bias correction (beta1=0.9, beta2=0.999, eps=1e-8). Throws if
// any parameter turns non-finite.
void adam_step(Mlp& net, const MlpGrads& grads, double lr);

// Flat parameter export/import as (name, array) pairs, in a fixed order.
struct NamedArray {
  std::string name;
  std::vector<double> values;
};
std::vector<NamedArray> export_params(const Mlp& net, bool with_adam = true);
void import_params(Mlp& net, const std::vector<NamedArray>& arrays);

bool params_equal(const Mlp& a, const Mlp& b);
bool all_finite(const Mlp& net);

}  // namespace lstc::nn
