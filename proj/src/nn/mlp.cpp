#include "lstc/mlp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "lstc/kernels.hpp"

namespace lstc::nn {

namespace k = lstc::kernels;

Activation activation_from_string(const std::string& s) {
  if (s == "tanh") return Activation::tanh;
  if (s == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation: " + s);
}

const char* to_string(Activation a) {
  return a == Activation::tanh ? "tanh" : "relu";
}

long Mlp::param_count() const {
  long n = 0;
  for (const auto& m : w) n += static_cast<long>(m.rows) * m.cols;
  for (const auto& v : b) n += static_cast<long>(v.size());
  if (log_std) n += static_cast<long>(log_std->size());
  return n;
}

void MlpGrads::zero() {
  for (auto& m : dw) std::fill(m.a.begin(), m.a.end(), 0.0);
  for (auto& v : db) std::fill(v.begin(), v.end(), 0.0);
  std::fill(dlog_std.begin(), dlog_std.end(), 0.0);
}

void MlpGrads::add(const MlpGrads& other) {
  for (size_t i = 0; i < dw.size(); ++i)
    k::axpy(static_cast<int>(dw[i].a.size()), 1.0, other.dw[i].a.data(),
            dw[i].a.data());
  for (size_t i = 0; i < db.size(); ++i)
    k::axpy(static_cast<int>(db[i].size()), 1.0, other.db[i].data(),
            db[i].data());
  k::axpy(static_cast<int>(dlog_std.size()), 1.0, other.dlog_std.data(),
          dlog_std.data());
}

void MlpGrads::scale(double s) {
  for (auto& m : dw) k::scale(static_cast<int>(m.a.size()), s, m.a.data());
  for (auto& v : db) k::scale(static_cast<int>(v.size()), s, v.data());
  k::scale(static_cast<int>(dlog_std.size()), s, dlog_std.data());
}

Mlp make_mlp(const std::vector<int>& sizes, Activation hidden_act, Rng& rng,
             double out_scale) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp needs >= 2 sizes");
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument("mlp sizes must be positive");
  Mlp net;
  net.sizes = sizes;
  net.hidden_act = hidden_act;
  const int layers = static_cast<int>(sizes.size()) - 1;
  for (int l = 0; l < layers; ++l) {
    Matrix m(sizes[l + 1], sizes[l]);
    const bool is_output = (l == layers - 1);
    const double std_dev =
        (is_output ? out_scale : 1.0) / std::sqrt(static_cast<double>(sizes[l]));
    for (auto& x : m.a) x = std_dev * rng.normal();
    net.w.push_back(std::move(m));
    net.b.emplace_back(sizes[l + 1], 0.0);
  }
  net.adam.mw.assign(net.w.begin(), net.w.end());
  net.adam.vw.assign(net.w.begin(), net.w.end());
  for (auto& m : net.adam.mw) std::fill(m.a.begin(), m.a.end(), 0.0);
  for (auto& m : net.adam.vw) std::fill(m.a.begin(), m.a.end(), 0.0);
  for (const auto& v : net.b) {
    net.adam.mb.emplace_back(v.size(), 0.0);
    net.adam.vb.emplace_back(v.size(), 0.0);
  }
  return net;
}

MlpGrads make_grads(const Mlp& net) {
  MlpGrads g;
  for (const auto& m : net.w) g.dw.emplace_back(m.rows, m.cols);
  for (const auto& v : net.b) g.db.emplace_back(v.size(), 0.0);
  if (net.log_std) g.dlog_std.assign(net.log_std->size(), 0.0);
  return g;
}

ForwardCache make_cache(const Mlp& net) {
  ForwardCache c;
  for (int s : net.sizes) c.act.emplace_back(s, 0.0);
  return c;
}

namespace {

void apply_activation(Activation act, int n, double* x) {
  if (act == Activation::tanh) {
    k::tanh_vec(n, x, x);
  } else {
    for (int i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
  }
}

}  // namespace

void mlp_forward_cached(const Mlp& net, std::span<const double> input,
                        ForwardCache& cache) {
  if (static_cast<int>(input.size()) != net.input_size())
    throw std::invalid_argument(
        "mlp_forward: input size " + std::to_string(input.size()) +
        " != declared " + std::to_string(net.input_size()));
  bool shapes_ok = cache.act.size() == net.sizes.size();
  for (size_t i = 0; shapes_ok && i < net.sizes.size(); ++i)
    shapes_ok = static_cast<int>(cache.act[i].size()) == net.sizes[i];
  if (!shapes_ok) cache = make_cache(net);
  std::memcpy(cache.act[0].data(), input.data(), input.size() * sizeof(double));
  const int layers = net.layer_count();
  for (int l = 0; l < layers; ++l) {
    const Matrix& w = net.w[l];
    k::affine(w.a.data(), net.b[l].data(), cache.act[l].data(),
              cache.act[l + 1].data(), w.rows, w.cols);
    if (l != layers - 1)
      apply_activation(net.hidden_act, w.rows, cache.act[l + 1].data());
  }
}

Vector mlp_forward(const Mlp& net, std::span<const double> input) {
  thread_local ForwardCache cache;
  mlp_forward_cached(net, input, cache);
  return cache.act.back();
}

void mlp_backward_acc(const Mlp& net, const ForwardCache& cache,
                      std::span<const double> g_out, MlpGrads& grads,
                      double* g_input) {
  const int layers = net.layer_count();
  if (static_cast<int>(g_out.size()) != net.output_size())
    throw std::invalid_argument("mlp_backward: upstream gradient size "
                                "mismatch");
  // delta starts as dL/d(pre-activation of output) == dL/d(output).
  thread_local Vector delta, next_delta;
  delta.assign(g_out.begin(), g_out.end());
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix& w = net.w[l];
    k::outer_acc(grads.dw[l].a.data(), delta.data(), cache.act[l].data(),
                 w.rows, w.cols);
    k::axpy(w.rows, 1.0, delta.data(), grads.db[l].data());
    if (l == 0 && !g_input) break;
    next_delta.resize(w.cols);
    k::matvec_t(w.a.data(), delta.data(), next_delta.data(), w.rows, w.cols);
    if (l > 0) {
      // through the hidden activation of layer l-1
      if (net.hidden_act == Activation::tanh) {
        k::tanh_backward(w.cols, cache.act[l].data(), next_delta.data(),
                         next_delta.data());
      } else {
        for (int i = 0; i < w.cols; ++i)
          if (cache.act[l][i] <= 0.0) next_delta[i] = 0.0;
      }
    }
    delta.swap(next_delta);
  }
  if (g_input)
    std::memcpy(g_input, delta.data(), delta.size() * sizeof(double));
}

MlpGrads mlp_gradient(const Mlp& net, const std::vector<Vector>& inputs,
                      const std::vector<Vector>& upstream) {
  if (inputs.empty()) throw std::invalid_argument("mlp_gradient: empty batch");
  if (inputs.size() != upstream.size())
    throw std::invalid_argument("mlp_gradient: batch size mismatch");
  MlpGrads grads = make_grads(net);
  ForwardCache cache = make_cache(net);
  for (size_t i = 0; i < inputs.size(); ++i) {
    for (double g : upstream[i]) {
      if (!std::isfinite(g))
        throw std::runtime_error(
            "mlp_gradient: non-finite upstream gradient at batch index " +
            std::to_string(i));
    }
    mlp_forward_cached(net, inputs[i], cache);
    mlp_backward_acc(net, cache, upstream[i], grads);
  }
  grads.scale(1.0 / static_cast<double>(inputs.size()));
  return grads;
}

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
}  // namespace

void adam_step(Mlp& net, const MlpGrads& grads, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adam_step: lr must be > 0");
  net.adam.step += 1;
  const double bias1 = 1.0 - std::pow(kBeta1, static_cast<double>(net.adam.step));
  const double bias2 = 1.0 - std::pow(kBeta2, static_cast<double>(net.adam.step));
  for (size_t l = 0; l < net.w.size(); ++l) {
    k::adam_update(static_cast<int>(net.w[l].a.size()), net.w[l].a.data(),
                   grads.dw[l].a.data(), net.adam.mw[l].a.data(),
                   net.adam.vw[l].a.data(), lr, kBeta1, kBeta2, kEps, bias1,
                   bias2);
    k::adam_update(static_cast<int>(net.b[l].size()), net.b[l].data(),
                   grads.db[l].data(), net.adam.mb[l].data(),
                   net.adam.vb[l].data(), lr, kBeta1, kBeta2, kEps, bias1,
                   bias2);
  }
  if (net.log_std) {
    if (net.adam.m_log_std.size() != net.log_std->size()) {
      net.adam.m_log_std.assign(net.log_std->size(), 0.0);
      net.adam.v_log_std.assign(net.log_std->size(), 0.0);
    }
    k::adam_update(static_cast<int>(net.log_std->size()), net.log_std->data(),
                   grads.dlog_std.data(), net.adam.m_log_std.data(),
                   net.adam.v_log_std.data(), lr, kBeta1, kBeta2, kEps, bias1,
                   bias2);
  }
  if (!all_finite(net))
    throw std::runtime_error(
        "adam_step: non-finite parameter after update (step " +
        std::to_string(net.adam.step) + ", lr " + std::to_string(lr) + ")");
}

std::vector<NamedArray> export_params(const Mlp& net, bool with_adam) {
  std::vector<NamedArray> out;
  for (size_t l = 0; l < net.w.size(); ++l) {
    out.push_back({"w" + std::to_string(l), net.w[l].a});
    out.push_back({"b" + std::to_string(l), net.b[l]});
  }
  if (net.log_std) out.push_back({"log_std", *net.log_std});
  if (with_adam) {
    for (size_t l = 0; l < net.w.size(); ++l) {
      out.push_back({"adam.mw" + std::to_string(l), net.adam.mw[l].a});
      out.push_back({"adam.vw" + std::to_string(l), net.adam.vw[l].a});
      out.push_back({"adam.mb" + std::to_string(l), net.adam.mb[l]});
      out.push_back({"adam.vb" + std::to_string(l), net.adam.vb[l]});
    }
    if (net.log_std) {
      out.push_back({"adam.m_log_std", net.adam.m_log_std});
      out.push_back({"adam.v_log_std", net.adam.v_log_std});
    }
    out.push_back(
        {"adam.step", {static_cast<double>(net.adam.step)}});
  }
  return out;
}

void import_params(Mlp& net, const std::vector<NamedArray>& arrays) {
  auto assign = [](std::vector<double>& dst, const NamedArray& src) {
    if (dst.size() != src.values.size())
      throw std::runtime_error("import_params: size mismatch for " + src.name);
    dst = src.values;
  };
  for (const auto& arr : arrays) {
    const std::string& n = arr.name;
    auto layer_of = [&](size_t prefix_len) {
      return static_cast<size_t>(std::stoi(n.substr(prefix_len)));
    };
    if (n == "adam.step") {
      net.adam.step = static_cast<long>(arr.values.at(0));
    } else if (n == "adam.m_log_std") {
      net.adam.m_log_std = arr.values;
    } else if (n == "adam.v_log_std") {
      net.adam.v_log_std = arr.values;
    } else if (n.rfind("adam.mw", 0) == 0) {
      assign(net.adam.mw.at(layer_of(7)).a, arr);
    } else if (n.rfind("adam.vw", 0) == 0) {
      assign(net.adam.vw.at(layer_of(7)).a, arr);
    } else if (n.rfind("adam.mb", 0) == 0) {
      assign(net.adam.mb.at(layer_of(7)), arr);
    } else if (n.rfind("adam.vb", 0) == 0) {
      assign(net.adam.vb.at(layer_of(7)), arr);
    } else if (n == "log_std") {
      if (!net.log_std) net.log_std = Vector(arr.values.size(), 0.0);
      assign(*net.log_std, arr);
    } else if (n.rfind("w", 0) == 0) {
      assign(net.w.at(layer_of(1)).a, arr);
    } else if (n.rfind("b", 0) == 0) {
      assign(net.b.at(layer_of(1)), arr);
    } else {
      throw std::runtime_error("import_params: unknown array " + n);
    }
  }
}

bool params_equal(const Mlp& a, const Mlp& b) {
  if (a.sizes != b.sizes) return false;
  for (size_t l = 0; l < a.w.size(); ++l)
    if (a.w[l].a != b.w[l].a || a.b[l] != b.b[l]) return false;
  if (a.log_std.has_value() != b.log_std.has_value()) return false;
  if (a.log_std && *a.log_std != *b.log_std) return false;
  return true;
}

bool all_finite(const Mlp& net) {
  auto ok = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  for (const auto& m : net.w)
    if (!ok(m.a)) return false;
  for (const auto& v : net.b)
    if (!ok(v)) return false;
  if (net.log_std && !ok(*net.log_std)) return false;
  return true;
}

}  // namespace lstc::nn
