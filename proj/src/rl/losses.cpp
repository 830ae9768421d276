#include "lstc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace lstc::rl {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

template <typename Fn>
void parallel_chunks(int m, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, m));
  if (threads == 1) {
    fn(0, 0, m);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int b = static_cast<int>(static_cast<long>(t) * m / threads);
    const int e = static_cast<int>(static_cast<long>(t + 1) * m / threads);
    pool.emplace_back(fn, t, b, e);
  }
  for (auto& th : pool) th.join();
}

// Shared implementation of the policy gradient. The penalty terms are
// assembled per sample; a zero multiplier skips its term entirely so the
// degenerate path reproduces plain PPO bit for bit.
double policy_gradient_impl(const nn::Mlp& policy, const RolloutBuffer& buf,
                            std::span<const int> idx,
                            std::span<const double> b_values, double lambda_l,
                            double lambda_s, double clip_eps,
                            double entropy_coef, nn::MlpGrads* grads,
                            int threads) {
  if (!policy.log_std)
    throw std::invalid_argument("policy net has no log_std head");
  if (clip_eps <= 0.0 || clip_eps >= 1.0)
    throw std::invalid_argument("clip_eps must be in (0,1)");
  if (lambda_s != 0.0 && b_values.size() != buf.adv.size())
    throw std::invalid_argument("validation scores missing for lambda_s != 0");
  const int m = static_cast<int>(idx.size());
  if (m == 0) throw std::invalid_argument("empty minibatch");

  const int nthreads = std::clamp(threads, 1, m);
  std::vector<nn::MlpGrads> tgrads;
  for (int t = 0; t < nthreads; ++t) tgrads.push_back(nn::make_grads(policy));
  std::vector<double> tloss(nthreads, 0.0);
  std::exception_ptr error;
  std::mutex error_mu;

  parallel_chunks(m, nthreads, [&](int tid, int begin, int end) {
    try {
      nn::ForwardCache cache = nn::make_cache(policy);
      const auto& log_std = *policy.log_std;
      const int d = static_cast<int>(log_std.size());
      std::vector<double> g_out(d), z(d), sigma(d);
      for (int k = 0; k < d; ++k) sigma[k] = std::exp(log_std[k]);

      for (int i = begin; i < end; ++i) {
        const int bi = idx[i];
        nn::mlp_forward_cached(policy, buf.obs_at(bi), cache);
        const auto& mean = cache.act.back();
        const auto act = buf.action_at(bi);

        double logp = -kLog2Pi;  // D/2 * log(2*pi) with D = 2
        for (int k = 0; k < d; ++k) {
          z[k] = (act[k] - mean[k]) / sigma[k];
          logp += -0.5 * z[k] * z[k] - log_std[k];
        }
        const double ratio = std::exp(logp - buf.logp_old[bi]);

        double g = buf.adv[bi];
        if (lambda_l != 0.0) g -= lambda_l * buf.adv_cost[bi];
        if (lambda_s != 0.0) g -= lambda_s * b_values[bi];
        if (!std::isfinite(g))
          throw std::runtime_error(
              "policy gradient: non-finite penalized advantage at buffer "
              "index " +
              std::to_string(bi));

        const double unclipped = ratio * g;
        const double clipped =
            std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps) * g;
        // Gradient flows only through the unclipped branch of the min.
        const double coeff = unclipped <= clipped ? g : 0.0;
        tloss[tid] -= std::min(unclipped, clipped);

        if (coeff != 0.0) {
          const double w = -coeff * ratio;  // d(-obj)/d(logp), unscaled
          for (int k = 0; k < d; ++k) g_out[k] = w * z[k] / sigma[k];
          nn::mlp_backward_acc(policy, cache, g_out, tgrads[tid]);
          for (int k = 0; k < d; ++k)
            tgrads[tid].dlog_std[k] += w * (z[k] * z[k] - 1.0);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  grads->zero();
  for (const auto& tg : tgrads) grads->add(tg);
  grads->scale(1.0 / m);
  double loss = 0.0;
  for (double l : tloss) loss += l;
  loss /= m;

  if (entropy_coef != 0.0) {
    // H = sum(log_std) + D/2*(1 + log(2*pi)); constant per batch.
    double h = 0.5 * policy.log_std->size() * (1.0 + kLog2Pi);
    for (double ls : *policy.log_std) h += ls;
    loss -= entropy_coef * h;
    for (double& gk : grads->dlog_std) gk -= entropy_coef;
  }
  return loss;
}

}  // namespace

double ppo_surrogate(double ratio, double adv, double clip_eps) {
  const double clipped = std::clamp(ratio, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(ratio * adv, clipped * adv);
}

double ppo_surrogate_mean(std::span<const double> ratios,
                          std::span<const double> advs, double clip_eps) {
  if (ratios.size() != advs.size() || ratios.empty())
    throw std::invalid_argument("ppo_surrogate_mean: bad batch");
  double acc = 0.0;
  for (size_t i = 0; i < ratios.size(); ++i)
    acc += ppo_surrogate(ratios[i], advs[i], clip_eps);
  return acc / static_cast<double>(ratios.size());
}

double lagrangian_policy_gradient(const nn::Mlp& policy,
                                  const RolloutBuffer& buf,
                                  std::span<const int> idx,
                                  std::span<const double> b_values,
                                  double lambda_l, double lambda_s,
                                  double clip_eps, double entropy_coef,
                                  nn::MlpGrads* grads, int threads) {
  return policy_gradient_impl(policy, buf, idx, b_values, lambda_l, lambda_s,
                              clip_eps, entropy_coef, grads, threads);
}

double ppo_policy_gradient(const nn::Mlp& policy, const RolloutBuffer& buf,
                           std::span<const int> idx, double clip_eps,
                           double entropy_coef, nn::MlpGrads* grads,
                           int threads) {
  return policy_gradient_impl(policy, buf, idx, {}, 0.0, 0.0, clip_eps,
                              entropy_coef, grads, threads);
}

double critic_gradient(const nn::Mlp& net, const RolloutBuffer& buf,
                       std::span<const int> idx,
                       std::span<const double> targets, nn::MlpGrads* grads,
                       int threads) {
  const int m = static_cast<int>(idx.size());
  if (m == 0) throw std::invalid_argument("empty minibatch");
  const int nthreads = std::clamp(threads, 1, m);
  std::vector<nn::MlpGrads> tgrads;
  for (int t = 0; t < nthreads; ++t) tgrads.push_back(nn::make_grads(net));
  std::vector<double> tloss(nthreads, 0.0);

  parallel_chunks(m, nthreads, [&](int tid, int begin, int end) {
    nn::ForwardCache cache = nn::make_cache(net);
    double g_out[1];
    for (int i = begin; i < end; ++i) {
      const int bi = idx[i];
      nn::mlp_forward_cached(net, buf.obs_at(bi), cache);
      const double err = cache.act.back()[0] - targets[bi];
      tloss[tid] += err * err;
      g_out[0] = 2.0 * err;
      nn::mlp_backward_acc(net, cache, std::span<const double>(g_out, 1),
                           tgrads[tid]);
    }
  });

  grads->zero();
  for (const auto& tg : tgrads) grads->add(tg);
  grads->scale(1.0 / m);
  double loss = 0.0;
  for (double l : tloss) loss += l;
  return loss / m;
}

double validation_loss(const nn::Mlp& net, const WindowSet& ws,
                       std::span<const int> idx, nn::MlpGrads* grads,
                       int threads) {
  const int m = static_cast<int>(idx.size());
  if (m == 0) throw std::invalid_argument("empty window minibatch");
  int n_feasible = 0;
  for (int i : idx) n_feasible += ws.infeasible[i] ? 0 : 1;
  const int n_infeasible = m - n_feasible;
  const double wf = n_feasible > 0 ? 1.0 / n_feasible : 0.0;
  const double wi = n_infeasible > 0 ? 1.0 / n_infeasible : 0.0;

  const int nthreads = std::clamp(threads, 1, m);
  std::vector<nn::MlpGrads> tgrads;
  if (grads)
    for (int t = 0; t < nthreads; ++t) tgrads.push_back(nn::make_grads(net));
  std::vector<double> tloss(nthreads, 0.0);

  parallel_chunks(m, nthreads, [&](int tid, int begin, int end) {
    nn::ForwardCache cache = nn::make_cache(net);
    double g_out[1];
    for (int i = begin; i < end; ++i) {
      const int wi_idx = idx[i];
      nn::mlp_forward_cached(net, ws.window(wi_idx), cache);
      const double b = cache.act.back()[0];
      double upstream = 0.0;
      if (!ws.infeasible[wi_idx]) {
        if (b > 0.0) {
          tloss[tid] += wf * b;
          upstream = wf;
        }
      } else {
        if (b < 0.0) {
          tloss[tid] += wi * -b;
          upstream = -wi;
        }
      }
      if (grads && upstream != 0.0) {
        g_out[0] = upstream;
        nn::mlp_backward_acc(net, cache, std::span<const double>(g_out, 1),
                             tgrads[tid]);
      }
    }
  });

  if (grads) {
    grads->zero();
    for (const auto& tg : tgrads) grads->add(tg);
  }
  double loss = 0.0;
  for (double l : tloss) loss += l;
  return loss;
}

std::vector<double> validation_scores(const nn::Mlp& net, const WindowSet& ws,
                                      int threads) {
  std::vector<double> out(ws.count, 0.0);
  parallel_chunks(ws.count, std::max(1, threads), [&](int, int begin, int end) {
    nn::ForwardCache cache = nn::make_cache(net);
    for (int i = begin; i < end; ++i) {
      nn::mlp_forward_cached(net, ws.window(i), cache);
      out[i] = cache.act.back()[0];
    }
  });
  return out;
}

double mean_positive_score(std::span<const double> b_values) {
  if (b_values.empty()) return 0.0;
  double acc = 0.0;
  for (double b : b_values) acc += std::max(b, 0.0);
  return acc / static_cast<double>(b_values.size());
}

}  // namespace lstc::rl
