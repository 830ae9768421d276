#include "lstc/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "lstc/gaussian.hpp"

namespace lstc::rl {

EnvPool::EnvPool(std::vector<std::shared_ptr<const sim::RoadMap>> maps,
                 sim::EnvConfig env_cfg, sim::TrafficConfig traffic_cfg,
                 int workers)
    : maps_(std::move(maps)) {
  if (maps_.empty()) throw std::invalid_argument("EnvPool: no maps");
  if (workers < 1) throw std::invalid_argument("EnvPool: workers < 1");
  envs_.reserve(workers);
  for (int w = 0; w < workers; ++w)
    envs_.emplace_back(maps_.front(), env_cfg, traffic_cfg);
}

namespace {

// One worker's share of the rollout, written into a private buffer.
void collect_worker(sim::Environment& env,
                    const std::vector<std::shared_ptr<const sim::RoadMap>>& maps,
                    const nn::Mlp& policy, const nn::Mlp& value,
                    const nn::Mlp& cost_value, int quota, std::uint64_t seed,
                    std::uint64_t epoch, int worker, RolloutBuffer* out) {
  Rng act_rng(mix_seed(seed, epoch, 0x100 + worker));
  nn::ForwardCache pc = nn::make_cache(policy);
  nn::ForwardCache vc = nn::make_cache(value);
  nn::ForwardCache cc = nn::make_cache(cost_value);

  out->obs.reserve(static_cast<size_t>(quota) * sim::kObsDim);
  out->actions.reserve(static_cast<size_t>(quota) * 2);

  int collected = 0;
  std::uint64_t episode = 0;
  while (collected < quota) {
    const std::uint64_t ep_key = mix_seed(seed, epoch, (episode << 8) | worker);
    env.set_map(maps[ep_key % maps.size()]);
    sim::Observation obs = env.reset(ep_key);
    ++episode;

    EpisodeSpan span;
    span.begin = collected;

    while (env.status() == sim::Termination::running && collected < quota) {
      nn::mlp_forward_cached(policy, obs, pc);
      nn::mlp_forward_cached(value, obs, vc);
      nn::mlp_forward_cached(cost_value, obs, cc);
      const double v = vc.act.back()[0];
      const double vcost = cc.act.back()[0];
      const nn::GaussianAction ga =
          nn::gaussian_sample(pc.act.back(), *policy.log_std, act_rng);

      const sim::StepOutcome step = env.step({ga.action[0], ga.action[1]});

      out->obs.insert(out->obs.end(), obs.begin(), obs.end());
      out->actions.insert(out->actions.end(), ga.pre_clip.begin(),
                          ga.pre_clip.end());
      out->logp_old.push_back(ga.log_prob);
      out->rewards.push_back(step.reward);
      out->costs.push_back(static_cast<double>(step.cost));
      out->v_pred.push_back(v);
      out->vc_pred.push_back(vcost);
      out->feasible.push_back(step.feasible ? 1 : 0);
      span.total_reward += step.reward;
      span.total_cost += step.cost;
      ++collected;

      obs = step.observation;
    }

    span.end = collected;
    switch (env.status()) {
      case sim::Termination::success:
        span.kind = EpisodeEnd::success;
        break;
      case sim::Termination::departure:
        span.kind = EpisodeEnd::departure;
        break;
      case sim::Termination::max_steps:
        span.kind = EpisodeEnd::timeout;
        break;
      case sim::Termination::running:
        span.kind = EpisodeEnd::truncated;
        break;
    }
    if (span.bootstrapped()) {
      span.bootstrap_v = nn::mlp_forward(value, obs)[0];
      span.bootstrap_vc = nn::mlp_forward(cost_value, obs)[0];
    }
    if (span.end > span.begin) out->episodes.push_back(span);
  }
}

}  // namespace

RolloutBuffer collect_rollout(EnvPool& pool, const nn::Mlp& policy,
                              const nn::Mlp& value, const nn::Mlp& cost_value,
                              int total_steps, std::uint64_t seed,
                              std::uint64_t epoch) {
  if (total_steps < 1) throw std::invalid_argument("collect_rollout: steps");
  const int workers = pool.workers();
  std::vector<RolloutBuffer> parts(workers);
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    const int quota = total_steps / workers + (w < total_steps % workers ? 1 : 0);
    if (quota == 0) continue;
    threads.emplace_back(collect_worker, std::ref(pool.env(w)),
                         std::cref(pool.maps()), std::cref(policy),
                         std::cref(value), std::cref(cost_value), quota, seed,
                         epoch, w, &parts[w]);
  }
  for (auto& t : threads) t.join();

  // Concatenate in worker order so the result does not depend on timing.
  RolloutBuffer buf;
  for (int w = 0; w < workers; ++w) {
    RolloutBuffer& p = parts[w];
    const int offset = buf.size();
    buf.obs.insert(buf.obs.end(), p.obs.begin(), p.obs.end());
    buf.actions.insert(buf.actions.end(), p.actions.begin(), p.actions.end());
    buf.logp_old.insert(buf.logp_old.end(), p.logp_old.begin(),
                        p.logp_old.end());
    buf.rewards.insert(buf.rewards.end(), p.rewards.begin(), p.rewards.end());
    buf.costs.insert(buf.costs.end(), p.costs.begin(), p.costs.end());
    buf.v_pred.insert(buf.v_pred.end(), p.v_pred.begin(), p.v_pred.end());
    buf.vc_pred.insert(buf.vc_pred.end(), p.vc_pred.begin(), p.vc_pred.end());
    buf.feasible.insert(buf.feasible.end(), p.feasible.begin(),
                        p.feasible.end());
    for (EpisodeSpan span : p.episodes) {
      span.begin += offset;
      span.end += offset;
      buf.episodes.push_back(span);
    }
  }
  return buf;
}

void compute_gae(std::span<const double> x, std::span<const double> pred,
                 double gamma, double lambda,
                 const std::vector<GaeEpisode>& episodes,
                 std::vector<double>* adv, std::vector<double>* ret) {
  const int n = static_cast<int>(x.size());
  if (static_cast<int>(pred.size()) != n)
    throw std::invalid_argument("compute_gae: value array misaligned");
  int covered = 0;
  for (const auto& e : episodes) {
    if (e.begin < 0 || e.end > n || e.begin >= e.end)
      throw std::invalid_argument("compute_gae: bad episode span");
    covered += e.end - e.begin;
  }
  if (covered != n)
    throw std::invalid_argument("compute_gae: episodes do not partition the "
                                "buffer");
  adv->assign(n, 0.0);
  ret->assign(n, 0.0);
  for (const auto& e : episodes) {
    double last = 0.0;
    for (int t = e.end - 1; t >= e.begin; --t) {
      const double next_v = t == e.end - 1
                                ? (e.bootstrapped ? e.bootstrap_value : 0.0)
                                : pred[t + 1];
      const double delta = x[t] + gamma * next_v - pred[t];
      last = delta + gamma * lambda * last;
      (*adv)[t] = last;
      (*ret)[t] = last + pred[t];
    }
  }
}

std::vector<GaeEpisode> reward_gae_episodes(const RolloutBuffer& buf) {
  std::vector<GaeEpisode> out;
  for (const auto& e : buf.episodes)
    out.push_back({e.begin, e.end, e.bootstrapped(), e.bootstrap_v});
  return out;
}

std::vector<GaeEpisode> cost_gae_episodes(const RolloutBuffer& buf) {
  std::vector<GaeEpisode> out;
  for (const auto& e : buf.episodes)
    out.push_back({e.begin, e.end, e.bootstrapped(), e.bootstrap_vc});
  return out;
}

void normalize_advantages(std::vector<double>& adv) {
  if (adv.empty()) return;
  double mean = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : adv) a = (a - mean) * inv;
}

WindowSet extract_windows(const RolloutBuffer& buf, int n) {
  if (n < 1) throw std::invalid_argument("extract_windows: n < 1");
  WindowSet ws;
  ws.n = n;
  ws.width = (n + 1) * sim::kObsDim;
  ws.count = buf.size();
  ws.data.resize(static_cast<size_t>(ws.count) * ws.width);
  ws.infeasible.assign(ws.count, 0);
  for (const auto& e : buf.episodes) {
    for (int t = e.begin; t < e.end; ++t) {
      double* dst = ws.data.data() + static_cast<size_t>(t) * ws.width;
      bool bad = false;
      for (int j = 0; j <= n; ++j) {
        const int src = std::min(t + j, e.end - 1);
        const auto o = buf.obs_at(src);
        std::copy(o.begin(), o.end(), dst + static_cast<size_t>(j) * sim::kObsDim);
      }
      const int last_step = std::min(t + n, e.end - 1);
      for (int j = t; j <= last_step; ++j) {
        if (buf.costs[j] > 0.0) {
          bad = true;
          break;
        }
      }
      ws.infeasible[t] = bad ? 1 : 0;
    }
  }
  return ws;
}

BufferStats buffer_stats(const RolloutBuffer& buf, double gamma) {
  BufferStats st;
  int completed = 0;
  int successes = 0;
  double sum_r = 0.0;
  double sum_c = 0.0;
  for (const auto& e : buf.episodes) {
    if (e.kind != EpisodeEnd::truncated) {
      ++completed;
      sum_r += e.total_reward;
      sum_c += e.total_cost;
      if (e.kind == EpisodeEnd::success) ++successes;
    }
  }
  // Fall back to all episodes early in training when nothing completes.
  if (completed == 0) {
    for (const auto& e : buf.episodes) {
      sum_r += e.total_reward;
      sum_c += e.total_cost;
    }
    const int n = std::max(1, static_cast<int>(buf.episodes.size()));
    st.mean_ep_reward = sum_r / n;
    st.mean_ep_cost = sum_c / n;
    st.success_rate = 0.0;
  } else {
    st.mean_ep_reward = sum_r / completed;
    st.mean_ep_cost = sum_c / completed;
    st.success_rate = static_cast<double>(successes) / completed;
  }
  st.completed_episodes = completed;

  double disc = 0.0;
  for (const auto& e : buf.episodes) {
    double g = 1.0;
    double c = 0.0;
    for (int t = e.begin; t < e.end; ++t) {
      c += g * buf.costs[t];
      g *= gamma;
    }
    disc += c;
  }
  st.mean_disc_cost =
      buf.episodes.empty() ? 0.0 : disc / static_cast<double>(buf.episodes.size());

  int feasible = 0;
  for (auto f : buf.feasible) feasible += f;
  st.feasible_rate =
      buf.size() == 0 ? 1.0 : static_cast<double>(feasible) / buf.size();
  return st;
}

}  // namespace lstc::rl
