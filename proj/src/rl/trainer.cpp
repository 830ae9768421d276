#include "lstc/trainer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lstc::rl {

std::vector<std::shared_ptr<const sim::RoadMap>> build_training_maps(
    const RunConfig& cfg) {
  std::vector<std::shared_ptr<const sim::RoadMap>> maps;
  const int count = cfg.map.plan.empty() ? cfg.map_count : 1;
  for (int i = 0; i < count; ++i)
    maps.push_back(std::make_shared<const sim::RoadMap>(
        sim::build_map(cfg.map, mix_seed(cfg.map_seed, i))));
  return maps;
}

std::vector<std::shared_ptr<const sim::RoadMap>> build_eval_maps(
    const RunConfig& cfg) {
  std::vector<std::shared_ptr<const sim::RoadMap>> maps;
  if (!cfg.map.plan.empty()) {
    maps.push_back(std::make_shared<const sim::RoadMap>(
        sim::build_map(cfg.map, cfg.eval.map_seed)));
    return maps;
  }
  for (int i = 0; i < cfg.eval.maps; ++i)
    maps.push_back(std::make_shared<const sim::RoadMap>(
        sim::build_map(cfg.map, mix_seed(cfg.eval.map_seed, i))));
  return maps;
}

Trainer::Trainer(const RunConfig& cfg) : cfg_(cfg), lagrange_(cfg.lagrange) {
  validate_config(cfg_);
  maps_ = build_training_maps(cfg_);
  pool_ = std::make_unique<EnvPool>(maps_, cfg_.env, cfg_.traffic,
                                    cfg_.ppo.num_envs);

  const nn::Activation act = nn::activation_from_string(cfg_.ppo.activation);
  std::vector<int> hidden(cfg_.ppo.hidden_layers, cfg_.ppo.hidden_size);
  auto shape = [&](int in, int out) {
    std::vector<int> s{in};
    s.insert(s.end(), hidden.begin(), hidden.end());
    s.push_back(out);
    return s;
  };

  Rng r0(mix_seed(cfg_.seed, 0xbead, 0));
  Rng r1(mix_seed(cfg_.seed, 0xbead, 1));
  Rng r2(mix_seed(cfg_.seed, 0xbead, 2));
  Rng r3(mix_seed(cfg_.seed, 0xbead, 3));
  policy_ = nn::make_mlp(shape(sim::kObsDim, 2), act, r0, 0.01);
  policy_.log_std = nn::Vector(2, cfg_.ppo.log_std_init);
  policy_.adam.m_log_std.assign(2, 0.0);
  policy_.adam.v_log_std.assign(2, 0.0);
  value_ = nn::make_mlp(shape(sim::kObsDim, 1), act, r1);
  cost_value_ = nn::make_mlp(shape(sim::kObsDim, 1), act, r2);
  validation_ =
      nn::make_mlp(shape((cfg_.ppo.window_n + 1) * sim::kObsDim, 1), act, r3);

  // Ablations pin the multipliers they do not use.
  if (cfg_.mode == Mode::ppo) {
    lagrange_.lambda_l = 0.0;
    lagrange_.lambda_s = 0.0;
  } else if (cfg_.mode == Mode::ppo_lag) {
    lagrange_.lambda_s = 0.0;
  }
}

EpochReport Trainer::train_epoch() {
  const auto& ppo = cfg_.ppo;
  const std::uint64_t e = static_cast<std::uint64_t>(epoch_);

  RolloutBuffer buf = collect_rollout(*pool_, policy_, value_, cost_value_,
                                      ppo.batch_size, cfg_.seed, e);

  compute_gae(buf.rewards, buf.v_pred, ppo.gamma, ppo.gae_lambda,
              reward_gae_episodes(buf), &buf.adv, &buf.ret);
  compute_gae(buf.costs, buf.vc_pred, ppo.gamma, ppo.gae_lambda,
              cost_gae_episodes(buf), &buf.adv_cost, &buf.ret_cost);
  normalize_advantages(buf.adv);

  const BufferStats stats = buffer_stats(buf, ppo.gamma);

  WindowSet windows;
  double b_plus = 0.0;
  if (cfg_.mode == Mode::lstc) {
    windows = extract_windows(buf, ppo.window_n);
    b_plus = mean_positive_score(
        validation_scores(validation_, windows, ppo.threads));
  }

  // Snapshot for rollback if anything inside the update turns non-finite.
  const nn::Mlp snap_policy = policy_;
  const nn::Mlp snap_value = value_;
  const nn::Mlp snap_cost = cost_value_;
  const nn::Mlp snap_validation = validation_;
  const LagrangeState snap_lagrange = lagrange_;

  EpochReport rep;
  try {
    // Update order: multipliers, validation net, policy, value, cost value.
    if (cfg_.mode == Mode::ppo_lag) {
      update_multipliers(lagrange_, {stats.mean_disc_cost, 0.0});
      lagrange_.lambda_s = 0.0;
    } else if (cfg_.mode == Mode::lstc) {
      update_multipliers(lagrange_, {stats.mean_disc_cost, b_plus});
    }

    std::vector<int> order(buf.size());
    std::iota(order.begin(), order.end(), 0);

    double loss_b = 0.0;
    std::vector<double> b_field;
    if (cfg_.mode == Mode::lstc) {
      nn::MlpGrads grads = nn::make_grads(validation_);
      long batches = 0;
      for (int pass = 0; pass < ppo.validation_passes; ++pass) {
        Rng shuffle_rng(mix_seed(cfg_.seed, e, 0x600 + pass));
        shuffle_rng.shuffle(order);
        for (int start = 0; start < buf.size(); start += ppo.minibatch_size) {
          const int m = std::min(ppo.minibatch_size, buf.size() - start);
          const std::span<const int> idx(order.data() + start, m);
          const double l =
              validation_loss(validation_, windows, idx, &grads, ppo.threads);
          if (!std::isfinite(l))
            throw std::runtime_error("validation loss non-finite");
          nn::adam_step(validation_, grads, ppo.lr_validation);
          loss_b += l;
          ++batches;
        }
      }
      loss_b /= static_cast<double>(batches);
      // Frozen penalty field for the policy update.
      b_field = validation_scores(validation_, windows, ppo.threads);
    }

    double loss_pi = 0.0, loss_v = 0.0, loss_vc = 0.0;
    long batches = 0;
    nn::MlpGrads pg = nn::make_grads(policy_);
    nn::MlpGrads vg = nn::make_grads(value_);
    nn::MlpGrads cg = nn::make_grads(cost_value_);
    for (int pass = 0; pass < ppo.update_passes; ++pass) {
      Rng shuffle_rng(mix_seed(cfg_.seed, e, 0x700 + pass));
      shuffle_rng.shuffle(order);
      for (int start = 0; start < buf.size(); start += ppo.minibatch_size) {
        const int m = std::min(ppo.minibatch_size, buf.size() - start);
        const std::span<const int> idx(order.data() + start, m);

        const double lp = lagrangian_policy_gradient(
            policy_, buf, idx, b_field, lagrange_.lambda_l, lagrange_.lambda_s,
            ppo.clip_eps, ppo.entropy_coef, &pg, ppo.threads);
        if (!std::isfinite(lp))
          throw std::runtime_error("policy loss non-finite");
        nn::adam_step(policy_, pg, ppo.lr_policy);

        const double lv =
            critic_gradient(value_, buf, idx, buf.ret, &vg, ppo.threads);
        if (!std::isfinite(lv))
          throw std::runtime_error("value loss non-finite");
        nn::adam_step(value_, vg, ppo.lr_value);

        const double lc = critic_gradient(cost_value_, buf, idx, buf.ret_cost,
                                          &cg, ppo.threads);
        if (!std::isfinite(lc))
          throw std::runtime_error("cost value loss non-finite");
        nn::adam_step(cost_value_, cg, ppo.lr_cost_value);

        loss_pi += lp;
        loss_v += lv;
        loss_vc += lc;
        ++batches;
      }
    }
    loss_pi /= static_cast<double>(batches);
    loss_v /= static_cast<double>(batches);
    loss_vc /= static_cast<double>(batches);

    epoch_ += 1;
    steps_done_ += buf.size();

    rep.epoch = epoch_;
    rep.steps = steps_done_;
    rep.ep_reward = stats.mean_ep_reward;
    rep.ep_cost = stats.mean_ep_cost;
    rep.disc_cost = stats.mean_disc_cost;
    rep.success_rate = stats.success_rate;
    rep.feasible_rate = stats.feasible_rate;
    rep.b_plus = b_plus;
    rep.lambda_l = lagrange_.lambda_l;
    rep.lambda_s = lagrange_.lambda_s;
    rep.loss_pi = loss_pi;
    rep.loss_v = loss_v;
    rep.loss_vc = loss_vc;
    rep.loss_b = loss_b;
  } catch (const std::exception& ex) {
    policy_ = snap_policy;
    value_ = snap_value;
    cost_value_ = snap_cost;
    validation_ = snap_validation;
    lagrange_ = snap_lagrange;
    throw std::runtime_error(std::string("epoch ") +
                             std::to_string(epoch_ + 1) +
                             " aborted, state rolled back: " + ex.what());
  }
  return rep;
}

}  // namespace lstc::rl
