// lstc -- train/eval/export-traj/plot entry points.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "lstc/checkpoint.hpp"
#include "lstc/config.hpp"
#include "lstc/evaluate.hpp"
#include "lstc/kernels.hpp"
#include "lstc/log.hpp"
#include "lstc/metrics.hpp"
#include "lstc/svg_plot.hpp"
#include "lstc/trainer.hpp"

namespace fs = std::filesystem;
using namespace lstc;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string checkpoint_path;
  std::string mode;
  std::int64_t seed = -1;
};

RunConfig resolve_config(const CommonOpts& opts) {
  RunConfig cfg =
      opts.config_path.empty() ? RunConfig{} : load_config_file(opts.config_path);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.mode.empty()) cfg.mode = mode_from_string(opts.mode);
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  validate_config(cfg);
  return cfg;
}

int cmd_train(const CommonOpts& opts) {
  std::unique_ptr<rl::Trainer> trainer;
  if (!opts.checkpoint_path.empty()) {
    trainer = load_checkpoint(opts.checkpoint_path);
    log_info("resumed from " + opts.checkpoint_path + " at epoch " +
             std::to_string(trainer->epoch()));
  } else {
    trainer = std::make_unique<rl::Trainer>(resolve_config(opts));
  }
  // --out applies to the resumed run as well so the artifacts can land in
  // a fresh directory.
  RunConfig cfg = trainer->config();
  const std::string out_dir = opts.out_dir.empty() ? cfg.out_dir : opts.out_dir;
  fs::create_directories(out_dir);

  log_info(std::string("kernels: ") +
           kernels::backend_name(kernels::active_backend()));
  log_info("training mode=" + std::string(to_string(cfg.mode)) + " seed=" +
           std::to_string(cfg.seed) + " budget=" +
           std::to_string(cfg.total_steps) + " steps");

  MetricsWriter metrics((fs::path(out_dir) / "metrics.csv").string());
  const auto t0 = std::chrono::steady_clock::now();
  while (!trainer->done()) {
    const rl::EpochReport rep = trainer->train_epoch();
    metrics.write(rep);
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    char line[256];
    std::snprintf(line, sizeof(line),
                  "epoch %ld steps %ld reward %.2f cost %.2f success %.2f "
                  "feasible %.3f lambda_l %.3f lambda_s %.3f (%.1fs)",
                  rep.epoch, rep.steps, rep.ep_reward, rep.ep_cost,
                  rep.success_rate, rep.feasible_rate, rep.lambda_l,
                  rep.lambda_s, dt);
    log_info(line);
    if (cfg.checkpoint_every > 0 &&
        trainer->epoch() % cfg.checkpoint_every == 0) {
      save_checkpoint((fs::path(out_dir) / ("checkpoint_epoch" +
                                            std::to_string(trainer->epoch()) +
                                            ".bin"))
                          .string(),
                      *trainer);
    }
  }
  save_checkpoint((fs::path(out_dir) / "checkpoint_final.bin").string(),
                  *trainer);
  log_info("done: " + std::to_string(trainer->steps_done()) + " steps, " +
           std::to_string(trainer->epoch()) + " epochs");
  return 0;
}

int cmd_eval(const CommonOpts& opts) {
  auto trainer = load_checkpoint(opts.checkpoint_path);
  RunConfig cfg = trainer->config();
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  const std::string out_dir = opts.out_dir.empty() ? cfg.out_dir : opts.out_dir;

  const auto maps = rl::build_eval_maps(cfg);
  const rl::EvalSummary summary =
      rl::evaluate(trainer->policy(), maps, cfg.env, cfg.traffic,
                   cfg.eval.group_size, cfg.eval.repeats,
                   mix_seed(cfg.seed, 0xe7a1));
  std::cout << summary_table(summary);
  fs::create_directories(out_dir);
  const std::string csv = (fs::path(out_dir) / "eval_episodes.csv").string();
  write_summary_csv(summary, csv);
  std::ofstream table((fs::path(out_dir) / "eval_summary.txt").string(),
                      std::ios::trunc);
  table << summary_table(summary);
  log_info("wrote " + csv);
  return 0;
}

int cmd_export_traj(const CommonOpts& opts, int episodes, int map_index) {
  auto trainer = load_checkpoint(opts.checkpoint_path);
  RunConfig cfg = trainer->config();
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  const std::string out_dir =
      opts.out_dir.empty() ? cfg.out_dir + "/trajectories" : opts.out_dir;

  const auto maps = rl::build_eval_maps(cfg);
  if (map_index < 0 || map_index >= static_cast<int>(maps.size()))
    throw ConfigError("map index out of range (have " +
                      std::to_string(maps.size()) + " eval maps)");
  const auto paths = rl::export_trajectories(
      trainer->policy(), maps[map_index], cfg.env, cfg.traffic, episodes,
      mix_seed(cfg.seed, 0x7a7), out_dir);
  for (const auto& p : paths) std::cout << p << "\n";
  return 0;
}

int cmd_plot(const std::string& csv, const std::string& out_dir) {
  const auto paths = plot_metrics_csv(csv, out_dir);
  for (const auto& p : paths) std::cout << p << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-constrained safe-RL driving trainer"};
  app.require_subcommand(1);

  CommonOpts opts;
  int episodes = 5;
  int map_index = 0;
  std::string plot_csv;
  std::string plot_out = "plots";

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    if (with_config) cmd->add_option("--config", opts.config_path, "config file");
    cmd->add_option("--seed", opts.seed, "seed override");
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--mode", opts.mode, "mode override (lstc|ppo|ppo-lag)");
  };

  CLI::App* train = app.add_subcommand("train", "run training epochs");
  add_common(train, true);
  train->add_option("--checkpoint", opts.checkpoint_path,
                    "resume from this checkpoint");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, false);
  eval->add_option("--checkpoint", opts.checkpoint_path, "checkpoint to load")
      ->required();

  CLI::App* traj =
      app.add_subcommand("export-traj", "export per-episode trajectory CSVs");
  add_common(traj, false);
  traj->add_option("--checkpoint", opts.checkpoint_path, "checkpoint to load")
      ->required();
  traj->add_option("--episodes", episodes, "episode count");
  traj->add_option("--map-index", map_index, "eval map index");

  CLI::App* plot = app.add_subcommand("plot", "render metric curves as SVG");
  plot->add_option("csv", plot_csv, "metrics csv path")->required();
  plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(train)) return cmd_train(opts);
    if (app.got_subcommand(eval)) return cmd_eval(opts);
    if (app.got_subcommand(traj)) return cmd_export_traj(opts, episodes, map_index);
    if (app.got_subcommand(plot)) return cmd_plot(plot_csv, plot_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
