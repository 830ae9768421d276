#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "lstc/environment.hpp"
#include "lstc/lagrange.hpp"
#include "lstc/road_map.hpp"

namespace lstc {

enum class Mode { lstc, ppo, ppo_lag };
Mode mode_from_string(const std::string& s);
const char* to_string(Mode m);

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double lr_policy = 3e-4;
  double lr_value = 3e-4;
  double lr_cost_value = 3e-4;
  double lr_validation = 3e-4;
  int batch_size = 20000;
  int minibatch_size = 2000;
  int update_passes = 10;      // K
  int validation_passes = 10;  // K_v
  double entropy_coef = 0.0;
  int window_n = 5;
  int num_envs = 4;
  int threads = 2;
  int hidden_layers = 2;
  int hidden_size = 64;
  std::string activation = "tanh";
  double log_std_init = std::log(0.5);
};

struct EvalProtocolConfig {
  int maps = 20;
  std::uint64_t map_seed = 5000;  // disjoint from training map seeds
  int group_size = 20;
  int repeats = 10;
};

// Every tunable of the project; file format is INI-style key=value with
// [section] headers. Unknown keys are rejected, omitted keys keep these
// defaults, and parse(serialize(c)) == c.
struct RunConfig {
  Mode mode = Mode::lstc;
  std::uint64_t seed = 1;
  long total_steps = 1'000'000;
  int checkpoint_every = 10;  // epochs
  std::string out_dir = "runs/out";

  PpoConfig ppo;
  rl::LagrangeState lagrange;
  sim::EnvConfig env;
  sim::TrafficConfig traffic;
  sim::MapConfig map;
  int map_count = 20;
  std::uint64_t map_seed = 1000;
  EvalProtocolConfig eval;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig parse_config_text(const std::string& text,
                            const std::string& source_name = "<config>");
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
// Range checks shared by parse and the CLI; throws ConfigError.
void validate_config(const RunConfig& cfg);

}  // namespace lstc
