#include "lstc/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "lstc/mlp.hpp"

namespace lstc {

Mode mode_from_string(const std::string& s) {
  if (s == "lstc") return Mode::lstc;
  if (s == "ppo") return Mode::ppo;
  if (s == "ppo-lag") return Mode::ppo_lag;
  throw ConfigError("unknown mode: '" + s + "' (expected lstc|ppo|ppo-lag)");
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::lstc: return "lstc";
    case Mode::ppo: return "ppo";
    case Mode::ppo_lag: return "ppo-lag";
  }
  return "?";
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw ConfigError("bad number: '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw ConfigError("bad integer: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw ConfigError("bad integer: '" + s + "'");
  return v;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

// Small helpers binding a member through an accessor lambda.
template <typename Get>
Field field_double(const char* sec, const char* key, Get&& get_ref) {
  return {sec, key,
          [get_ref](RunConfig& c, const std::string& v) {
            get_ref(c) = parse_double(v);
          },
          [get_ref](const RunConfig& c) {
            return fmt_double(get_ref(const_cast<RunConfig&>(c)));
          }};
}

template <typename Get>
Field field_int(const char* sec, const char* key, Get&& get_ref) {
  return {sec, key,
          [get_ref](RunConfig& c, const std::string& v) {
            get_ref(c) = static_cast<int>(parse_long(v));
          },
          [get_ref](const RunConfig& c) {
            return std::to_string(get_ref(const_cast<RunConfig&>(c)));
          }};
}

template <typename Get>
Field field_long(const char* sec, const char* key, Get&& get_ref) {
  return {sec, key,
          [get_ref](RunConfig& c, const std::string& v) {
            get_ref(c) = parse_long(v);
          },
          [get_ref](const RunConfig& c) {
            return std::to_string(get_ref(const_cast<RunConfig&>(c)));
          }};
}

template <typename Get>
Field field_u64(const char* sec, const char* key, Get&& get_ref) {
  return {sec, key,
          [get_ref](RunConfig& c, const std::string& v) {
            get_ref(c) = parse_u64(v);
          },
          [get_ref](const RunConfig& c) {
            return std::to_string(get_ref(const_cast<RunConfig&>(c)));
          }};
}

template <typename Get>
Field field_string(const char* sec, const char* key, Get&& get_ref) {
  return {sec, key,
          [get_ref](RunConfig& c, const std::string& v) { get_ref(c) = v; },
          [get_ref](const RunConfig& c) {
            return get_ref(const_cast<RunConfig&>(c));
          }};
}

#define DREF(expr) [](RunConfig& c) -> auto& { return c.expr; }

const std::vector<Field>& fields() {
  static const std::vector<Field> kFields = [] {
    std::vector<Field> f;
    // [run]
    f.push_back({"run", "mode",
                 [](RunConfig& c, const std::string& v) {
                   c.mode = mode_from_string(v);
                 },
                 [](const RunConfig& c) { return to_string(c.mode); }});
    f.push_back(field_u64("run", "seed", DREF(seed)));
    f.push_back(field_long("run", "total_steps", DREF(total_steps)));
    f.push_back(field_int("run", "checkpoint_every", DREF(checkpoint_every)));
    f.push_back(field_string("run", "out_dir", DREF(out_dir)));
    // [net]
    f.push_back(field_int("net", "hidden_layers", DREF(ppo.hidden_layers)));
    f.push_back(field_int("net", "hidden_size", DREF(ppo.hidden_size)));
    f.push_back(field_string("net", "activation", DREF(ppo.activation)));
    f.push_back(field_double("net", "log_std_init", DREF(ppo.log_std_init)));
    // [ppo]
    f.push_back(field_double("ppo", "gamma", DREF(ppo.gamma)));
    f.push_back(field_double("ppo", "gae_lambda", DREF(ppo.gae_lambda)));
    f.push_back(field_double("ppo", "clip_eps", DREF(ppo.clip_eps)));
    f.push_back(field_double("ppo", "lr_policy", DREF(ppo.lr_policy)));
    f.push_back(field_double("ppo", "lr_value", DREF(ppo.lr_value)));
    f.push_back(field_double("ppo", "lr_cost_value", DREF(ppo.lr_cost_value)));
    f.push_back(field_double("ppo", "lr_validation", DREF(ppo.lr_validation)));
    f.push_back(field_int("ppo", "batch_size", DREF(ppo.batch_size)));
    f.push_back(field_int("ppo", "minibatch_size", DREF(ppo.minibatch_size)));
    f.push_back(field_int("ppo", "update_passes", DREF(ppo.update_passes)));
    f.push_back(
        field_int("ppo", "validation_passes", DREF(ppo.validation_passes)));
    f.push_back(field_double("ppo", "entropy_coef", DREF(ppo.entropy_coef)));
    f.push_back(field_int("ppo", "window_n", DREF(ppo.window_n)));
    f.push_back(field_int("ppo", "num_envs", DREF(ppo.num_envs)));
    f.push_back(field_int("ppo", "threads", DREF(ppo.threads)));
    // [lagrange]
    f.push_back(
        field_double("lagrange", "lambda_l_init", DREF(lagrange.lambda_l)));
    f.push_back(
        field_double("lagrange", "lambda_s_init", DREF(lagrange.lambda_s)));
    f.push_back(field_double("lagrange", "alpha_l", DREF(lagrange.alpha_l)));
    f.push_back(field_double("lagrange", "alpha_s", DREF(lagrange.alpha_s)));
    f.push_back(
        field_double("lagrange", "cost_threshold", DREF(lagrange.threshold_b)));
    f.push_back(
        field_double("lagrange", "lambda_max", DREF(lagrange.lambda_max)));
    f.push_back({"lagrange", "update_mode",
                 [](RunConfig& c, const std::string& v) {
                   c.lagrange.mode = rl::multiplier_mode_from_string(v);
                 },
                 [](const RunConfig& c) {
                   return rl::to_string(c.lagrange.mode);
                 }});
    // [env]
    f.push_back(field_double("env", "dt", DREF(env.dt)));
    f.push_back(field_double("env", "v_max", DREF(env.v_max)));
    f.push_back(field_double("env", "delta_max", DREF(env.delta_max)));
    f.push_back(field_double("env", "wheelbase", DREF(env.wheelbase)));
    f.push_back(field_double("env", "ego_radius", DREF(env.ego_radius)));
    f.push_back(field_double("env", "accel_min", DREF(env.accel_min)));
    f.push_back(field_double("env", "accel_max", DREF(env.accel_max)));
    f.push_back(
        field_int("env", "max_episode_steps", DREF(env.max_episode_steps)));
    f.push_back(field_double("env", "lidar_range", DREF(env.lidar_range)));
    f.push_back(
        field_double("env", "checkpoint_norm", DREF(env.checkpoint_norm)));
    f.push_back(field_double("env", "spawn_s", DREF(env.spawn_s)));
    // [reward]
    f.push_back(field_double("reward", "c_dis", DREF(env.c_dis)));
    f.push_back(field_double("reward", "c_speed", DREF(env.c_speed)));
    f.push_back(field_double("reward", "c_yaw", DREF(env.c_yaw)));
    f.push_back(field_double("reward", "c_steering", DREF(env.c_steering)));
    f.push_back(field_double("reward", "r_success", DREF(env.r_success)));
    f.push_back(field_double("reward", "r_departure", DREF(env.r_departure)));
    // [traffic]
    f.push_back(field_double("traffic", "density", DREF(traffic.density)));
    f.push_back(field_double("traffic", "speed", DREF(traffic.speed)));
    f.push_back(
        field_double("traffic", "accident_prob", DREF(traffic.accident_prob)));
    f.push_back(
        field_double("traffic", "gap_follow", DREF(traffic.gap_follow)));
    f.push_back(field_double("traffic", "decel", DREF(traffic.decel)));
    f.push_back(field_double("traffic", "accel", DREF(traffic.accel)));
    f.push_back(field_double("traffic", "vehicle_half_len",
                             DREF(traffic.vehicle_half_len)));
    f.push_back(field_double("traffic", "vehicle_half_wid",
                             DREF(traffic.vehicle_half_wid)));
    f.push_back(field_double("traffic", "spawn_clearance",
                             DREF(traffic.spawn_clearance)));
    f.push_back(field_double("traffic", "obstacle_radius_min",
                             DREF(traffic.obstacle_radius_min)));
    f.push_back(field_double("traffic", "obstacle_radius_max",
                             DREF(traffic.obstacle_radius_max)));
    // [map]
    f.push_back(field_int("map", "count", DREF(map_count)));
    f.push_back(field_u64("map", "seed", DREF(map_seed)));
    f.push_back(field_int("map", "lanes", DREF(map.lanes)));
    f.push_back(field_double("map", "lane_width", DREF(map.lane_width)));
    f.push_back(field_int("map", "segments_min", DREF(map.segments_min)));
    f.push_back(field_int("map", "segments_max", DREF(map.segments_max)));
    f.push_back(
        field_double("map", "segment_len_min", DREF(map.segment_len_min)));
    f.push_back(
        field_double("map", "segment_len_max", DREF(map.segment_len_max)));
    f.push_back(field_double("map", "radius_min", DREF(map.radius_min)));
    f.push_back(field_double("map", "radius_max", DREF(map.radius_max)));
    f.push_back(field_double("map", "sweep_min", DREF(map.sweep_min)));
    f.push_back(field_double("map", "sweep_max", DREF(map.sweep_max)));
    f.push_back(field_double("map", "total_len_min", DREF(map.total_len_min)));
    f.push_back(field_double("map", "total_len_max", DREF(map.total_len_max)));
    f.push_back(field_double("map", "checkpoint_spacing",
                             DREF(map.checkpoint_spacing)));
    f.push_back(field_string("map", "plan", DREF(map.plan)));
    // [eval]
    f.push_back(field_int("eval", "maps", DREF(eval.maps)));
    f.push_back(field_u64("eval", "map_seed", DREF(eval.map_seed)));
    f.push_back(field_int("eval", "group_size", DREF(eval.group_size)));
    f.push_back(field_int("eval", "repeats", DREF(eval.repeats)));
    return f;
  }();
  return kFields;
}

#undef DREF

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text,
                            const std::string& source_name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError(source_name + ":" + std::to_string(lineno) + ": " +
                        msg);
    };
    if (t.front() == '[') {
      if (t.back() != ']') fail("unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    bool found = false;
    for (const auto& f : fields()) {
      if (f.section == section && f.key == key) {
        try {
          f.set(cfg, value);
        } catch (const std::exception& e) {
          fail(std::string(e.what()));
        }
        found = true;
        break;
      }
    }
    if (!found) fail("unknown key '" + section + "." + key + "'");
  }
  validate_config(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << "\n";
  }
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
  };
  require(cfg.total_steps > 0, "total_steps must be positive");
  require(cfg.ppo.gamma >= 0.0 && cfg.ppo.gamma <= 1.0, "gamma outside [0,1]");
  require(cfg.ppo.gae_lambda >= 0.0 && cfg.ppo.gae_lambda <= 1.0,
          "gae_lambda outside [0,1]");
  require(cfg.ppo.clip_eps > 0.0 && cfg.ppo.clip_eps < 1.0,
          "clip_eps outside (0,1)");
  require(cfg.ppo.batch_size > 0, "batch_size must be positive");
  require(cfg.ppo.minibatch_size > 0 &&
              cfg.ppo.minibatch_size <= cfg.ppo.batch_size,
          "minibatch_size must be in [1, batch_size]");
  require(cfg.ppo.update_passes > 0 && cfg.ppo.validation_passes > 0,
          "update passes must be positive");
  require(cfg.ppo.window_n >= 1, "window_n must be >= 1");
  require(cfg.ppo.num_envs >= 1, "num_envs must be >= 1");
  require(cfg.ppo.threads >= 1, "threads must be >= 1");
  require(cfg.ppo.hidden_layers >= 1 && cfg.ppo.hidden_size >= 1,
          "network shape must be positive");
  require(cfg.ppo.lr_policy > 0 && cfg.ppo.lr_value > 0 &&
              cfg.ppo.lr_cost_value > 0 && cfg.ppo.lr_validation > 0,
          "learning rates must be positive");
  require(cfg.lagrange.lambda_l >= 0 && cfg.lagrange.lambda_s >= 0,
          "initial multipliers must be >= 0");
  require(cfg.lagrange.lambda_max > 0, "lambda_max must be positive");
  require(cfg.env.dt > 0, "dt must be positive");
  require(cfg.env.v_max > 0, "v_max must be positive");
  require(cfg.env.max_episode_steps > 0, "max_episode_steps must be positive");
  require(cfg.traffic.density >= 0, "traffic density must be >= 0");
  require(cfg.traffic.accident_prob >= 0.0 && cfg.traffic.accident_prob <= 1.0,
          "accident_prob outside [0,1]");
  require(cfg.map_count >= 1, "map count must be >= 1");
  require(cfg.eval.maps >= 1 && cfg.eval.group_size >= 1 &&
              cfg.eval.repeats >= 1,
          "eval protocol values must be >= 1");
  nn::activation_from_string(cfg.ppo.activation);  // throws when unknown
}

}  // namespace lstc
