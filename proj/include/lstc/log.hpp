#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace lstc {

enum class LogLevel { debug = 0, info = 1, warn = 2, quiet = 3 };

// Verbosity from LSTC_LOG (debug|info|warn|quiet), default info.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("LSTC_LOG");
    if (!env) return LogLevel::info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(env, "quiet") == 0) return LogLevel::quiet;
    return LogLevel::info;
  }();
  return level;
}

inline void log_debug(const std::string& msg) {
  if (log_level() <= LogLevel::debug)
    std::fprintf(stderr, "[debug] %s\n", msg.c_str());
}

inline void log_info(const std::string& msg) {
  if (log_level() <= LogLevel::info)
    std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

inline void log_warn(const std::string& msg) {
  if (log_level() <= LogLevel::warn)
    std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

}  // namespace lstc
