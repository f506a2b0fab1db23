#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace gibbsdyn::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Level taken from GIBBS_DYN_LOG (error|warn|info|debug); warn when unset or unrecognised.
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("GIBBS_DYN_LOG");
    const std::string_view v = env ? env : "";
    if (v == "error") return Level::error;
    if (v == "info") return Level::info;
    if (v == "debug") return Level::debug;
    return Level::warn;
  }();
  return level;
}

inline void write(Level level, const std::string& message) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  static std::mutex mu;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[gibbs-dyn " << names[static_cast<int>(level)] << "] " << message << '\n';
}

inline void warn(const std::string& m) { write(Level::warn, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void debug(const std::string& m) { write(Level::debug, m); }

}  // namespace gibbsdyn::log
