#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace dse::log {

enum class Level : int { error = 0, warn = 1, info = 2, debug = 3 };

/// Verbosity is read once from the DSE_LOG environment variable
/// (error|warn|info|debug); unset or unknown values mean "warn".
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("DSE_LOG");
    if (env == nullptr) return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::warn;
  }();
  return level;
}

inline void message(Level level, const std::string& text) {
  if (static_cast<int>(level) > static_cast<int>(threshold())) return;
  static const char* const names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[dse][%s] %s\n", names[static_cast<int>(level)], text.c_str());
}

inline void error(const std::string& text) { message(Level::error, text); }
inline void warn(const std::string& text) { message(Level::warn, text); }
inline void info(const std::string& text) { message(Level::info, text); }
inline void debug(const std::string& text) { message(Level::debug, text); }

}  // namespace dse::log
