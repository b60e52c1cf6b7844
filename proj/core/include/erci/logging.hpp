#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace erci {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

/// Level comes from the ERCI_LOG environment variable: "quiet", "info", "debug".
inline LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("ERCI_LOG");
    if (env == nullptr) return LogLevel::quiet;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::quiet;
  }();
  return level;
}

template <class... Args>
void log_info(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::info) {
    std::fprintf(stderr, "[erci] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

template <class... Args>
void log_debug(const char* fmt, Args... args) {
  if (log_level() >= LogLevel::debug) {
    std::fprintf(stderr, "[erci:debug] ");
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "\n");
  }
}

}  // namespace erci
