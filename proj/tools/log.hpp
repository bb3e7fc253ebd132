#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace subcol::cli {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
  static LogLevel lvl = [] {
    const char* env = std::getenv("SUBCOL_LOG");
    if (!env) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return lvl;
}

template <typename... Args>
void log_at(LogLevel lvl, const char* tag, const char* fmt, Args... args) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  std::fprintf(stderr, "[%s] ", tag);
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

#define SUBCOL_ERROR(...) ::subcol::cli::log_at(::subcol::cli::LogLevel::Error, "error", __VA_ARGS__)
#define SUBCOL_INFO(...) ::subcol::cli::log_at(::subcol::cli::LogLevel::Info, "info", __VA_ARGS__)
#define SUBCOL_DEBUG(...) ::subcol::cli::log_at(::subcol::cli::LogLevel::Debug, "debug", __VA_ARGS__)

}  // namespace subcol::cli
