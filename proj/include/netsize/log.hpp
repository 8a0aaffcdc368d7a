#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace netsize::log {

enum class Level { quiet = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from NETSIZE_LOG (quiet|warn|info|debug); default warn.
inline Level level() {
    static Level lvl = [] {
        const char* env = std::getenv("NETSIZE_LOG");
        if (!env) return Level::warn;
        if (std::strcmp(env, "quiet") == 0) return Level::quiet;
        if (std::strcmp(env, "info") == 0) return Level::info;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::warn;
    }();
    return lvl;
}

template <typename... Args>
void warn(const char* fmt, Args... args) {
    if (level() >= Level::warn) std::fprintf(stderr, fmt, args...);
}

template <typename... Args>
void info(const char* fmt, Args... args) {
    if (level() >= Level::info) std::fprintf(stderr, fmt, args...);
}

template <typename... Args>
void debug(const char* fmt, Args... args) {
    if (level() >= Level::debug) std::fprintf(stderr, fmt, args...);
}

} // namespace netsize::log
