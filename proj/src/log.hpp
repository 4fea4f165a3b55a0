#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tracesynth::log {

enum class Level : int { error = 0, warn = 1, info = 2, debug = 3 };

// Verbosity comes from TRACESYNTH_LOG (error|warn|info|debug), default warn.
inline Level threshold() {
    static Level level = [] {
        const char* env = std::getenv("TRACESYNTH_LOG");
        if (env == nullptr) return Level::warn;
        if (std::strcmp(env, "error") == 0) return Level::error;
        if (std::strcmp(env, "warn") == 0) return Level::warn;
        if (std::strcmp(env, "info") == 0) return Level::info;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        return Level::warn;
    }();
    return level;
}

inline void logv(Level level, const char* tag, const char* fmt, va_list ap) {
    if (static_cast<int>(level) > static_cast<int>(threshold())) return;
    std::fprintf(stderr, "[tracesynth %s] ", tag);
    std::vfprintf(stderr, fmt, ap);
    std::fputc('\n', stderr);
}

inline void error(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    logv(Level::error, "error", fmt, ap);
    va_end(ap);
}

inline void warn(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    logv(Level::warn, "warn", fmt, ap);
    va_end(ap);
}

inline void info(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    logv(Level::info, "info", fmt, ap);
    va_end(ap);
}

inline void debug(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    logv(Level::debug, "debug", fmt, ap);
    va_end(ap);
}

} // namespace tracesynth::log
