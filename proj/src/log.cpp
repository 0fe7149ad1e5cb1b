#include "log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace decof {

namespace {

LogLevel parse_level() {
    const char* env = std::getenv("DECOF_LOG");
    if (!env) return LogLevel::warn;
    if (std::strcmp(env, "quiet") == 0 || std::strcmp(env, "error") == 0) return LogLevel::error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    return LogLevel::warn;
}

const char* level_tag(LogLevel level) {
    switch (level) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}

std::mutex g_log_mutex;

} // namespace

LogLevel log_level() {
    static LogLevel level = parse_level();
    return level;
}

void log_message(LogLevel level, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_log_mutex);
    std::fprintf(stderr, "[decof %s] %s\n", level_tag(level), msg.c_str());
}

} // namespace decof
