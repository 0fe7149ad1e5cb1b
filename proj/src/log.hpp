#pragma once

#include <sstream>
#include <string>

namespace decof {

// Verbosity is controlled by the DECOF_LOG environment variable:
// "quiet"/"error", "warn" (default), "info", "debug".
enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

LogLevel log_level();
void log_message(LogLevel level, const std::string& msg);

namespace detail {
template <typename... Args>
void log_fmt(LogLevel level, const Args&... args) {
    if (level > log_level()) return;
    std::ostringstream os;
    (os << ... << args);
    log_message(level, os.str());
}
} // namespace detail

#define DECOF_LOG_WARN(...) ::decof::detail::log_fmt(::decof::LogLevel::warn, __VA_ARGS__)
#define DECOF_LOG_INFO(...) ::decof::detail::log_fmt(::decof::LogLevel::info, __VA_ARGS__)
#define DECOF_LOG_DEBUG(...) ::decof::detail::log_fmt(::decof::LogLevel::debug, __VA_ARGS__)

} // namespace decof
