#pragma once

#include <stdexcept>
#include <string>

namespace decof {

// Error categories map 1:1 onto process exit codes and C API status values:
// config = 2, data = 3, runtime = 4.
enum class ErrorKind {
    config = 2,
    data = 3,
    runtime = 4,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }
    int code() const { return static_cast<int>(kind_); }

  private:
    ErrorKind kind_;
};

inline Error config_error(const std::string& msg) { return Error(ErrorKind::config, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorKind::data, msg); }
inline Error runtime_error(const std::string& msg) { return Error(ErrorKind::runtime, msg); }

} // namespace decof
