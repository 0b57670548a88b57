#pragma once

#include <stdexcept>
#include <string>

namespace cvhar {

// Error categories double as CLI exit codes: domain failures map to 1,
// I/O and configuration problems to 2.
enum class ErrorKind { domain = 1, io = 2, config = 2 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

[[noreturn]] void throw_domain(const std::string& what);

inline void require(bool cond, const char* what) {
  if (!cond) throw_domain(what);
}

}  // namespace cvhar
