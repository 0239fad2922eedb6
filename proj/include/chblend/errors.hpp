#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chblend {

/// Malformed configuration value or file. Carries the offending key and the
/// 1-based line number (0 when the error did not come from a file).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& message)
      : std::runtime_error(format(key, line, message)), key_(std::move(key)), line_(line) {}

  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& key, std::size_t line, const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += "'" + key + "': ";
    return out + message;
  }

  std::string key_;
  std::size_t line_;
};

class IOError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The linear system could not be solved to the requested relative residual.
class LinearSolveFailure : public std::runtime_error {
 public:
  LinearSolveFailure(const std::string& message, double residual)
      : std::runtime_error(message), residual_(residual) {}

  /// Final relative residual, or +inf when the factorization itself broke down.
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A time step produced non-finite values or left the admissible range.
class NonFiniteState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chblend
