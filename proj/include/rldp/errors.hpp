#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rldp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad parameters, mismatched measures).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A model failed validation; carries every violation found.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Exact enumeration refused because a configured size cap was exceeded.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap. Keeps the best value reached.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value, double residual)
      : Error(what), best_value_(best_value), residual_(residual) {}

  double best_value() const { return best_value_; }
  double residual() const { return residual_; }

 private:
  double best_value_;
  double residual_;
};

/// Configuration file could not be parsed or contains unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace rldp
