#pragma once

#include <stdexcept>
#include <string>

namespace parakernel {

/// Config-grammar problems (unknown key, type mismatch, duplicate key, ...).
/// Carries the offending line number when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")"
                                     : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Numerical evaluation failures: non-finite integrand values, step-size
/// underflow, linear-solve breakdown.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Violated mathematical preconditions: parabolic transform where a
/// non-parabolic one is required, divergent Kato input, degenerate brackets,
/// geometry without a remote-ball rule.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace parakernel
