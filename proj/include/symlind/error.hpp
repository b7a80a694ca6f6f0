#pragma once

#include <stdexcept>
#include <string>

namespace symlind {

/// Raised when an input violates a documented precondition or invariant.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure cannot meet its contract; carries the
/// residual or error estimate that was reached.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

} // namespace symlind
