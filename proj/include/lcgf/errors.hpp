#pragma once

#include <stdexcept>
#include <string>

namespace lcgf {

/// Raised when caller-supplied parameters violate a precondition.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical invariant fails (solver residual, SPD check, ...).
class NumericalError : public std::runtime_error {
 public:
  NumericalError(std::string invariant, const std::string& what)
      : std::runtime_error(invariant + ": " + what), invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

}  // namespace lcgf
