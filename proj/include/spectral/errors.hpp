#pragma once

#include <stdexcept>
#include <string>

namespace spectral {

/// Malformed arguments: bad shapes, out-of-range counts, invalid modes.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An input violates a numerical precondition; carries the measured defect.
class PreconditionError : public std::domain_error {
 public:
  PreconditionError(const std::string& what, double measured)
      : std::domain_error(what + " (measured " + std::to_string(measured) + ")"),
        measured_(measured) {}

  double measured() const noexcept { return measured_; }

 private:
  double measured_;
};

/// A caller-supplied callback broke its contract (e.g. wrong output length).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values appeared during a computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spectral
