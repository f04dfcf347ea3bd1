#pragma once

#include <stdexcept>
#include <string>

namespace equivocation {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Two objects that must share a shape (nx, ny) do not.
class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Caller broke a documented precondition of a walk step.
class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A runtime-checked invariant of the walk failed. For valid input this
/// indicates a bug; `step()` names the offending step.
class InvariantViolation : public std::logic_error {
 public:
  InvariantViolation(std::string step, const std::string& what)
      : std::logic_error(step + ": " + what), step_(std::move(step)) {}

  const std::string& step() const noexcept { return step_; }

 private:
  std::string step_;
};

}  // namespace equivocation
