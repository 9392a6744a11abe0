#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace memheat {

/// Failure categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorKind {
  InvalidParameter,
  DivergentMass,
  HypothesisG1,
  HypothesisG2,
  HypothesisG3,
  Coercivity,
  ShapeMismatch,
  TooCoarse,
  NonMonotoneTime,
  CompressionFailed,
  StepFailed,
  TooFewStamps,
  Indeterminate,
  NotApplicable,
  NonpositiveEnergy,
  ConfigInvalid,
  Io,
  TheoremCheck,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// 0 success, 2 config invalid, 3 hypothesis violated, 4 numerical failure,
/// 5 theorem-check failure.
int exit_code(ErrorKind kind);

}  // namespace memheat
