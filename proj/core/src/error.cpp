#include "memheat/error.hpp"

namespace memheat {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DivergentMass: return "divergent-mass";
    case ErrorKind::HypothesisG1: return "hypothesis-G1-violated";
    case ErrorKind::HypothesisG2: return "hypothesis-G2-violated";
    case ErrorKind::HypothesisG3: return "hypothesis-G3-violated";
    case ErrorKind::Coercivity: return "coercivity-violated";
    case ErrorKind::ShapeMismatch: return "shape-mismatch";
    case ErrorKind::TooCoarse: return "too-coarse";
    case ErrorKind::NonMonotoneTime: return "non-monotone-time";
    case ErrorKind::CompressionFailed: return "compression-failed";
    case ErrorKind::StepFailed: return "step-failed";
    case ErrorKind::TooFewStamps: return "too-few-stamps";
    case ErrorKind::Indeterminate: return "indeterminate";
    case ErrorKind::NotApplicable: return "not-applicable";
    case ErrorKind::NonpositiveEnergy: return "nonpositive-energy";
    case ErrorKind::ConfigInvalid: return "config-invalid";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::TheoremCheck: return "theorem-check-failed";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigInvalid:
    case ErrorKind::InvalidParameter:
    case ErrorKind::TooCoarse:
    case ErrorKind::Io:
      return 2;
    case ErrorKind::DivergentMass:
    case ErrorKind::HypothesisG1:
    case ErrorKind::HypothesisG2:
    case ErrorKind::HypothesisG3:
    case ErrorKind::Coercivity:
      return 3;
    case ErrorKind::TheoremCheck:
      return 5;
    default:
      return 4;
  }
}

}  // namespace memheat
