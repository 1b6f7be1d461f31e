#include "trapgap/error.hpp"

namespace trapgap {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::NonMonotoneSigma: return "NonMonotoneSigma";
    case ErrorCode::InterlacingFailure: return "InterlacingFailure";
    case ErrorCode::RootCountMismatch: return "RootCountMismatch";
    case ErrorCode::SingularM: return "SingularM";
    case ErrorCode::NotInG: return "NotInG";
    case ErrorCode::NoSolution: return "NoSolution";
    case ErrorCode::VolumeBudgetExceeded: return "VolumeBudgetExceeded";
    case ErrorCode::HoleTooLarge: return "HoleTooLarge";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::MeshFailure: return "MeshFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DegenerateTriangle: return "DegenerateTriangle";
    case ErrorCode::MissingPeriodicPairs: return "MissingPeriodicPairs";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::EnclosureViolation: return "EnclosureViolation";
    case ErrorCode::InconsistentEpsilon: return "InconsistentEpsilon";
  }
  return "Unknown";
}

static std::string decorate(ErrorCode code, const std::string& what,
                            std::optional<std::size_t> index) {
  std::string out(to_string(code));
  if (index) out += "[" + std::to_string(*index) + "]";
  out += ": ";
  out += what;
  return out;
}

Error::Error(ErrorCode code, const std::string& what,
             std::optional<std::size_t> index)
    : std::runtime_error(decorate(code, what, index)),
      code_(code),
      index_(index) {}

}  // namespace trapgap
