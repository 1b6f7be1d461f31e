#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace trapgap {

enum class ErrorCode {
  InvalidArgument,
  OrderingViolation,
  NonMonotoneSigma,
  InterlacingFailure,
  RootCountMismatch,
  SingularM,
  NotInG,
  NoSolution,
  VolumeBudgetExceeded,
  HoleTooLarge,
  UnsupportedDimension,
  MeshFailure,
  ParseError,
  DegenerateTriangle,
  MissingPeriodicPairs,
  ConvergenceFailure,
  EnclosureViolation,
  InconsistentEpsilon,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. `index()` carries the offending
/// element (interval, trap, triangle, line number) when there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what,
        std::optional<std::size_t> index = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

}  // namespace trapgap
