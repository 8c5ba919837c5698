#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gbfim {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kSelfLoop,
  kDuplicateEdge,
  kNonPositiveWeight,
  kInvalidNode,
  kEmptyResult,
  kIsolatedNode,
  kDimensionMismatch,
  kNotSymmetric,
  kSolverFailure,
  kSplineSingularity,
  kComplexPower,
  kIndefiniteKernel,
  kNotPositiveDefinite,
  kZeroPivot,
  kBudgetInfeasible,
  kEmptySeeds,
  kNonConvergence,
  kFoldCount,
  kAllPointsInvalid,
};

std::string_view to_string(ErrorCode code);

// Numerical failures (factorization, pivots, convergence) are reported by
// the CLI with a different exit status than malformed input.
bool is_numerical(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  bool numerical() const noexcept { return is_numerical(code_); }

 private:
  ErrorCode code_;
};

}  // namespace gbfim
