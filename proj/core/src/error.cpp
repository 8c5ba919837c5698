#include "gbfim/error.hpp"

namespace gbfim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kSelfLoop: return "self-loop";
    case ErrorCode::kDuplicateEdge: return "duplicate edge";
    case ErrorCode::kNonPositiveWeight: return "non-positive weight";
    case ErrorCode::kInvalidNode: return "invalid node";
    case ErrorCode::kEmptyResult: return "empty result";
    case ErrorCode::kIsolatedNode: return "isolated node";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kNotSymmetric: return "matrix not symmetric";
    case ErrorCode::kSolverFailure: return "eigensolver failure";
    case ErrorCode::kSplineSingularity: return "spline singularity";
    case ErrorCode::kComplexPower: return "complex power";
    case ErrorCode::kIndefiniteKernel: return "indefinite kernel";
    case ErrorCode::kNotPositiveDefinite: return "not positive definite";
    case ErrorCode::kZeroPivot: return "zero pivot";
    case ErrorCode::kBudgetInfeasible: return "budget infeasible";
    case ErrorCode::kEmptySeeds: return "empty seed set";
    case ErrorCode::kNonConvergence: return "no convergence";
    case ErrorCode::kFoldCount: return "fold count";
    case ErrorCode::kAllPointsInvalid: return "all grid points invalid";
  }
  return "unknown";
}

bool is_numerical(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSolverFailure:
    case ErrorCode::kIndefiniteKernel:
    case ErrorCode::kNotPositiveDefinite:
    case ErrorCode::kZeroPivot:
    case ErrorCode::kNonConvergence:
    case ErrorCode::kAllPointsInvalid:
      return true;
    default:
      return false;
  }
}

}  // namespace gbfim
