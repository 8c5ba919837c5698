#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/spectral.hpp"

namespace gbfim {

/// sign * 10^linspace(log10|lo|, log10|hi|, count) with exact endpoints.
/// lo and hi must be nonzero with the same sign; count = 1 gives {lo}.
std::vector<double> log_grid(double lo, double hi, int count);

/// Parses "lo:hi:count", e.g. "1e-16:1e0:25".
std::vector<double> parse_grid(std::string_view text);

enum class CvMetric { kMae, kRmse };

CvMetric parse_cv_metric(std::string_view text);
std::string_view to_string(CvMetric metric);

struct CvSpec {
  int folds = 5;
  std::uint64_t seed = 0x5eed'2021'0001ULL;
  /// Signal to reconstruct; empty means constant 1.
  Eigen::VectorXd target;
  CvMetric metric = CvMetric::kMae;
  /// Applied to every kernel before it is used, when set.
  std::optional<double> clamp_floor;
  double jitter = 0.0;
  int threads = 1;
};

/// Seeded shuffle of 0..n-1 dealt round-robin into k folds. Throws
/// kFoldCount unless 2 <= k <= n.
std::vector<std::vector<NodeId>> make_folds(int node_count, int folds, std::uint64_t seed);

/// Per-fold errors: each fold's complement is the sampling set of a
/// zero-noise interpolant of the target, scored on all n nodes. A kernel
/// that cannot be built, is not positive definite, or fails to factor gives
/// +inf for every fold.
std::vector<double> cv_fold_errors(const Spectrum& spectrum, const KernelFamily& family, const CvSpec& spec);

/// Mean of cv_fold_errors.
double cv_error(const Spectrum& spectrum, const KernelFamily& family, const CvSpec& spec);

enum class TunableFamily { kDiffusion, kSpline };

TunableFamily parse_tunable_family(std::string_view text);

struct GridPoint {
  std::vector<double> params;  // (t) or (eps, s)
  double score = 0.0;
  std::vector<double> fold_errors;
};

struct CvResult {
  TunableFamily family = TunableFamily::kDiffusion;
  std::vector<std::string> param_names;
  /// Cartesian grid in iteration order, first parameter slowest.
  std::vector<GridPoint> table;
  std::size_t best = 0;

  const GridPoint& best_point() const { return table.at(best); }
  KernelFamily best_family() const;
};

/// Evaluates cv_error on the whole grid; argmin with ties to the first
/// point. Diffusion takes one axis (t), the spline two (eps, s). Throws
/// kAllPointsInvalid when every point scores +inf.
CvResult grid_search(const Spectrum& spectrum, TunableFamily family, const std::vector<std::vector<double>>& axes,
                     const CvSpec& spec);

}  // namespace gbfim
