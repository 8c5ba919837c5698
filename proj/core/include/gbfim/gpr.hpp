#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/spectral.hpp"

namespace gbfim {

/// Solves (K_W + noise_variance I) c = y by Cholesky. Throws
/// kNotPositiveDefinite when the factorization fails.
Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& sample_kernel, const Eigen::VectorXd& values,
                                 double noise_variance = 0.0);

/// Zero-mean Gaussian process regression on a fixed sampling set.
class GprModel {
 public:
  /// Samples must be distinct valid node ids with one value each.
  static GprModel fit(const Spectrum& spectrum, GbfKernel kernel, std::vector<NodeId> samples,
                      Eigen::VectorXd values, double noise_variance = 0.0);

  const std::vector<NodeId>& samples() const noexcept { return samples_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  const Eigen::VectorXd& values() const noexcept { return values_; }
  double noise_variance() const noexcept { return noise_variance_; }
  const GbfKernel& kernel() const noexcept { return kernel_; }

 private:
  GprModel(GbfKernel kernel, std::vector<NodeId> samples, Eigen::VectorXd values, Eigen::VectorXd coefficients,
           double noise_variance);

  GbfKernel kernel_;
  std::vector<NodeId> samples_;
  Eigen::VectorXd values_;
  Eigen::VectorXd coefficients_;
  double noise_variance_;
};

/// Posterior mean sum_i c_i K_f(v, w_i).
double predict(const GprModel& model, const Spectrum& spectrum, NodeId v);
Eigen::VectorXd predict_all(const GprModel& model, const Spectrum& spectrum);

/// Posterior standard deviation P_W(v) from the Schur complement
/// K_f(v,v) - k_W(v)^T (K_W + noise I)^{-1} k_W(v), computed through the
/// Cholesky factor. Empty W gives sqrt(K_f(v,v)); with zero noise a node
/// of W gives exactly 0. Negative round-off down to -1e-10 K_f(v,v) is
/// clamped to zero, anything below throws kIndefiniteKernel.
///
/// With zero noise and a positive definite kernel the same quantity is
/// evaluated as the distance of the feature vector of v from the span of
/// the sample features (Householder QR), which stays accurate when the
/// variance is near machine precision.
double power_direct(const Spectrum& spectrum, const GbfKernel& kernel, std::span<const NodeId> samples,
                    double noise_variance, NodeId v);

/// power_direct for every node with a single factorization.
Eigen::VectorXd power_direct_all(const Spectrum& spectrum, const GbfKernel& kernel,
                                 std::span<const NodeId> samples, double noise_variance = 0.0);

}  // namespace gbfim
