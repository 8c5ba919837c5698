#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Core>

#include "gbfim/graph.hpp"
#include "gbfim/spectral.hpp"

namespace gbfim {

/// e^{-t L}. Any real t.
struct Diffusion {
  double t = 0.0;
};

/// (eps I + L)^{-s}. Any real eps and s away from the singular cases.
struct VariationalSpline {
  double eps = 0.0;
  double s = 1.0;
};

/// Mercer weights given directly, one per eigenvalue.
struct CustomSpectral {
  Eigen::VectorXd coefficients;
  std::string source;  // file the weights came from, for reporting
};

using KernelFamily = std::variant<Diffusion, VariationalSpline, CustomSpectral>;

/// Parses "diffusion:t=-10", "spline:eps=0.01,s=-1" or "custom:file=coeffs.csv".
/// Custom weights are read from the file immediately.
KernelFamily parse_kernel_spec(std::string_view spec);
std::string to_spec_string(const KernelFamily& family);

/// Mercer weights f_hat(k) of the family on the given eigenvalues.
///
/// Diffusion gives exp(-t lambda_k). The spline gives (eps + lambda_k)^{-s}
/// and throws kSplineSingularity if some eps + lambda_k == 0, or
/// kComplexPower for a negative base with non-integer s. Non-finite weights
/// throw kInvalidArgument.
Eigen::VectorXd spectral_coefficients(const KernelFamily& family, const Eigen::VectorXd& eigenvalues);

/// A graph basis function kernel K_f = U diag(f_hat) U^T, stored by its
/// weights. Entries are evaluated against a Spectrum on demand.
class GbfKernel {
 public:
  GbfKernel(KernelFamily family, const Eigen::VectorXd& eigenvalues);

  const KernelFamily& family() const noexcept { return family_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  Eigen::Index size() const noexcept { return coefficients_.size(); }

  /// min_k f_hat(k) > 0.
  bool positive_definite() const noexcept { return positive_definite_; }

  /// Copy with f_hat(k) <- max(f_hat(k), floor).
  GbfKernel clamped(double floor) const;
  /// Copy with f_hat(k) <- f_hat(k) + jitter, i.e. K + jitter * I.
  GbfKernel jittered(double jitter) const;

  std::string describe() const;

 private:
  GbfKernel(KernelFamily family, Eigen::VectorXd coefficients, std::string note);

  KernelFamily family_;
  Eigen::VectorXd coefficients_;
  bool positive_definite_ = false;
  std::string note_;
};

inline bool is_positive_definite(const GbfKernel& kernel) { return kernel.positive_definite(); }

/// Column K_f(., w): U (f_hat .* U(w, :)^T). O(n^2).
Eigen::VectorXd kernel_column(const Spectrum& spectrum, const GbfKernel& kernel, NodeId w);

/// K_f(v, v) for all v.
Eigen::VectorXd kernel_diagonal(const Spectrum& spectrum, const GbfKernel& kernel);

/// Feature matrix Phi = U diag(sqrt(f_hat)), so that K_f = Phi Phi^T.
/// Row v is the feature vector of node v. Throws kIndefiniteKernel unless
/// the kernel is positive definite.
Eigen::MatrixXd kernel_features(const Spectrum& spectrum, const GbfKernel& kernel);

/// Full n x n kernel matrix, symmetrised.
Eigen::MatrixXd kernel_matrix(const Spectrum& spectrum, const GbfKernel& kernel);

/// Submatrix with the given row and column node lists.
Eigen::MatrixXd kernel_matrix(const Spectrum& spectrum, const GbfKernel& kernel,
                              std::span<const NodeId> rows, std::span<const NodeId> cols);

/// Native-space inner product sum_k x_hat(k) y_hat(k) / f_hat(k).
/// Throws kIndefiniteKernel unless the kernel is positive definite.
double rkhs_inner(const GbfKernel& kernel, const Spectrum& spectrum, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& y);
double rkhs_norm(const GbfKernel& kernel, const Spectrum& spectrum, const Eigen::VectorXd& x);

}  // namespace gbfim
