#pragma once

#include <Eigen/Core>

namespace gbfim {

/// Eigenpairs of a symmetric matrix: eigenvalues ascending, column k of
/// `vectors` belongs to `values(k)`. The columns form the graph Fourier
/// basis when the input is a graph Laplacian.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;

  Eigen::Index size() const noexcept { return values.size(); }
};

/// Dense symmetric eigendecomposition.
///
/// Each eigenvector is flipped so its first entry with magnitude above
/// 1e-12 is positive. Eigenvalues with magnitude below
/// 1e-12 * max(1, max |lambda|) are set to exactly zero, so the constant
/// mode of a Laplacian has lambda = 0 rather than round-off of either sign.
/// Throws kNotSymmetric when |L - L^T| exceeds 1e-10 * max(1, max |L|).
Spectrum eigendecompose(const Eigen::MatrixXd& matrix);

enum class FourierDirection { kForward, kInverse };

/// Forward: U^T x. Inverse: U x.
Eigen::VectorXd gft(const Spectrum& spectrum, const Eigen::VectorXd& signal,
                    FourierDirection direction = FourierDirection::kForward);

/// Generalized convolution U diag(U^T y) U^T x.
Eigen::VectorXd convolve(const Spectrum& spectrum, const Eigen::VectorXd& filter,
                         const Eigen::VectorXd& signal);

}  // namespace gbfim
