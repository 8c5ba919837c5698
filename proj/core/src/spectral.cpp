#include "gbfim/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "gbfim/error.hpp"

namespace gbfim {

namespace {

constexpr double kSignThreshold = 1e-12;
constexpr double kZeroEigenvalue = 1e-12;
constexpr double kSymmetryTolerance = 1e-10;

void check_length(const Spectrum& spectrum, const Eigen::VectorXd& v, const char* what) {
  if (v.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has length " +
                                                   std::to_string(v.size()) + ", expected " +
                                                   std::to_string(spectrum.size()));
}

}  // namespace

Spectrum eigendecompose(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw Error(ErrorCode::kDimensionMismatch, "eigendecompose needs a nonempty square matrix");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  const double asymmetry = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (!(asymmetry <= kSymmetryTolerance * scale))
    throw Error(ErrorCode::kNotSymmetric,
                "matrix asymmetry " + std::to_string(asymmetry) + " exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::kSolverFailure, "symmetric eigensolver did not converge");

  Spectrum out{solver.eigenvalues(), solver.eigenvectors()};
  const double zero = kZeroEigenvalue * std::max(1.0, out.values.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    if (std::abs(out.values(k)) < zero) out.values(k) = 0.0;
    auto column = out.vectors.col(k);
    for (Eigen::Index i = 0; i < column.size(); ++i) {
      if (std::abs(column(i)) > kSignThreshold) {
        if (column(i) < 0.0) column = -column;
        break;
      }
    }
  }
  return out;
}

Eigen::VectorXd gft(const Spectrum& spectrum, const Eigen::VectorXd& signal, FourierDirection direction) {
  check_length(spectrum, signal, "signal");
  if (direction == FourierDirection::kForward) return spectrum.vectors.transpose() * signal;
  return spectrum.vectors * signal;
}

Eigen::VectorXd convolve(const Spectrum& spectrum, const Eigen::VectorXd& filter, const Eigen::VectorXd& signal) {
  check_length(spectrum, filter, "filter");
  check_length(spectrum, signal, "signal");
  const Eigen::VectorXd filter_hat = spectrum.vectors.transpose() * filter;
  const Eigen::VectorXd signal_hat = spectrum.vectors.transpose() * signal;
  return spectrum.vectors * filter_hat.cwiseProduct(signal_hat);
}

}  // namespace gbfim
