#include "gbfim/gpr.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "gbfim/error.hpp"

namespace gbfim {

namespace {

constexpr double kRoundoffClamp = 1e-10;

void check_samples(std::span<const NodeId> samples, Eigen::Index n) {
  std::set<NodeId> seen;
  for (auto w : samples) {
    if (w < 0 || w >= n) throw Error(ErrorCode::kInvalidNode, "sample node " + std::to_string(w));
    if (!seen.insert(w).second)
      throw Error(ErrorCode::kInvalidArgument, "sample node " + std::to_string(w) + " repeated");
  }
}

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& sample_kernel, double noise_variance) {
  if (!(noise_variance >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "noise variance must be nonnegative");
  Eigen::MatrixXd A = sample_kernel;
  A.diagonal().array() += noise_variance;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success || !llt.matrixL().toDenseMatrix().allFinite())
    throw Error(ErrorCode::kNotPositiveDefinite,
                "sample kernel matrix is not positive definite; consider --jitter or --clamp-spectrum");
  return llt;
}

double clamp_variance(double variance, double prior, NodeId v) {
  if (variance >= 0.0) return variance;
  if (variance >= -kRoundoffClamp * std::abs(prior)) return 0.0;
  throw Error(ErrorCode::kIndefiniteKernel,
              "negative posterior variance " + std::to_string(variance) + " at node " + std::to_string(v));
}

// Noise-free posterior variance of every node: squared distance of its
// feature vector from the span of the sample features, via Householder QR.
Eigen::VectorXd projected_variance(const Spectrum& spectrum, const GbfKernel& kernel,
                                   std::span<const NodeId> samples) {
  const Eigen::MatrixXd features = kernel_features(spectrum, kernel);
  const auto k = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd basis(features.cols(), k);
  for (Eigen::Index j = 0; j < k; ++j) basis.col(j) = features.row(samples[static_cast<std::size_t>(j)]).transpose();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  const Eigen::MatrixXd rotated = qr.householderQ().transpose() * features.transpose();
  Eigen::VectorXd out = rotated.bottomRows(features.cols() - k).colwise().squaredNorm().transpose();
  for (auto w : samples) out(w) = 0.0;
  return out;
}

}  // namespace

Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& sample_kernel, const Eigen::VectorXd& values,
                                 double noise_variance) {
  if (sample_kernel.rows() != sample_kernel.cols() || sample_kernel.rows() != values.size())
    throw Error(ErrorCode::kDimensionMismatch, "kernel matrix and sample vector sizes differ");
  return factor(sample_kernel, noise_variance).solve(values);
}

GprModel::GprModel(GbfKernel kernel, std::vector<NodeId> samples, Eigen::VectorXd values,
                   Eigen::VectorXd coefficients, double noise_variance)
    : kernel_(std::move(kernel)),
      samples_(std::move(samples)),
      values_(std::move(values)),
      coefficients_(std::move(coefficients)),
      noise_variance_(noise_variance) {}

GprModel GprModel::fit(const Spectrum& spectrum, GbfKernel kernel, std::vector<NodeId> samples,
                       Eigen::VectorXd values, double noise_variance) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "sampling set is empty");
  check_samples(samples, spectrum.size());
  const Eigen::MatrixXd K = kernel_matrix(spectrum, kernel, samples, samples);
  Eigen::VectorXd c = fit_coefficients(K, values, noise_variance);
  return GprModel(std::move(kernel), std::move(samples), std::move(values), std::move(c), noise_variance);
}

double predict(const GprModel& model, const Spectrum& spectrum, NodeId v) {
  const NodeId row[] = {v};
  const Eigen::MatrixXd k = kernel_matrix(spectrum, model.kernel(), row, model.samples());
  return (k * model.coefficients())(0);
}

Eigen::VectorXd predict_all(const GprModel& model, const Spectrum& spectrum) {
  // U diag(f_hat) U_W^T c
  Eigen::MatrixXd Uw(static_cast<Eigen::Index>(model.samples().size()), spectrum.size());
  for (std::size_t i = 0; i < model.samples().size(); ++i)
    Uw.row(static_cast<Eigen::Index>(i)) = spectrum.vectors.row(model.samples()[i]);
  const Eigen::VectorXd spectral = model.kernel().coefficients().cwiseProduct(Uw.transpose() * model.coefficients());
  return spectrum.vectors * spectral;
}

double power_direct(const Spectrum& spectrum, const GbfKernel& kernel, std::span<const NodeId> samples,
                    double noise_variance, NodeId v) {
  if (v < 0 || v >= spectrum.size()) throw Error(ErrorCode::kInvalidNode, "node " + std::to_string(v));
  check_samples(samples, spectrum.size());
  const NodeId self[] = {v};
  const double prior = kernel_matrix(spectrum, kernel, self, self)(0, 0);
  if (samples.empty()) return std::sqrt(clamp_variance(prior, prior, v));
  if (noise_variance == 0.0 && std::find(samples.begin(), samples.end(), v) != samples.end()) return 0.0;
  if (noise_variance == 0.0 && kernel.positive_definite())
    return std::sqrt(projected_variance(spectrum, kernel, samples)(v));

  const auto llt = factor(kernel_matrix(spectrum, kernel, samples, samples), noise_variance);
  const Eigen::VectorXd k = kernel_matrix(spectrum, kernel, samples, self).col(0);
  const Eigen::VectorXd z = llt.matrixL().solve(k);
  return std::sqrt(clamp_variance(prior - z.squaredNorm(), prior, v));
}

Eigen::VectorXd power_direct_all(const Spectrum& spectrum, const GbfKernel& kernel, std::span<const NodeId> samples,
                                 double noise_variance) {
  check_samples(samples, spectrum.size());
  const Eigen::VectorXd prior = kernel_diagonal(spectrum, kernel);
  const Eigen::Index n = spectrum.size();
  Eigen::VectorXd out(n);
  if (samples.empty()) {
    for (Eigen::Index v = 0; v < n; ++v) out(v) = std::sqrt(clamp_variance(prior(v), prior(v), static_cast<NodeId>(v)));
    return out;
  }
  if (noise_variance == 0.0 && kernel.positive_definite())
    return projected_variance(spectrum, kernel, samples).cwiseSqrt();
  const auto llt = factor(kernel_matrix(spectrum, kernel, samples, samples), noise_variance);
  std::vector<NodeId> all(static_cast<std::size_t>(n));
  for (Eigen::Index v = 0; v < n; ++v) all[static_cast<std::size_t>(v)] = static_cast<NodeId>(v);
  const Eigen::MatrixXd cross = kernel_matrix(spectrum, kernel, samples, all);
  const Eigen::MatrixXd Z = llt.matrixL().solve(cross);
  std::vector<bool> sampled(static_cast<std::size_t>(n), false);
  if (noise_variance == 0.0)
    for (auto w : samples) sampled[static_cast<std::size_t>(w)] = true;
  for (Eigen::Index v = 0; v < n; ++v) {
    out(v) = sampled[static_cast<std::size_t>(v)]
                 ? 0.0
                 : std::sqrt(clamp_variance(prior(v) - Z.col(v).squaredNorm(), prior(v), static_cast<NodeId>(v)));
  }
  return out;
}

}  // namespace gbfim
