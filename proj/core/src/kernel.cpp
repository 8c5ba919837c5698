#include "gbfim/kernel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "gbfim/error.hpp"

namespace gbfim {

namespace {

double parse_number(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value))
    throw Error(ErrorCode::kInvalidArgument,
                "bad value '" + std::string(text) + "' for " + std::string(what));
  return value;
}

std::map<std::string, std::string, std::less<>> parse_params(std::string_view body) {
  std::map<std::string, std::string, std::less<>> params;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const auto item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw Error(ErrorCode::kInvalidArgument, "kernel parameter '" + std::string(item) + "' is not key=value");
    if (!params.emplace(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1))).second)
      throw Error(ErrorCode::kInvalidArgument, "repeated kernel parameter '" + std::string(item.substr(0, eq)) + "'");
    body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
  }
  return params;
}

std::string take(std::map<std::string, std::string, std::less<>>& params, std::string_view key,
                 std::string_view kernel) {
  auto it = params.find(key);
  if (it == params.end())
    throw Error(ErrorCode::kInvalidArgument,
                std::string(kernel) + " kernel needs parameter '" + std::string(key) + "'");
  std::string value = it->second;
  params.erase(it);
  return value;
}

void reject_leftovers(const std::map<std::string, std::string, std::less<>>& params, std::string_view kernel) {
  if (!params.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "unknown parameter '" + params.begin()->first + "' for " + std::string(kernel) + " kernel");
}

Eigen::VectorXd read_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInvalidArgument, "cannot open coefficient file " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    // Header row: first non-empty line that is not numeric.
    double probe = 0.0;
    if (values.empty() && std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), probe).ec !=
                              std::errc())
      continue;
    // "k,value" rows keep the last column.
    values.push_back(parse_number(tokens.back(), path + " line " + std::to_string(line_no)));
  }
  if (values.empty()) throw Error(ErrorCode::kParse, "coefficient file " + path + " is empty");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

}  // namespace

KernelFamily parse_kernel_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  const auto name = spec.substr(0, colon);
  auto params = parse_params(colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1));
  if (name == "diffusion") {
    Diffusion d{parse_number(take(params, "t", name), "t")};
    reject_leftovers(params, name);
    return d;
  }
  if (name == "spline") {
    VariationalSpline s{parse_number(take(params, "eps", name), "eps"), parse_number(take(params, "s", name), "s")};
    reject_leftovers(params, name);
    return s;
  }
  if (name == "custom") {
    const auto file = take(params, "file", name);
    reject_leftovers(params, name);
    return CustomSpectral{read_coefficients(file), file};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown kernel '" + std::string(name) +
                                               "' (expected diffusion, spline or custom)");
}

std::string to_spec_string(const KernelFamily& family) {
  struct {
    std::string operator()(const Diffusion& d) const { return "diffusion:t=" + format_number(d.t); }
    std::string operator()(const VariationalSpline& s) const {
      return "spline:eps=" + format_number(s.eps) + ",s=" + format_number(s.s);
    }
    std::string operator()(const CustomSpectral& c) const { return "custom:file=" + c.source; }
  } visitor;
  return std::visit(visitor, family);
}

Eigen::VectorXd spectral_coefficients(const KernelFamily& family, const Eigen::VectorXd& eigenvalues) {
  Eigen::VectorXd f_hat(eigenvalues.size());
  if (const auto* d = std::get_if<Diffusion>(&family)) {
    for (Eigen::Index k = 0; k < f_hat.size(); ++k) f_hat(k) = std::exp(-d->t * eigenvalues(k));
  } else if (const auto* s = std::get_if<VariationalSpline>(&family)) {
    const bool integer_power = std::trunc(s->s) == s->s;
    for (Eigen::Index k = 0; k < f_hat.size(); ++k) {
      const double base = s->eps + eigenvalues(k);
      if (base == 0.0)
        throw Error(ErrorCode::kSplineSingularity,
                    "eps + lambda_" + std::to_string(k) + " is zero (eps=" + format_number(s->eps) + ")");
      if (base < 0.0 && !integer_power)
        throw Error(ErrorCode::kComplexPower, "eps + lambda_" + std::to_string(k) +
                                                  " is negative and s=" + format_number(s->s) +
                                                  " is not an integer");
      f_hat(k) = std::pow(base, -s->s);
    }
  } else {
    const auto& c = std::get<CustomSpectral>(family);
    if (c.coefficients.size() != eigenvalues.size())
      throw Error(ErrorCode::kDimensionMismatch, "custom kernel has " + std::to_string(c.coefficients.size()) +
                                                     " coefficients for " + std::to_string(eigenvalues.size()) +
                                                     " eigenvalues");
    f_hat = c.coefficients;
  }
  if (!f_hat.allFinite())
    throw Error(ErrorCode::kInvalidArgument, "kernel " + to_spec_string(family) + " has non-finite spectral weights");
  return f_hat;
}

GbfKernel::GbfKernel(KernelFamily family, const Eigen::VectorXd& eigenvalues)
    : GbfKernel(family, spectral_coefficients(family, eigenvalues), {}) {}

GbfKernel::GbfKernel(KernelFamily family, Eigen::VectorXd coefficients, std::string note)
    : family_(std::move(family)), coefficients_(std::move(coefficients)), note_(std::move(note)) {
  positive_definite_ = coefficients_.size() > 0 && coefficients_.minCoeff() > 0.0;
}

GbfKernel GbfKernel::clamped(double floor) const {
  if (!(floor > 0.0)) throw Error(ErrorCode::kInvalidArgument, "clamp floor must be positive");
  Eigen::VectorXd c = coefficients_.cwiseMax(floor);
  return GbfKernel(family_, std::move(c), note_ + ",clamp=" + format_number(floor));
}

GbfKernel GbfKernel::jittered(double jitter) const {
  if (!(jitter >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "jitter must be nonnegative");
  Eigen::VectorXd c = coefficients_.array() + jitter;
  return GbfKernel(family_, std::move(c), note_ + ",jitter=" + format_number(jitter));
}

std::string GbfKernel::describe() const {
  if (note_.empty()) return to_spec_string(family_);
  return to_spec_string(family_) + " [" + note_.substr(1) + "]";
}

Eigen::VectorXd kernel_column(const Spectrum& spectrum, const GbfKernel& kernel, NodeId w) {
  if (kernel.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, "kernel and spectrum sizes differ");
  if (w < 0 || w >= spectrum.size()) throw Error(ErrorCode::kInvalidNode, "node " + std::to_string(w));
  const Eigen::VectorXd weighted = kernel.coefficients().cwiseProduct(spectrum.vectors.row(w).transpose());
  return spectrum.vectors * weighted;
}

Eigen::VectorXd kernel_diagonal(const Spectrum& spectrum, const GbfKernel& kernel) {
  if (kernel.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, "kernel and spectrum sizes differ");
  return spectrum.vectors.cwiseAbs2() * kernel.coefficients();
}

Eigen::MatrixXd kernel_features(const Spectrum& spectrum, const GbfKernel& kernel) {
  if (kernel.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, "kernel and spectrum sizes differ");
  if (!kernel.positive_definite())
    throw Error(ErrorCode::kIndefiniteKernel, "kernel " + kernel.describe() + " is not positive definite");
  return spectrum.vectors * kernel.coefficients().cwiseSqrt().asDiagonal();
}

Eigen::MatrixXd kernel_matrix(const Spectrum& spectrum, const GbfKernel& kernel) {
  if (kernel.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, "kernel and spectrum sizes differ");
  Eigen::MatrixXd K = spectrum.vectors * kernel.coefficients().asDiagonal() * spectrum.vectors.transpose();
  return 0.5 * (K + K.transpose());
}

Eigen::MatrixXd kernel_matrix(const Spectrum& spectrum, const GbfKernel& kernel, std::span<const NodeId> rows,
                              std::span<const NodeId> cols) {
  if (kernel.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, "kernel and spectrum sizes differ");
  const Eigen::Index n = spectrum.size();
  auto gather = [&](std::span<const NodeId> ids) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), n);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] < 0 || ids[i] >= n) throw Error(ErrorCode::kInvalidNode, "node " + std::to_string(ids[i]));
      out.row(static_cast<Eigen::Index>(i)) = spectrum.vectors.row(ids[i]);
    }
    return out;
  };
  const Eigen::MatrixXd Ur = gather(rows);
  const Eigen::MatrixXd Uc = gather(cols);
  return Ur * kernel.coefficients().asDiagonal() * Uc.transpose();
}

double rkhs_inner(const GbfKernel& kernel, const Spectrum& spectrum, const Eigen::VectorXd& x,
                  const Eigen::VectorXd& y) {
  if (!kernel.positive_definite())
    throw Error(ErrorCode::kIndefiniteKernel, "native-space norm needs a positive definite kernel");
  const Eigen::VectorXd x_hat = gft(spectrum, x);
  const Eigen::VectorXd y_hat = gft(spectrum, y);
  return (x_hat.array() * y_hat.array() / kernel.coefficients().array()).sum();
}

double rkhs_norm(const GbfKernel& kernel, const Spectrum& spectrum, const Eigen::VectorXd& x) {
  return std::sqrt(std::max(0.0, rkhs_inner(kernel, spectrum, x, x)));
}

}  // namespace gbfim
