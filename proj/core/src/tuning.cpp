#include "gbfim/tuning.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include <Eigen/Cholesky>

#include "gbfim/error.hpp"
#include "gbfim/rng.hpp"

namespace gbfim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_value(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw Error(ErrorCode::kInvalidArgument, "bad grid value '" + std::string(text) + "'");
  return value;
}

KernelFamily family_at(TunableFamily family, const std::vector<double>& params) {
  if (family == TunableFamily::kDiffusion) return Diffusion{params.at(0)};
  return VariationalSpline{params.at(0), params.at(1)};
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  if (lo == 0.0 || hi == 0.0 || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorCode::kInvalidArgument, "log grid endpoints must be finite and nonzero");
  if ((lo < 0.0) != (hi < 0.0)) throw Error(ErrorCode::kInvalidArgument, "log grid endpoints differ in sign");
  if (count == 1) return {lo};
  const double sign = lo < 0.0 ? -1.0 : 1.0;
  const double a = std::log10(std::abs(lo));
  const double b = std::log10(std::abs(hi));
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    grid[static_cast<std::size_t>(i)] = sign * std::pow(10.0, a + (b - a) * i / (count - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto first = text.find(':');
  const auto second = first == std::string_view::npos ? first : text.find(':', first + 1);
  if (second == std::string_view::npos)
    throw Error(ErrorCode::kInvalidArgument, "grid '" + std::string(text) + "' is not lo:hi:count");
  const double lo = parse_value(text.substr(0, first));
  const double hi = parse_value(text.substr(first + 1, second - first - 1));
  const double count = parse_value(text.substr(second + 1));
  if (count != std::floor(count) || count < 1 || count > 1e6)
    throw Error(ErrorCode::kInvalidArgument, "grid count must be a positive integer");
  return log_grid(lo, hi, static_cast<int>(count));
}

CvMetric parse_cv_metric(std::string_view text) {
  if (text == "mae") return CvMetric::kMae;
  if (text == "rmse") return CvMetric::kRmse;
  throw Error(ErrorCode::kInvalidArgument, "unknown CV metric '" + std::string(text) + "'");
}

std::string_view to_string(CvMetric metric) { return metric == CvMetric::kMae ? "mae" : "rmse"; }

std::vector<std::vector<NodeId>> make_folds(int node_count, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > node_count)
    throw Error(ErrorCode::kFoldCount, std::to_string(folds) + " folds for " + std::to_string(node_count) + " nodes");
  std::vector<NodeId> order(static_cast<std::size_t>(node_count));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[uniform_below(rng, i + 1)]);
  std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < order.size(); ++i) out[i % out.size()].push_back(order[i]);
  for (auto& fold : out) std::sort(fold.begin(), fold.end());
  return out;
}

std::vector<double> cv_fold_errors(const Spectrum& spectrum, const KernelFamily& family, const CvSpec& spec) {
  const auto n = static_cast<int>(spectrum.size());
  const auto folds = make_folds(n, spec.folds, spec.seed);
  const Eigen::VectorXd target = spec.target.size() == 0 ? Eigen::VectorXd::Ones(n) : spec.target;
  if (target.size() != n) throw Error(ErrorCode::kDimensionMismatch, "target length differs from node count");
  std::vector<double> errors(folds.size(), kInf);

  std::optional<GbfKernel> kernel;
  try {
    kernel.emplace(family, spectrum.values);
    if (spec.clamp_floor) kernel = kernel->clamped(*spec.clamp_floor);
    if (spec.jitter > 0.0) kernel = kernel->jittered(spec.jitter);
  } catch (const Error&) {
    return errors;
  }
  if (!kernel->positive_definite()) return errors;
  const Eigen::MatrixXd K = kernel_matrix(spectrum, *kernel);

  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<char> held(static_cast<std::size_t>(n), 0);
    for (auto v : folds[f]) held[v] = 1;
    std::vector<Eigen::Index> sample;
    for (int v = 0; v < n; ++v)
      if (!held[v]) sample.push_back(v);
    const auto m = static_cast<Eigen::Index>(sample.size());
    Eigen::MatrixXd Kw(m, m);
    Eigen::MatrixXd cross(n, m);
    Eigen::VectorXd y(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      y(j) = target(sample[j]);
      cross.col(j) = K.col(sample[j]);
      for (Eigen::Index i = 0; i < m; ++i) Kw(i, j) = K(sample[i], sample[j]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Kw);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::VectorXd c = llt.solve(y);
    const Eigen::VectorXd diff = target - cross * c;
    const double err = spec.metric == CvMetric::kMae ? diff.cwiseAbs().mean() : std::sqrt(diff.squaredNorm() / n);
    errors[f] = std::isfinite(err) ? err : kInf;
  }
  return errors;
}

double cv_error(const Spectrum& spectrum, const KernelFamily& family, const CvSpec& spec) {
  const auto errors = cv_fold_errors(spectrum, family, spec);
  double total = 0.0;
  for (double e : errors) {
    if (!std::isfinite(e)) return kInf;
    total += e;
  }
  return total / static_cast<double>(errors.size());
}

TunableFamily parse_tunable_family(std::string_view text) {
  if (text == "diffusion") return TunableFamily::kDiffusion;
  if (text == "spline") return TunableFamily::kSpline;
  throw Error(ErrorCode::kInvalidArgument, "cannot tune kernel '" + std::string(text) + "'");
}

KernelFamily CvResult::best_family() const { return family_at(family, best_point().params); }

CvResult grid_search(const Spectrum& spectrum, TunableFamily family, const std::vector<std::vector<double>>& axes,
                     const CvSpec& spec) {
  CvResult result;
  result.family = family;
  result.param_names = family == TunableFamily::kDiffusion ? std::vector<std::string>{"t"}
                                                           : std::vector<std::string>{"eps", "s"};
  if (axes.size() != result.param_names.size())
    throw Error(ErrorCode::kInvalidArgument, "expected " + std::to_string(result.param_names.size()) + " grid axes");
  for (const auto& axis : axes)
    if (axis.empty()) throw Error(ErrorCode::kInvalidArgument, "empty grid axis");
  // Validates the fold count before any work.
  make_folds(static_cast<int>(spectrum.size()), spec.folds, spec.seed);

  if (axes.size() == 1) {
    for (double t : axes[0]) result.table.push_back({{t}, 0.0, {}});
  } else {
    for (double a : axes[0])
      for (double b : axes[1]) result.table.push_back({{a, b}, 0.0, {}});
  }

  auto evaluate = [&](std::size_t i) {
    auto& point = result.table[i];
    point.fold_errors = cv_fold_errors(spectrum, family_at(family, point.params), spec);
    point.score = 0.0;
    for (double e : point.fold_errors) point.score += e;
    point.score /= static_cast<double>(point.fold_errors.size());
    if (!std::isfinite(point.score)) point.score = kInf;
  };
  const auto workers = static_cast<std::size_t>(std::max(1, spec.threads));
  if (workers == 1) {
    for (std::size_t i = 0; i < result.table.size(); ++i) evaluate(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < result.table.size(); i += workers) evaluate(i);
      });
  }

  bool any = false;
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    if (!std::isfinite(result.table[i].score)) continue;
    if (!any || result.table[i].score < result.table[result.best].score) result.best = i;
    any = true;
  }
  if (!any) throw Error(ErrorCode::kAllPointsInvalid, "no grid point produced a finite cross-validation error");
  return result;
}

}  // namespace gbfim
