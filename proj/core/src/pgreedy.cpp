#include "gbfim/pgreedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gbfim/error.hpp"

namespace gbfim {

NodeId argmax_with_ties(const Eigen::VectorXd& values, const std::vector<bool>& excluded) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index v = 0; v < values.size(); ++v)
    if (!excluded[static_cast<std::size_t>(v)]) best = std::max(best, values(v));
  if (best == -std::numeric_limits<double>::infinity()) return -1;
  const double floor = best - kTieWindow * std::abs(best);
  for (Eigen::Index v = 0; v < values.size(); ++v)
    if (!excluded[static_cast<std::size_t>(v)] && values(v) >= floor) return static_cast<NodeId>(v);
  return -1;
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kBudget: return "budget";
    case StopReason::kPowerTolerance: return "power-tolerance";
    case StopReason::kResidualTolerance: return "residual-tolerance";
    case StopReason::kExhausted: return "exhausted";
  }
  return "unknown";
}

SelectionState::SelectionState(const Spectrum& spectrum, const GbfKernel& kernel, Eigen::VectorXd target)
    : taken_(static_cast<std::size_t>(spectrum.size()), false),
      features_(kernel_features(spectrum, kernel)),
      p2_(features_.rowwise().squaredNorm()),
      target_(target.size() == 0 ? Eigen::VectorXd::Ones(spectrum.size()) : std::move(target)) {
  if (target_.size() != spectrum.size())
    throw Error(ErrorCode::kDimensionMismatch, "validation signal length differs from node count");
  residual_ = target_;
  const double max_p2 = p2_.maxCoeff();
  initial_max_power_ = std::sqrt(std::max(0.0, max_p2));
  pivot_guard_ = 10.0 * std::numeric_limits<double>::epsilon() * max_p2;
}

void SelectionState::add([[maybe_unused]] const Spectrum& spectrum, [[maybe_unused]] const GbfKernel& kernel,
                         NodeId node) {
  const Eigen::Index n = p2_.size();
  if (node < 0 || node >= n) throw Error(ErrorCode::kInvalidNode, "node " + std::to_string(node));
  if (taken_[static_cast<std::size_t>(node)])
    throw Error(ErrorCode::kInvalidArgument, "node " + std::to_string(node) + " already selected");
  const double pivot = p2_(node);
  if (!(pivot > pivot_guard_))
    throw Error(ErrorCode::kZeroPivot, "power at node " + std::to_string(node) + " is exhausted (p2=" +
                                           std::to_string(pivot) + ")");

  const auto k = static_cast<Eigen::Index>(chosen_.size());
  if (newton_.cols() <= k) newton_.conservativeResize(n, std::max<Eigen::Index>(4, 2 * newton_.cols()));

  const Eigen::VectorXd direction = features_.row(node).transpose() / std::sqrt(pivot);
  const Eigen::VectorXd column = features_ * direction;
  newton_.col(k) = column;
  features_.noalias() -= column * direction.transpose();
  features_.row(node).setZero();
  p2_ = features_.rowwise().squaredNorm();

  const double beta = residual_(node) / column(node);
  residual_ -= beta * column;
  beta_.push_back(beta);

  chosen_.push_back(node);
  taken_[static_cast<std::size_t>(node)] = true;
  const Eigen::VectorXd abs_residual = residual_.cwiseAbs();
  history_.push_back({node, max_power(), abs_residual.maxCoeff(), abs_residual.mean()});
}

SelectionState power_update_step(SelectionState state, const Spectrum& spectrum, const GbfKernel& kernel,
                                 NodeId node) {
  state.add(spectrum, kernel, node);
  return state;
}

SelectionState select_nodes(const Spectrum& spectrum, const GbfKernel& kernel, const SelectorConfig& cfg) {
  if (!kernel.positive_definite())
    throw Error(ErrorCode::kIndefiniteKernel,
                "kernel " + kernel.describe() + " is not positive definite; use --clamp-spectrum to run it");
  const auto n = static_cast<long long>(spectrum.size());
  if (cfg.budget < 0 || static_cast<long long>(cfg.budget) + static_cast<long long>(cfg.initial.size()) > n)
    throw Error(ErrorCode::kBudgetInfeasible, "budget " + std::to_string(cfg.budget) + " plus " +
                                                  std::to_string(cfg.initial.size()) +
                                                  " initial nodes exceeds " + std::to_string(n) + " nodes");
  if (!(cfg.tolerance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");

  SelectionState state(spectrum, kernel, cfg.target);
  for (auto w : cfg.initial) state.add(spectrum, kernel, w);
  state.set_initial_count(static_cast<int>(cfg.initial.size()));

  state.set_stop_reason(StopReason::kBudget);
  for (int step = 0; step < cfg.budget; ++step) {
    if (state.power_squared().maxCoeff() < cfg.tolerance) {
      state.set_stop_reason(StopReason::kPowerTolerance);
      break;
    }
    if (state.max_residual() < cfg.tolerance) {
      state.set_stop_reason(StopReason::kResidualTolerance);
      break;
    }
    const NodeId next = argmax_with_ties(state.power_squared(), state.chosen_mask());
    if (next < 0 || !(state.power_squared()(next) > state.pivot_guard())) {
      state.set_stop_reason(StopReason::kExhausted);
      break;
    }
    state.add(spectrum, kernel, next);
  }
  return state;
}

std::vector<Eigen::VectorXd> power_along(const Spectrum& spectrum, const GbfKernel& kernel,
                                         const std::vector<NodeId>& order) {
  SelectionState state(spectrum, kernel);
  std::vector<Eigen::VectorXd> out;
  out.reserve(order.size() + 1);
  out.push_back(state.power());
  for (auto w : order) {
    if (w < 0 || w >= spectrum.size()) throw Error(ErrorCode::kInvalidNode, "node " + std::to_string(w));
    if (!state.is_chosen(w) && state.power_squared()(w) > state.pivot_guard()) state.add(spectrum, kernel, w);
    out.push_back(state.power());
  }
  return out;
}

SelectionReport make_report(const SelectionState& state, const Graph& graph, const GbfKernel& kernel,
                            LaplacianKind laplacian, double tolerance) {
  SelectionReport r;
  r.nodes = state.chosen();
  if (!graph.labels().empty())
    for (auto v : r.nodes) r.labels.push_back(graph.label(v));
  r.initial_count = state.initial_count();
  for (const auto& step : state.history()) {
    r.max_power.push_back(step.max_power);
    r.max_residual.push_back(step.max_residual);
    r.mean_residual.push_back(step.mean_residual);
  }
  r.initial_max_power = state.initial_max_power();
  r.kernel = kernel.describe();
  r.laplacian = std::string(to_string(laplacian));
  r.tolerance = tolerance;
  r.stop_reason = std::string(to_string(state.stop_reason()));
  return r;
}

nlohmann::json to_json(const SelectionReport& report) {
  nlohmann::json doc = {
      {"nodes", report.nodes},
      {"max_power", report.max_power},
      {"max_residual", report.max_residual},
      {"mean_residual", report.mean_residual},
      {"kernel", report.kernel},
      {"laplacian", report.laplacian},
      {"tolerance", report.tolerance},
      {"initial_count", report.initial_count},
      {"initial_max_power", report.initial_max_power},
      {"stop_reason", report.stop_reason},
  };
  if (!report.labels.empty()) doc["labels"] = report.labels;
  return doc;
}

SelectionReport selection_from_json(const nlohmann::json& doc) {
  try {
    SelectionReport r;
    r.nodes = doc.at("nodes").get<std::vector<NodeId>>();
    r.max_power = doc.at("max_power").get<std::vector<double>>();
    r.max_residual = doc.at("max_residual").get<std::vector<double>>();
    r.mean_residual = doc.value("mean_residual", std::vector<double>{});
    r.kernel = doc.at("kernel").get<std::string>();
    r.laplacian = doc.at("laplacian").get<std::string>();
    r.tolerance = doc.at("tolerance").get<double>();
    r.initial_count = doc.value("initial_count", 0);
    r.initial_max_power = doc.value("initial_max_power", 0.0);
    r.stop_reason = doc.value("stop_reason", std::string{});
    r.labels = doc.value("labels", std::vector<std::string>{});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("selection JSON: ") + e.what());
  }
}

}  // namespace gbfim
