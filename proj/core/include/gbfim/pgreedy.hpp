#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/spectral.hpp"

namespace gbfim {

/// Relative window inside which squared power values count as tied; the
/// smallest node id wins a tie.
inline constexpr double kTieWindow = 1e-10;

/// Lowest id among `candidates` whose value is within kTieWindow (relative)
/// of the maximum. Returns -1 when there are no candidates.
NodeId argmax_with_ties(const Eigen::VectorXd& values, const std::vector<bool>& excluded);

struct SelectorConfig {
  int budget = 1;
  std::vector<NodeId> initial;
  double tolerance = 1e-12;
  /// Validation signal for the residual stop; empty means constant 1.
  Eigen::VectorXd target;
};

enum class StopReason { kBudget, kPowerTolerance, kResidualTolerance, kExhausted };

std::string_view to_string(StopReason reason);

struct StepRecord {
  NodeId node;
  double max_power;      // max_v sqrt(p2(v)) after the step
  double max_residual;   // max_v |r(v)| after the step
  double mean_residual;  // mean_v |r(v)| after the step
};

/// Incremental state of P-greedy: Newton basis columns, squared power
/// function and the residual of the validation signal.
///
/// The state keeps the kernel features of every node with the span of the
/// chosen nodes projected out. The Newton column of a new node is the
/// product of these residual features with its normalised residual feature
/// vector, and p2(v) is the squared norm of row v. This avoids the
/// cancellation in K(v, v) - sum_j N_j(v)^2 when the power is tiny.
class SelectionState {
 public:
  /// Throws kIndefiniteKernel unless the kernel is positive definite.
  SelectionState(const Spectrum& spectrum, const GbfKernel& kernel, Eigen::VectorXd target = {});

  const std::vector<NodeId>& chosen() const noexcept { return chosen_; }
  /// n x k matrix whose column j is the Newton basis function N_j.
  Eigen::MatrixXd newton() const { return newton_.leftCols(static_cast<Eigen::Index>(chosen_.size())); }
  const Eigen::VectorXd& power_squared() const noexcept { return p2_; }
  Eigen::VectorXd power() const { return p2_.cwiseSqrt(); }
  const Eigen::VectorXd& residual() const noexcept { return residual_; }
  const Eigen::VectorXd& target() const noexcept { return target_; }
  /// Coefficients of the interpolant in the Newton basis.
  const std::vector<double>& newton_coefficients() const noexcept { return beta_; }
  const std::vector<StepRecord>& history() const noexcept { return history_; }
  bool is_chosen(NodeId v) const { return taken_.at(static_cast<std::size_t>(v)); }
  const std::vector<bool>& chosen_mask() const noexcept { return taken_; }

  double initial_max_power() const noexcept { return initial_max_power_; }
  double max_power() const { return std::sqrt(p2_.maxCoeff()); }
  double max_residual() const { return residual_.cwiseAbs().maxCoeff(); }
  /// Pivots at or below this squared power are treated as exhausted:
  /// 10 * machine epsilon * max initial p2.
  double pivot_guard() const noexcept { return pivot_guard_; }

  StopReason stop_reason() const noexcept { return stop_reason_; }
  void set_stop_reason(StopReason reason) noexcept { stop_reason_ = reason; }
  /// Number of leading chosen nodes that came from the initial set.
  int initial_count() const noexcept { return initial_count_; }
  void set_initial_count(int count) noexcept { initial_count_ = count; }

  /// Adds `node` and updates the Newton basis, p2 and residual in O(n^2),
  /// the cost of one kernel column. Throws kInvalidNode / kInvalidArgument for a
  /// bad or repeated node, kZeroPivot when p2(node) is at or below the
  /// pivot guard.
  void add(const Spectrum& spectrum, const GbfKernel& kernel, NodeId node);

 private:
  std::vector<NodeId> chosen_;
  std::vector<bool> taken_;
  Eigen::MatrixXd newton_;
  Eigen::MatrixXd features_;
  Eigen::VectorXd p2_;
  Eigen::VectorXd target_;
  Eigen::VectorXd residual_;
  std::vector<double> beta_;
  std::vector<StepRecord> history_;
  double initial_max_power_ = 0.0;
  double pivot_guard_ = 0.0;
  StopReason stop_reason_ = StopReason::kBudget;
  int initial_count_ = 0;
};

/// One P-greedy update; value-semantics wrapper around SelectionState::add.
SelectionState power_update_step(SelectionState state, const Spectrum& spectrum, const GbfKernel& kernel,
                                 NodeId node);

/// P-greedy: absorb cfg.initial, then repeatedly add the node of largest
/// power (ties to the smallest id) until the budget is spent, max p2 or
/// max |residual| drops below the tolerance, or the remaining power is at
/// the pivot guard. Throws kIndefiniteKernel for a kernel that is not
/// positive definite and kBudgetInfeasible when budget + |initial| > n.
SelectionState select_nodes(const Spectrum& spectrum, const GbfKernel& kernel, const SelectorConfig& cfg);

/// Power function along a fixed node order: entry k of the result is the
/// vector P_{W_k} with W_k the first k nodes (entry 0 is the prior).
/// Nodes whose squared power is already at the pivot guard leave P
/// unchanged.
std::vector<Eigen::VectorXd> power_along(const Spectrum& spectrum, const GbfKernel& kernel,
                                         const std::vector<NodeId>& order);

struct SelectionReport {
  std::vector<NodeId> nodes;
  std::vector<std::string> labels;
  int initial_count = 0;  // history entries include the initial nodes
  double initial_max_power = 0.0;
  std::vector<double> max_power;
  std::vector<double> max_residual;
  std::vector<double> mean_residual;
  std::string kernel;
  std::string laplacian;
  double tolerance = 1e-12;
  std::string stop_reason;
};

SelectionReport make_report(const SelectionState& state, const Graph& graph, const GbfKernel& kernel,
                            LaplacianKind laplacian, double tolerance);

nlohmann::json to_json(const SelectionReport& report);
SelectionReport selection_from_json(const nlohmann::json& doc);

}  // namespace gbfim
