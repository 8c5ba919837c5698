#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "gbfim/baselines.hpp"
#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/spectral.hpp"

namespace gbfim {

std::string_view version();

/// Shortest decimal text that round-trips to the same double.
std::string format_number(double value);

enum class Method { kKernel, kIcGreedy, kPageRank, kDegree };

/// Accepts "kernel", "ic", "pagerank", "degree" and the long names.
Method parse_method(std::string_view text);
std::string_view to_string(Method method);

struct CompareOptions {
  std::vector<Method> methods{Method::kKernel, Method::kIcGreedy, Method::kPageRank, Method::kDegree};
  int budget = 10;
  double tolerance = 1e-12;
  ICConfig ic;
  PageRankOptions pagerank;
};

struct MethodCurve {
  Method method = Method::kKernel;
  std::vector<NodeId> nodes;
  /// Entry k-1 holds the metric for the first k nodes.
  std::vector<double> max_std;
  std::vector<double> mean_std;
  std::vector<double> ic_score;
  std::string error;  // non-empty when the method failed

  bool ok() const noexcept { return error.empty(); }
};

struct ComparisonReport {
  std::vector<MethodCurve> curves;
  std::uint64_t graph_hash = 0;
  int node_count = 0;
  std::string kernel;
  std::string laplacian;
  int budget = 0;
  double tolerance = 0.0;
  ICConfig ic;
  PageRankOptions pagerank;
};

/// Runs each method to the budget, then scores every prefix with the shared
/// kernel (max and mean posterior standard deviation) and the shared IC
/// configuration. A failing method is recorded and the others proceed. The
/// kernel curve ends early if P-greedy stops on the tolerance.
ComparisonReport run_comparison(const Graph& graph, const Spectrum& spectrum, const GbfKernel& kernel,
                                LaplacianKind laplacian, const CompareOptions& options);

/// Tidy CSV: method,k,node_id,max_std,mean_std,ic_score. LF endings.
void write_report_csv(const ComparisonReport& report, std::ostream& out);

struct ReportRow {
  std::string method;
  int k = 0;
  NodeId node = 0;
  double max_std = 0.0;
  double mean_std = 0.0;
  double ic_score = 0.0;
};

std::vector<ReportRow> read_report_csv(std::istream& in);

nlohmann::json report_metadata(const ComparisonReport& report);

/// Scatter plot of the node positions coloured by `values` on a blue to red
/// ramp, edges in light grey, `highlighted` nodes circled in black.
void write_scatter_svg(const Graph& graph, const Eigen::VectorXd& values, const std::vector<NodeId>& highlighted,
                       std::string_view title, std::ostream& out);

}  // namespace gbfim
