#include "gbfim/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "gbfim/error.hpp"
#include "gbfim/pgreedy.hpp"

#ifndef GBFIM_VERSION
#define GBFIM_VERSION "0.0.0"
#endif

namespace gbfim {

std::string_view version() { return GBFIM_VERSION; }

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Method parse_method(std::string_view text) {
  if (text == "kernel" || text == "kernel-pgreedy") return Method::kKernel;
  if (text == "ic" || text == "ic-greedy") return Method::kIcGreedy;
  if (text == "pagerank" || text == "pr") return Method::kPageRank;
  if (text == "degree") return Method::kDegree;
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + std::string(text) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kKernel: return "kernel-pgreedy";
    case Method::kIcGreedy: return "ic-greedy";
    case Method::kPageRank: return "pagerank";
    case Method::kDegree: return "degree";
  }
  return "unknown";
}

ComparisonReport run_comparison(const Graph& graph, const Spectrum& spectrum, const GbfKernel& kernel,
                                LaplacianKind laplacian, const CompareOptions& options) {
  if (options.methods.empty()) throw Error(ErrorCode::kInvalidArgument, "no comparison methods given");
  if (options.budget < 1 || options.budget > graph.node_count())
    throw Error(ErrorCode::kBudgetInfeasible, "budget " + std::to_string(options.budget) + " for " +
                                                  std::to_string(graph.node_count()) + " nodes");
  ComparisonReport report;
  report.graph_hash = graph.fingerprint();
  report.node_count = graph.node_count();
  report.kernel = kernel.describe();
  report.laplacian = std::string(to_string(laplacian));
  report.budget = options.budget;
  report.tolerance = options.tolerance;
  report.ic = options.ic;
  report.pagerank = options.pagerank;

  for (auto method : options.methods) {
    MethodCurve curve;
    curve.method = method;
    try {
      switch (method) {
        case Method::kKernel: {
          SelectorConfig cfg;
          cfg.budget = options.budget;
          cfg.tolerance = options.tolerance;
          curve.nodes = select_nodes(spectrum, kernel, cfg).chosen();
          break;
        }
        case Method::kIcGreedy:
          curve.nodes = ic_greedy_select(graph, options.budget, options.ic);
          break;
        case Method::kPageRank:
          curve.nodes = top_n(pagerank(graph, options.pagerank), options.budget);
          break;
        case Method::kDegree:
          curve.nodes = degree_top_n(graph, options.budget);
          break;
      }
      const auto powers = power_along(spectrum, kernel, curve.nodes);
      for (std::size_t k = 1; k <= curve.nodes.size(); ++k) {
        curve.max_std.push_back(powers[k].maxCoeff());
        curve.mean_std.push_back(powers[k].mean());
        const std::span<const NodeId> prefix(curve.nodes.data(), k);
        curve.ic_score.push_back(ic_score(graph, prefix, options.ic));
      }
    } catch (const Error& e) {
      curve.nodes.clear();
      curve.max_std.clear();
      curve.mean_std.clear();
      curve.ic_score.clear();
      curve.error = e.what();
    }
    report.curves.push_back(std::move(curve));
  }
  return report;
}

void write_report_csv(const ComparisonReport& report, std::ostream& out) {
  out << "method,k,node_id,max_std,mean_std,ic_score\n";
  for (const auto& curve : report.curves) {
    for (std::size_t i = 0; i < curve.nodes.size(); ++i) {
      out << to_string(curve.method) << ',' << (i + 1) << ',' << curve.nodes[i] << ','
          << format_number(curve.max_std[i]) << ',' << format_number(curve.mean_std[i]) << ','
          << format_number(curve.ic_score[i]) << '\n';
    }
  }
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "method,k,node_id,max_std,mean_std,ic_score")
    throw Error(ErrorCode::kParse, "report CSV header mismatch");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    for (std::string f; std::getline(ls, f, ',');) fields.push_back(f);
    if (fields.size() != 6) throw Error(ErrorCode::kParse, "report CSV line " + std::to_string(line_no));
    try {
      rows.push_back({fields[0], std::stoi(fields[1]), std::stoi(fields[2]), std::stod(fields[3]),
                      std::stod(fields[4]), std::stod(fields[5])});
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, "report CSV line " + std::to_string(line_no));
    }
  }
  return rows;
}

nlohmann::json report_metadata(const ComparisonReport& report) {
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(report.graph_hash));
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& curve : report.curves) {
    nlohmann::json m = {{"method", to_string(curve.method)}, {"nodes", curve.nodes}, {"ok", curve.ok()}};
    if (!curve.ok()) m["error"] = curve.error;
    methods.push_back(std::move(m));
  }
  return {
      {"tool", "gbfim"},
      {"version", version()},
      {"graph_hash", hash},
      {"node_count", report.node_count},
      {"kernel", report.kernel},
      {"laplacian", report.laplacian},
      {"budget", report.budget},
      {"tolerance", report.tolerance},
      {"ic", {{"p", report.ic.p}, {"runs", report.ic.runs}, {"seed", report.ic.seed}}},
      {"pagerank",
       {{"damping", report.pagerank.damping}, {"tol", report.pagerank.tol}, {"max_iter", report.pagerank.max_iter}}},
      {"methods", std::move(methods)},
  };
}

void write_scatter_svg(const Graph& graph, const Eigen::VectorXd& values, const std::vector<NodeId>& highlighted,
                       std::string_view title, std::ostream& out) {
  const auto& pos = graph.positions();
  if (values.size() != graph.node_count())
    throw Error(ErrorCode::kDimensionMismatch, "one value per node is needed for the plot");
  constexpr double kSize = 600.0;
  constexpr double kMargin = 30.0;
  double min_x = pos[0].x, max_x = pos[0].x, min_y = pos[0].y, max_y = pos[0].y;
  for (const auto& p : pos) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1e-12});
  auto px = [&](const Point2& p) { return kMargin + (p.x - min_x) / span * (kSize - 2 * kMargin); };
  // SVG y grows downwards.
  auto py = [&](const Point2& p) { return kSize - kMargin - (p.y - min_y) / span * (kSize - 2 * kMargin); };
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  auto colour = [&](double v) {
    const double s = hi > lo ? (v - lo) / (hi - lo) : 0.0;
    const int r = static_cast<int>(std::lround(255 * s));
    const int b = static_cast<int>(std::lround(255 * (1 - s)));
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x40%02x", r, b);
    return std::string(buf);
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize + 40
      << "\" viewBox=\"0 0 " << kSize << ' ' << kSize + 40 << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kMargin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<g stroke=\"#cccccc\" stroke-width=\"0.6\">\n";
  for (const auto& e : graph.edges())
    out << "<line x1=\"" << px(pos[e.u]) << "\" y1=\"" << py(pos[e.u]) << "\" x2=\"" << px(pos[e.v]) << "\" y2=\""
        << py(pos[e.v]) << "\"/>\n";
  out << "</g>\n<g stroke=\"none\">\n";
  for (NodeId v = 0; v < graph.node_count(); ++v)
    out << "<circle cx=\"" << px(pos[v]) << "\" cy=\"" << py(pos[v]) << "\" r=\"4\" fill=\"" << colour(values(v))
        << "\"><title>" << graph.label(v) << ": " << format_number(values(v)) << "</title></circle>\n";
  out << "</g>\n<g fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n";
  for (auto v : highlighted) out << "<circle cx=\"" << px(pos[v]) << "\" cy=\"" << py(pos[v]) << "\" r=\"8\"/>\n";
  out << "</g>\n";
  // Colour bar.
  const double bar_y = kSize + 10;
  for (int i = 0; i < 20; ++i) {
    out << "<rect x=\"" << kMargin + i * 10 << "\" y=\"" << bar_y << "\" width=\"10\" height=\"10\" fill=\""
        << colour(lo + (hi - lo) * i / 19.0) << "\"/>\n";
  }
  out << "<text x=\"" << kMargin + 210 << "\" y=\"" << bar_y + 9 << "\" font-family=\"sans-serif\" font-size=\"11\">"
      << format_number(lo) << " .. " << format_number(hi) << "</text>\n";
  out << "</svg>\n";
}

}  // namespace gbfim
