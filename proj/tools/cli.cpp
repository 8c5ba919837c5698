#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gbfim/gbfim.hpp"

namespace gbfim::cli {

namespace {

constexpr double kDefaultClampFloor = 1e-14;

struct Common {
  std::string graph;
  std::string laplacian = "standard";
  std::string kernel;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-12;
  std::string out;
  std::string clamp_text;
  CLI::Option* clamp = nullptr;
  double jitter = 0.0;
  int threads = 0;

  int worker_count() const {
    if (threads > 0) return threads;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  std::optional<double> clamp_floor() const {
    if (clamp == nullptr || clamp->count() == 0) return std::nullopt;
    if (clamp_text.empty()) return kDefaultClampFloor;
    try {
      return std::stod(clamp_text);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kInvalidArgument, "bad --clamp-spectrum value '" + clamp_text + "'");
    }
  }
};

void add_graph_options(CLI::App* cmd, Common& c) {
  cmd->add_option("--graph", c.graph, "Graph file (.json or edge list)")->required();
  cmd->add_option("--laplacian", c.laplacian, "Laplacian: standard or normalized")
      ->check(CLI::IsMember({"standard", "normalized"}))
      ->capture_default_str();
}

void add_kernel_options(CLI::App* cmd, Common& c) {
  c.clamp = cmd->add_option("--clamp-spectrum", c.clamp_text,
                            "Replace spectral weights below FLOOR by FLOOR (default FLOOR 1e-14)")
                ->expected(0, 1)
                ->type_name("FLOOR");
  cmd->add_option("--jitter", c.jitter, "Add JITTER * I to the kernel")->check(CLI::NonNegativeNumber);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::kInvalidArgument, "failed writing " + path);
}

std::string sibling(const std::string& path, const std::string& extension) {
  std::filesystem::path p(path);
  p.replace_extension(extension);
  return p.string();
}

Graph read_graph(const Common& c) {
  if (!std::filesystem::exists(c.graph)) throw Error(ErrorCode::kInvalidArgument, "graph file not found: " + c.graph);
  return load_graph(c.graph);
}

Spectrum graph_spectrum(const Graph& g, const Common& c) {
  return eigendecompose(laplacian(g, parse_laplacian_kind(c.laplacian)));
}

GbfKernel build_kernel(const Spectrum& spectrum, const Common& c) {
  GbfKernel kernel(parse_kernel_spec(c.kernel), spectrum.values);
  if (auto floor = c.clamp_floor()) kernel = kernel.clamped(*floor);
  if (c.jitter > 0.0) kernel = kernel.jittered(c.jitter);
  return kernel;
}

// gen ------------------------------------------------------------------

struct GenArgs {
  Common common;
  std::string kind = "sensor";
  int nodes = 79;
  int knn = 4;
  double link_radius = 0.0;
  double thin_radius = 0.0;
  std::string points;
  bool no_connect = false;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  Graph g = [&] {
    if (a.kind == "sensor") {
      SensorOptions opt;
      opt.count = a.nodes;
      opt.seed = a.common.seed;
      opt.knn = a.knn;
      opt.link_radius = a.link_radius;
      opt.connect = !a.no_connect;
      return generate_sensor_graph(opt);
    }
    if (a.points.empty() && a.kind == "points")
      throw Error(ErrorCode::kInvalidArgument, "--kind points needs --points FILE");
    if (!(a.link_radius > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--link-radius must be positive");
    const auto pts = a.kind == "points" ? load_points(a.points) : uniform_points(a.nodes, a.common.seed);
    return generate_points_graph(pts, a.thin_radius, a.link_radius);
  }();
  save_graph_json(g, a.common.out);
  out << "wrote " << a.common.out << ": " << g.node_count() << " nodes, " << g.edge_count() << " edges, "
      << g.component_count() << " component(s)\n";
  return kExitOk;
}

// select ---------------------------------------------------------------

struct SelectArgs {
  Common common;
  int budget = 0;
  std::vector<NodeId> initial;
  std::string svg;
};

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const Graph g = read_graph(a.common);
  const auto kind = parse_laplacian_kind(a.common.laplacian);
  const Spectrum spectrum = graph_spectrum(g, a.common);
  const GbfKernel kernel = build_kernel(spectrum, a.common);

  SelectorConfig cfg;
  cfg.budget = a.budget;
  cfg.initial = a.initial;
  cfg.tolerance = a.common.tol;
  const SelectionState state = select_nodes(spectrum, kernel, cfg);
  const auto report = make_report(state, g, kernel, kind, a.common.tol);

  std::string svg_text;
  if (!a.svg.empty()) {
    std::ostringstream svg;
    write_scatter_svg(g, state.power(), state.chosen(),
                      "P-greedy, " + kernel.describe() + ", " + std::to_string(state.chosen().size()) + " nodes", svg);
    svg_text = svg.str();
  }
  write_file(a.common.out, to_json(report).dump(2) + "\n");
  if (!a.svg.empty()) write_file(a.svg, svg_text);

  out << "selected " << report.nodes.size() << " node(s), stop: " << report.stop_reason
      << ", max power " << format_number(state.max_power()) << " (initial "
      << format_number(state.initial_max_power()) << ")\n";
  return kExitOk;
}

// tune -----------------------------------------------------------------

struct TuneArgs {
  Common common;
  std::string family = "diffusion";
  std::string t_grid = "-1e2:-1e-2:25";
  std::string eps_grid = "1e-16:1e0:25";
  std::string s_grid = "-1e1:-1e-1:25";
  int folds = 5;
  std::string metric = "mae";
  std::string table;
};

int cmd_tune(const TuneArgs& a, std::ostream& out) {
  const Graph g = read_graph(a.common);
  const Spectrum spectrum = graph_spectrum(g, a.common);
  const auto family = parse_tunable_family(a.family);
  std::vector<std::vector<double>> axes;
  if (family == TunableFamily::kDiffusion) {
    axes.push_back(parse_grid(a.t_grid));
  } else {
    axes.push_back(parse_grid(a.eps_grid));
    axes.push_back(parse_grid(a.s_grid));
  }
  CvSpec spec;
  spec.folds = a.folds;
  spec.seed = a.common.seed;
  spec.metric = parse_cv_metric(a.metric);
  spec.clamp_floor = a.common.clamp_floor();
  spec.jitter = a.common.jitter;
  spec.threads = a.common.worker_count();
  const CvResult result = grid_search(spectrum, family, axes, spec);

  std::ostringstream table;
  for (const auto& name : result.param_names) table << name << ',';
  table << "score";
  for (int f = 0; f < a.folds; ++f) table << ",fold_" << f + 1;
  table << '\n';
  for (const auto& point : result.table) {
    for (double p : point.params) table << format_number(p) << ',';
    table << format_number(point.score);
    for (double e : point.fold_errors) table << ',' << format_number(e);
    table << '\n';
  }

  const auto& best = result.best_point();
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < result.param_names.size(); ++i) params[result.param_names[i]] = best.params[i];
  const nlohmann::json doc = {
      {"kernel", a.family},
      {"params", params},
      {"spec", to_spec_string(result.best_family())},
      {"score", best.score},
      {"fold_errors", best.fold_errors},
      {"folds", a.folds},
      {"seed", a.common.seed},
      {"metric", a.metric},
      {"laplacian", a.common.laplacian},
      {"grid_points", result.table.size()},
  };
  const std::string table_path = a.table.empty() ? sibling(a.common.out, ".csv") : a.table;
  write_file(a.common.out, doc.dump(2) + "\n");
  write_file(table_path, table.str());
  out << "best " << to_spec_string(result.best_family()) << " score " << format_number(best.score) << " over "
      << result.table.size() << " grid point(s)\n";
  return kExitOk;
}

// compare --------------------------------------------------------------

struct CompareArgs {
  Common common;
  std::vector<std::string> methods{"kernel", "ic", "pagerank", "degree"};
  int budget = 10;
  double ic_p = 0.2;
  int ic_runs = 500;
  double pr_damping = 0.85;
  std::string meta;
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  const Graph g = read_graph(a.common);
  const auto kind = parse_laplacian_kind(a.common.laplacian);
  const Spectrum spectrum = graph_spectrum(g, a.common);
  const GbfKernel kernel = build_kernel(spectrum, a.common);

  CompareOptions options;
  options.methods.clear();
  for (const auto& m : a.methods) options.methods.push_back(parse_method(m));
  options.budget = a.budget;
  options.tolerance = a.common.tol;
  options.ic.p = a.ic_p;
  options.ic.runs = a.ic_runs;
  options.ic.seed = a.common.seed;
  options.ic.threads = a.common.worker_count();
  options.pagerank.damping = a.pr_damping;
  const ComparisonReport report = run_comparison(g, spectrum, kernel, kind, options);

  std::ostringstream csv;
  write_report_csv(report, csv);
  write_file(a.common.out, csv.str());
  write_file(a.meta.empty() ? sibling(a.common.out, ".json") : a.meta, report_metadata(report).dump(2) + "\n");

  bool any_ok = false;
  for (const auto& curve : report.curves) {
    if (curve.ok()) {
      any_ok = true;
      out << to_string(curve.method) << ": max_std " << format_number(curve.max_std.back()) << ", ic_score "
          << format_number(curve.ic_score.back()) << " at k=" << curve.nodes.size() << '\n';
    } else {
      err << to_string(curve.method) << " failed: " << curve.error << '\n';
    }
  }
  return any_ok ? kExitOk : kExitNumerical;
}

// spectrum -------------------------------------------------------------

struct SpectrumArgs {
  Common common;
  std::string vectors;
};

int cmd_spectrum(const SpectrumArgs& a, std::ostream& out) {
  const Graph g = read_graph(a.common);
  const Spectrum spectrum = graph_spectrum(g, a.common);
  std::ostringstream values;
  values << "index,eigenvalue\n";
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) values << k << ',' << format_number(spectrum.values(k)) << '\n';
  write_file(a.common.out, values.str());
  if (!a.vectors.empty()) {
    std::ostringstream vec;
    vec << "node";
    for (Eigen::Index k = 0; k < spectrum.size(); ++k) vec << ",u" << k;
    vec << '\n';
    for (Eigen::Index v = 0; v < spectrum.size(); ++v) {
      vec << v;
      for (Eigen::Index k = 0; k < spectrum.size(); ++k) vec << ',' << format_number(spectrum.vectors(v, k));
      vec << '\n';
    }
    write_file(a.vectors, vec.str());
  }
  out << "wrote " << spectrum.size() << " eigenvalues to " << a.common.out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Influence maximization by graph-kernel variance minimization", "gbfim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a graph");
  gen_cmd->add_option("--kind", gen.kind, "sensor | uniform | points")
      ->check(CLI::IsMember({"sensor", "uniform", "points"}))
      ->capture_default_str();
  gen_cmd->add_option("--nodes", gen.nodes, "Number of random points")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--seed", gen.common.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--knn", gen.knn, "Sensor graph: neighbours per node")->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--link-radius", gen.link_radius, "Link points closer than this radius")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--thin-radius", gen.thin_radius, "Minimum separation of kept points")
      ->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--points", gen.points, "Point cloud file for --kind points");
  gen_cmd->add_flag("--no-connect", gen.no_connect, "Sensor graph: do not bridge components");
  gen_cmd->add_option("-o,--out", gen.common.out, "Output graph JSON")->required();

  SelectArgs sel;
  auto* sel_cmd = app.add_subcommand("select", "Select influential nodes with P-greedy");
  add_graph_options(sel_cmd, sel.common);
  sel_cmd->add_option("--kernel", sel.common.kernel, "Kernel spec, e.g. diffusion:t=-10")->required();
  add_kernel_options(sel_cmd, sel.common);
  sel_cmd->add_option("--budget", sel.budget, "Number of nodes to select")->required()->check(CLI::PositiveNumber);
  sel_cmd->add_option("--initial", sel.initial, "Initial node set to enrich")->delimiter(',');
  sel_cmd->add_option("--tol", sel.common.tol, "Stopping tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  sel_cmd->add_option("--seed", sel.common.seed, "Random seed (unused by selection)");
  sel_cmd->add_option("--svg", sel.svg, "Write a scatter plot coloured by the final power function");
  sel_cmd->add_option("-o,--out", sel.common.out, "Output selection JSON")->required();

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "Cross-validate kernel parameters over log grids");
  add_graph_options(tune_cmd, tune.common);
  tune_cmd->add_option("--kernel", tune.family, "diffusion | spline")
      ->check(CLI::IsMember({"diffusion", "spline"}))
      ->capture_default_str();
  add_kernel_options(tune_cmd, tune.common);
  tune_cmd->add_option("--t-grid", tune.t_grid, "Diffusion t grid lo:hi:count")->capture_default_str();
  tune_cmd->add_option("--eps-grid", tune.eps_grid, "Spline eps grid lo:hi:count")->capture_default_str();
  tune_cmd->add_option("--s-grid", tune.s_grid, "Spline s grid lo:hi:count")->capture_default_str();
  tune_cmd->add_option("--folds", tune.folds, "Number of folds")->check(CLI::Range(2, 1 << 30))->capture_default_str();
  tune_cmd->add_option("--seed", tune.common.seed, "Fold shuffle seed")->capture_default_str();
  tune_cmd->add_option("--cv-metric", tune.metric, "mae | rmse")->check(CLI::IsMember({"mae", "rmse"}))->capture_default_str();
  tune_cmd->add_option("--threads", tune.common.threads, "Worker threads (0 = all cores)");
  tune_cmd->add_option("--table", tune.table, "Score table CSV (default: output path with .csv)");
  tune_cmd->add_option("-o,--out", tune.common.out, "Best-parameter JSON")->required();

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "Compare P-greedy with IC greedy, PageRank and degree");
  add_graph_options(cmp_cmd, cmp.common);
  cmp_cmd->add_option("--kernel", cmp.common.kernel, "Kernel spec for P-greedy and the std metrics")->required();
  add_kernel_options(cmp_cmd, cmp.common);
  cmp_cmd->add_option("--methods", cmp.methods, "kernel,ic,pagerank,degree")->delimiter(',')->capture_default_str();
  cmp_cmd->add_option("--budget", cmp.budget, "Nodes per method")->check(CLI::PositiveNumber)->capture_default_str();
  cmp_cmd->add_option("--ic-p", cmp.ic_p, "IC spread probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  cmp_cmd->add_option("--ic-runs", cmp.ic_runs, "IC Monte-Carlo runs")->check(CLI::PositiveNumber)->capture_default_str();
  cmp_cmd->add_option("--pr-damping", cmp.pr_damping, "PageRank damping")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmp_cmd->add_option("--seed", cmp.common.seed, "IC seed")->capture_default_str();
  cmp_cmd->add_option("--tol", cmp.common.tol, "P-greedy tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  cmp_cmd->add_option("--threads", cmp.common.threads, "Worker threads (0 = all cores)");
  cmp_cmd->add_option("--meta", cmp.meta, "Metadata JSON (default: output path with .json)");
  cmp_cmd->add_option("-o,--out", cmp.common.out, "Report CSV")->required();

  SpectrumArgs spec;
  auto* spec_cmd = app.add_subcommand("spectrum", "Dump Laplacian eigenvalues (and eigenvectors)");
  add_graph_options(spec_cmd, spec.common);
  spec_cmd->add_option("--vectors", spec.vectors, "Eigenvector matrix CSV");
  spec_cmd->add_option("-o,--out", spec.common.out, "Eigenvalue CSV")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*sel_cmd) return cmd_select(sel, out);
    if (*tune_cmd) return cmd_tune(tune, out);
    if (*cmp_cmd) return cmd_compare(cmp, out, err);
    if (*spec_cmd) return cmd_spectrum(spec, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.numerical() ? kExitNumerical : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace gbfim::cli
