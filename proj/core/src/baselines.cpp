#include "gbfim/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "gbfim/error.hpp"
#include "gbfim/rng.hpp"

namespace gbfim {

namespace {

constexpr std::uint64_t kSpreadStream = 0;
constexpr std::uint64_t kGreedyStream = 1;

void check_config(const ICConfig& cfg) {
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "IC probability must be in [0, 1]");
  if (cfg.runs < 1) throw Error(ErrorCode::kInvalidArgument, "IC needs at least one run");
  if (cfg.threads < 1) throw Error(ErrorCode::kInvalidArgument, "thread count must be positive");
}

void check_seeds(const Graph& g, std::span<const NodeId> seeds) {
  for (auto s : seeds)
    if (s < 0 || s >= g.node_count()) throw Error(ErrorCode::kInvalidNode, "seed node " + std::to_string(s));
}

class LiveEdges {
 public:
  LiveEdges(const ICConfig& cfg, std::uint64_t stream, int run)
      : run_seed_(derive_seed(derive_seed(cfg.seed, stream), static_cast<std::uint64_t>(run))), p_(cfg.p) {}

  bool live(std::size_t edge) const { return unit_double(derive_seed(run_seed_, edge)) < p_; }

 private:
  std::uint64_t run_seed_;
  double p_;
};

// Runs body(run, worker) for run in [0, runs) on `threads` workers with
// contiguous blocks of runs per worker.
template <typename Body>
void for_runs(int runs, int threads, Body&& body) {
  const int workers = std::max(1, std::min(threads, runs));
  if (workers == 1) {
    for (int r = 0; r < runs; ++r) body(r, 0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const int begin = static_cast<int>(static_cast<long long>(runs) * w / workers);
    const int end = static_cast<int>(static_cast<long long>(runs) * (w + 1) / workers);
    pool.emplace_back([begin, end, w, &body] {
      for (int r = begin; r < end; ++r) body(r, w);
    });
  }
}

struct Cascade {
  std::vector<char> active;
  std::vector<NodeId> frontier;

  explicit Cascade(int n) : active(static_cast<std::size_t>(n), 0) {}

  std::uint64_t run(const Graph& g, std::span<const NodeId> seeds, const LiveEdges& edges) {
    std::fill(active.begin(), active.end(), 0);
    frontier.clear();
    for (auto s : seeds) {
      if (!active[s]) {
        active[s] = 1;
        frontier.push_back(s);
      }
    }
    std::size_t head = 0;
    while (head < frontier.size()) {
      const NodeId u = frontier[head++];
      for (const auto& nb : g.neighbors(u)) {
        if (active[nb.node] || !edges.live(nb.edge)) continue;
        active[nb.node] = 1;
        frontier.push_back(nb.node);
      }
    }
    return frontier.size();
  }
};

struct Totals {
  std::uint64_t sum = 0;
  std::uint64_t sum_sq = 0;
};

Totals simulate(const Graph& g, std::span<const NodeId> seeds, const ICConfig& cfg) {
  std::vector<Totals> partial(static_cast<std::size_t>(std::max(1, std::min(cfg.threads, cfg.runs))));
  std::vector<Cascade> scratch(partial.size(), Cascade(g.node_count()));
  for_runs(cfg.runs, cfg.threads, [&](int r, int w) {
    const std::uint64_t reached = scratch[w].run(g, seeds, LiveEdges(cfg, kSpreadStream, r));
    partial[w].sum += reached;
    partial[w].sum_sq += reached * reached;
  });
  Totals total;
  for (const auto& t : partial) {
    total.sum += t.sum;
    total.sum_sq += t.sum_sq;
  }
  return total;
}

}  // namespace

SpreadEstimate ic_spread(const Graph& g, std::span<const NodeId> seeds, const ICConfig& cfg) {
  check_config(cfg);
  if (seeds.empty()) throw Error(ErrorCode::kEmptySeeds, "IC spread needs at least one seed");
  check_seeds(g, seeds);
  const Totals t = simulate(g, seeds, cfg);
  const double runs = cfg.runs;
  const double mean = static_cast<double>(t.sum) / runs;
  double std_err = 0.0;
  if (cfg.runs > 1) {
    const double var = (static_cast<double>(t.sum_sq) - runs * mean * mean) / (runs - 1.0);
    std_err = std::sqrt(std::max(0.0, var) / runs);
  }
  return {mean, std_err, cfg.runs};
}

double ic_score(const Graph& g, std::span<const NodeId> seeds, const ICConfig& cfg) {
  check_config(cfg);
  if (seeds.empty()) return 1.0;
  check_seeds(g, seeds);
  const Totals t = simulate(g, seeds, cfg);
  const double n = g.node_count();
  const double unreached = n * cfg.runs - static_cast<double>(t.sum);
  return unreached / (n * cfg.runs);
}

std::vector<NodeId> ic_greedy_select(const Graph& g, int budget, const ICConfig& cfg) {
  check_config(cfg);
  const int n = g.node_count();
  if (budget < 1 || budget > n)
    throw Error(ErrorCode::kBudgetInfeasible, "IC greedy budget " + std::to_string(budget) + " for " +
                                                  std::to_string(n) + " nodes");
  std::vector<NodeId> chosen;
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  const auto workers = static_cast<std::size_t>(std::max(1, std::min(cfg.threads, cfg.runs)));

  for (int round = 0; round < budget; ++round) {
    ICConfig round_cfg = cfg;
    round_cfg.seed = derive_seed(cfg.seed, kGreedyStream + static_cast<std::uint64_t>(round));
    std::vector<std::vector<std::uint64_t>> gains(workers, std::vector<std::uint64_t>(static_cast<std::size_t>(n), 0));

    for_runs(cfg.runs, cfg.threads, [&](int r, int w) {
      // Components of the live-edge graph decide every candidate at once.
      const LiveEdges live(round_cfg, kSpreadStream, r);
      std::vector<int> parent(static_cast<std::size_t>(n));
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&parent](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      const auto edges = g.edges();
      for (std::size_t e = 0; e < edges.size(); ++e) {
        if (!live.live(e)) continue;
        const int a = find(edges[e].u);
        const int b = find(edges[e].v);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
      std::vector<std::uint64_t> size(static_cast<std::size_t>(n), 0);
      for (int v = 0; v < n; ++v) ++size[find(v)];
      std::vector<char> covered(static_cast<std::size_t>(n), 0);
      std::uint64_t covered_size = 0;
      for (auto s : chosen) {
        const int root = find(s);
        if (!covered[root]) {
          covered[root] = 1;
          covered_size += size[root];
        }
      }
      auto& gain = gains[static_cast<std::size_t>(w)];
      for (int v = 0; v < n; ++v) {
        const int root = find(v);
        gain[v] += covered_size + (covered[root] ? 0 : size[root]);
      }
    });

    NodeId best = -1;
    std::uint64_t best_total = 0;
    for (int v = 0; v < n; ++v) {
      if (taken[v]) continue;
      std::uint64_t total = 0;
      for (const auto& gain : gains) total += gain[v];
      if (best < 0 || total > best_total) {
        best = v;
        best_total = total;
      }
    }
    chosen.push_back(best);
    taken[best] = 1;
  }
  return chosen;
}

std::vector<double> pagerank(const Graph& g, const PageRankOptions& options, std::optional<std::vector<double>> start) {
  if (!(options.damping > 0.0 && options.damping < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "PageRank damping must be in (0, 1)");
  if (!(options.tol > 0.0) || options.max_iter < 1)
    throw Error(ErrorCode::kInvalidArgument, "PageRank needs tol > 0 and max_iter >= 1");
  const auto n = static_cast<std::size_t>(g.node_count());
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  if (start) {
    if (start->size() != n) throw Error(ErrorCode::kDimensionMismatch, "PageRank start vector length");
    const double total = std::accumulate(start->begin(), start->end(), 0.0);
    if (!(total > 0.0) || std::any_of(start->begin(), start->end(), [](double v) { return v < 0.0; }))
      throw Error(ErrorCode::kInvalidArgument, "PageRank start vector must be nonnegative and nonzero");
    for (std::size_t v = 0; v < n; ++v) x[v] = (*start)[v] / total;
  }
  const double d = options.damping;
  std::vector<double> next(n);
  for (int it = 0; it < options.max_iter; ++it) {
    double dangling = 0.0;
    for (std::size_t v = 0; v < n; ++v)
      if (g.degree(static_cast<NodeId>(v)) == 0.0) dangling += x[v];
    const double base = (1.0 - d) / static_cast<double>(n) + d * dangling / static_cast<double>(n);
    for (std::size_t v = 0; v < n; ++v) {
      double inflow = 0.0;
      for (const auto& nb : g.neighbors(static_cast<NodeId>(v))) inflow += x[nb.node] * nb.weight / g.degree(nb.node);
      next[v] = base + d * inflow;
    }
    double change = 0.0;
    for (std::size_t v = 0; v < n; ++v) change += std::abs(next[v] - x[v]);
    x.swap(next);
    if (change < options.tol) {
      const double total = std::accumulate(x.begin(), x.end(), 0.0);
      for (auto& v : x) v /= total;
      return x;
    }
  }
  throw Error(ErrorCode::kNonConvergence,
              "PageRank did not converge in " + std::to_string(options.max_iter) + " iterations");
}

std::vector<NodeId> top_n(const std::vector<double>& scores, int count) {
  if (count < 0 || static_cast<std::size_t>(count) > scores.size())
    throw Error(ErrorCode::kBudgetInfeasible, "requested " + std::to_string(count) + " of " +
                                                  std::to_string(scores.size()) + " entries");
  std::vector<NodeId> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return scores[a] > scores[b]; });
  order.resize(static_cast<std::size_t>(count));
  return order;
}

}  // namespace gbfim
