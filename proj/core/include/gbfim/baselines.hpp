#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gbfim/graph.hpp"

namespace gbfim {

inline constexpr std::uint64_t kDefaultSeed = 0x5eed'2021'0001ULL;

struct ICConfig {
  double p = 0.2;
  int runs = 500;
  std::uint64_t seed = kDefaultSeed;
  /// Worker threads for the Monte-Carlo runs. Results do not depend on it.
  int threads = 1;
};

struct SpreadEstimate {
  double mean_spread = 0.0;
  double std_err = 0.0;
  int runs = 0;
};

// Independent Cascade is simulated in its live-edge form: in run r every
// edge e is live with probability p, decided by a hash of (seed, stream, r, e).
// An undirected edge is attempted at most once per cascade, so the final
// active set is exactly the set reachable from the seeds over live edges.
// Different seed sets evaluated with the same config share their random
// numbers.

/// Mean final active-set size over cfg.runs cascades. Throws kEmptySeeds.
SpreadEstimate ic_spread(const Graph& g, std::span<const NodeId> seeds, const ICConfig& cfg);

/// Mean fraction of nodes not reached; 1 for an empty seed set.
double ic_score(const Graph& g, std::span<const NodeId> seeds, const ICConfig& cfg);

/// Greedy IC: each round adds the node with the largest estimated spread of
/// seeds + {v}, ties to the smallest id. All candidates of a round are
/// scored on the same cfg.runs cascades; rounds use independent streams.
std::vector<NodeId> ic_greedy_select(const Graph& g, int budget, const ICConfig& cfg);

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-9;
  int max_iter = 1000;
};

/// Power iteration with uniform teleport. Transition weights follow edge
/// weights; dangling mass is spread uniformly. Stops when the L1 change is
/// below tol, otherwise throws kNonConvergence.
std::vector<double> pagerank(const Graph& g, const PageRankOptions& options = {},
                             std::optional<std::vector<double>> start = std::nullopt);

/// Indices of the `count` largest scores, ties by ascending index.
std::vector<NodeId> top_n(const std::vector<double>& scores, int count);

}  // namespace gbfim
