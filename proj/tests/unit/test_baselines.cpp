#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "gbfim/baselines.hpp"
#include "gbfim/error.hpp"
#include "gbfim/graph.hpp"
#include "gbfim/rng.hpp"
#include "oracles.hpp"

using namespace gbfim;

TEST_CASE("IC spread is exact at p = 0 and p = 1") {
  std::mt19937_64 rng(61);
  const Graph g = test::random_forest_of_components(rng, {6, 4, 9});
  const auto comp = g.connected_components();
  ICConfig cfg;
  cfg.runs = 50;
  const std::vector<NodeId> seeds{0, 5, 11};

  cfg.p = 0.0;
  const auto none = ic_spread(g, seeds, cfg);
  CHECK(none.mean_spread == 3.0);
  CHECK(none.std_err == 0.0);
  CHECK(ic_score(g, seeds, cfg) == doctest::Approx(16.0 / 19.0));

  cfg.p = 1.0;
  std::set<int> hit;
  for (auto s : seeds) hit.insert(comp[s]);
  int covered = 0;
  for (int v = 0; v < g.node_count(); ++v) covered += hit.count(comp[v]) ? 1 : 0;
  const auto all = ic_spread(g, seeds, cfg);
  CHECK(all.mean_spread == covered);
  CHECK(all.std_err == 0.0);
}

TEST_CASE("IC results do not depend on the worker count") {
  std::mt19937_64 rng(62);
  const Graph g = test::random_connected_graph(rng, 60, 0.05);
  ICConfig one;
  one.p = 0.3;
  one.runs = 777;
  one.seed = 1234;
  ICConfig eight = one;
  eight.threads = 8;
  const std::vector<NodeId> seeds{3, 17};
  const auto a = ic_spread(g, seeds, one);
  const auto b = ic_spread(g, seeds, eight);
  CHECK(a.mean_spread == b.mean_spread);
  CHECK(a.std_err == b.std_err);
  CHECK(ic_score(g, seeds, one) == ic_score(g, seeds, eight));
  one.runs = eight.runs = 200;
  CHECK(ic_greedy_select(g, 4, one) == ic_greedy_select(g, 4, eight));
}

TEST_CASE("two-node spread at p = 1/2 is 3/2") {
  const Graph g(2, {{0, 1, 1.0}});
  ICConfig cfg;
  cfg.p = 0.5;
  cfg.runs = 10000;
  const std::vector<NodeId> seeds{0};
  const auto est = ic_spread(g, seeds, cfg);
  CHECK(est.std_err > 0.0);
  CHECK(std::abs(est.mean_spread - 1.5) <= 3.0 * est.std_err);
  // Bernoulli(1/2) standard error.
  CHECK(est.std_err == doctest::Approx(0.5 / 100.0).epsilon(0.02));
}

TEST_CASE("IC score shrinks as seeds are added under shared randomness") {
  std::mt19937_64 rng(63);
  const Graph g = test::random_connected_graph(rng, 40, 0.05);
  ICConfig cfg;
  cfg.runs = 300;
  const std::vector<NodeId> small{1, 2};
  const std::vector<NodeId> large{1, 2, 30, 31};
  CHECK(ic_score(g, small, cfg) >= ic_score(g, large, cfg));
  CHECK(ic_score(g, {}, cfg) == 1.0);
  CHECK_THROWS_AS(ic_spread(g, {}, cfg), Error);
}

TEST_CASE("IC configuration is validated") {
  const Graph g(2, {{0, 1, 1.0}});
  const std::vector<NodeId> seeds{0};
  ICConfig cfg;
  cfg.p = 1.5;
  CHECK_THROWS_AS(ic_spread(g, seeds, cfg), Error);
  cfg.p = 0.5;
  cfg.runs = 0;
  CHECK_THROWS_AS(ic_spread(g, seeds, cfg), Error);
  cfg.runs = 10;
  cfg.threads = 0;
  CHECK_THROWS_AS(ic_spread(g, seeds, cfg), Error);
  cfg.threads = 1;
  const std::vector<NodeId> bad{2};
  CHECK_THROWS_AS(ic_spread(g, bad, cfg), Error);
  CHECK_THROWS_AS(ic_greedy_select(g, 3, cfg), Error);
}

TEST_CASE("IC greedy maximises the simulated spread each round") {
  std::mt19937_64 rng(64);
  const Graph g = test::random_connected_graph(rng, 25, 0.08);
  ICConfig cfg;
  cfg.p = 0.3;
  cfg.runs = 120;
  cfg.seed = 99;
  const auto picks = ic_greedy_select(g, 4, cfg);
  REQUIRE(picks.size() == 4);
  std::vector<NodeId> chosen;
  for (int round = 0; round < 4; ++round) {
    ICConfig round_cfg = cfg;
    round_cfg.seed = derive_seed(cfg.seed, 1 + static_cast<std::uint64_t>(round));
    NodeId best = -1;
    double best_spread = -1.0;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      auto trial = chosen;
      trial.push_back(v);
      const double spread = ic_spread(g, trial, round_cfg).mean_spread;
      if (spread > best_spread) {
        best_spread = spread;
        best = v;
      }
    }
    CHECK(picks[static_cast<std::size_t>(round)] == best);
    chosen.push_back(best);
  }
}

TEST_CASE("IC greedy on a star picks the hub first") {
  std::vector<Edge> edges;
  for (int v = 1; v < 10; ++v) edges.push_back({0, v, 1.0});
  const Graph g(10, edges);
  ICConfig cfg;
  cfg.p = 0.5;
  cfg.runs = 200;
  CHECK(ic_greedy_select(g, 1, cfg)[0] == 0);
}

TEST_CASE("PageRank matches the dense linear solve") {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = trial % 2 == 0 ? test::random_connected_graph(rng, test::uniform_int(rng, 2, 40), 0.1, true)
                                   : test::random_graph(rng, test::uniform_int(rng, 2, 40), 0.05);
    const double d = test::uniform(rng, 0.5, 0.95);
    PageRankOptions opt;
    opt.damping = d;
    opt.tol = 1e-13;
    const auto x = pagerank(g, opt);
    const auto expected = test::pagerank_dense(g, d);
    double sum = 0.0;
    for (std::size_t v = 0; v < x.size(); ++v) {
      CHECK(x[v] == doctest::Approx(expected[v]).epsilon(1e-9));
      sum += x[v];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("PageRank start vector and failure modes") {
  const Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}});
  const auto base = pagerank(g);
  const auto started = pagerank(g, {}, std::vector<double>{4, 0, 0, 0});
  for (int v = 0; v < 4; ++v) CHECK(started[v] == doctest::Approx(base[v]).epsilon(1e-8));
  CHECK(top_n(base, 1)[0] == 1);

  PageRankOptions one_step;
  one_step.max_iter = 1;
  one_step.tol = 1e-15;
  try {
    pagerank(g, one_step, std::vector<double>{1, 0, 0, 0});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNonConvergence);
    CHECK(e.numerical());
  }
  PageRankOptions bad;
  bad.damping = 1.0;
  CHECK_THROWS_AS(pagerank(g, bad), Error);
  CHECK_THROWS_AS(pagerank(g, {}, std::vector<double>{1, 1}), Error);
  CHECK_THROWS_AS(pagerank(g, {}, std::vector<double>{0, 0, 0, 0}), Error);
}

TEST_CASE("top_n is stable on ties") {
  const std::vector<double> scores{0.1, 0.3, 0.3, 0.2, 0.3};
  CHECK(top_n(scores, 4) == std::vector<NodeId>{1, 2, 4, 3});
  CHECK(top_n(scores, 0).empty());
  CHECK_THROWS_AS(top_n(scores, 6), Error);
}

TEST_CASE("seed derivation helpers") {
  CHECK(derive_seed(1, 2) != derive_seed(2, 1));
  CHECK(derive_seed(7, 0) == derive_seed(7, 0));
  CHECK(unit_double(0) == 0.0);
  CHECK(unit_double(~0ULL) < 1.0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) CHECK(uniform_below(rng, 7) < 7);
}
