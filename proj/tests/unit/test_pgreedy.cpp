#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include "gbfim/error.hpp"
#include "gbfim/gpr.hpp"
#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/pgreedy.hpp"
#include "gbfim/spectral.hpp"
#include "oracles.hpp"

using namespace gbfim;

namespace {

// Greedy on squared powers from explicit LU solves, same tie window.
std::vector<NodeId> brute_force_greedy(const Eigen::MatrixXd& K, int budget) {
  const auto n = static_cast<int>(K.rows());
  std::vector<NodeId> chosen;
  for (int step = 0; step < budget; ++step) {
    std::vector<double> p2(static_cast<std::size_t>(n), -1.0);
    double best = -1.0;
    for (int v = 0; v < n; ++v) {
      if (std::find(chosen.begin(), chosen.end(), v) != chosen.end()) continue;
      p2[v] = test::power_squared_oracle(K, chosen, v);
      best = std::max(best, p2[v]);
    }
    for (int v = 0; v < n; ++v) {
      if (p2[v] >= 0.0 && p2[v] >= best - 1e-10 * std::abs(best)) {
        chosen.push_back(v);
        break;
      }
    }
  }
  return chosen;
}

}  // namespace

TEST_CASE("tie rule prefers the smallest id inside the window") {
  Eigen::VectorXd v(5);
  v << 1.0, 3.0, 3.0 * (1 - 5e-11), 2.0, 3.0;
  std::vector<bool> none(5, false);
  CHECK(argmax_with_ties(v, none) == 1);
  std::vector<bool> skip1(5, false);
  skip1[1] = true;
  CHECK(argmax_with_ties(v, skip1) == 2);
  Eigen::VectorXd w(3);
  w << 1.0, 1.0 - 2e-10, 0.5;
  CHECK(argmax_with_ties(w, std::vector<bool>{true, false, false}) == 1);
  CHECK(argmax_with_ties(w, std::vector<bool>{false, false, false}) == 0);
  CHECK(argmax_with_ties(w, std::vector<bool>{true, true, true}) == -1);
}

TEST_CASE("incremental power agrees with direct solves") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = test::uniform_int(rng, 5, 30);
    const Graph g = test::random_connected_graph(rng, n, 0.15, trial % 2 == 0);
    const Spectrum s = eigendecompose(laplacian(g));
    const GbfKernel kernel(Diffusion{test::uniform(rng, -3.0, 3.0)}, s.values);
    SelectorConfig cfg;
    cfg.budget = std::min(n, 10);
    const SelectionState state = select_nodes(s, kernel, cfg);
    const Eigen::VectorXd direct = power_direct_all(s, kernel, state.chosen());
    CHECK((state.power() - direct).cwiseAbs().maxCoeff() <= 1e-8 * state.initial_max_power());
  }
}

TEST_CASE("greedy picks equal the brute-force argmax") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 15; ++trial) {
    const int n = test::uniform_int(rng, 4, 20);
    const Graph g = test::random_connected_graph(rng, n, 0.2);
    const double t = test::uniform(rng, 0.1, 2.0);
    const Spectrum s = eigendecompose(laplacian(g));
    const GbfKernel kernel(Diffusion{t}, s.values);
    SelectorConfig cfg;
    cfg.budget = std::min(n, 6);
    const auto expected = brute_force_greedy(test::expm_oracle(-t * test::laplacian_oracle(g, false)), cfg.budget);
    CHECK(select_nodes(s, kernel, cfg).chosen() == expected);
  }
}

TEST_CASE("symmetric ties go to the smallest id") {
  // Cycle: every node has the same prior variance.
  std::vector<Edge> edges;
  for (int v = 0; v < 8; ++v) edges.push_back({v, (v + 1) % 8, 1.0});
  const Graph g(8, edges);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.5}, s.values);
  SelectorConfig cfg;
  cfg.budget = 2;
  const auto chosen = select_nodes(s, kernel, cfg).chosen();
  CHECK(chosen[0] == 0);
  CHECK(chosen[1] == 4);
}

TEST_CASE("max power is non-increasing and bounded") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = test::uniform_int(rng, 5, 30);
    const Graph g = test::random_connected_graph(rng, n, 0.2);
    const Spectrum s = eigendecompose(laplacian(g));
    const GbfKernel kernel(VariationalSpline{0.1, 1.0}, s.values);
    SelectorConfig cfg;
    cfg.budget = n;
    const SelectionState state = select_nodes(s, kernel, cfg);
    const double bound = std::sqrt(kernel_diagonal(s, kernel).maxCoeff());
    double previous = state.initial_max_power();
    CHECK(previous == doctest::Approx(bound));
    for (const auto& step : state.history()) {
      CHECK(step.max_power <= previous * (1 + 1e-9));
      CHECK(step.max_power >= 0.0);
      previous = step.max_power;
    }
    for (auto v : state.chosen()) CHECK(state.power()(v) == 0.0);
  }
}

TEST_CASE("residual equals target minus the interpolant") {
  std::mt19937_64 rng(54);
  const int n = 16;
  const Graph g = test::random_connected_graph(rng, n, 0.25);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.4}, s.values);
  Eigen::VectorXd target(n);
  for (auto& v : target) v = test::uniform(rng, -1.0, 1.0);
  SelectorConfig cfg;
  cfg.budget = 5;
  cfg.target = target;
  const SelectionState state = select_nodes(s, kernel, cfg);
  Eigen::VectorXd y(5);
  for (int i = 0; i < 5; ++i) y(i) = target(state.chosen()[i]);
  const GprModel model = GprModel::fit(s, kernel, state.chosen(), y);
  const Eigen::VectorXd expected = target - predict_all(model, s);
  CHECK((state.residual() - expected).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(state.history().back().max_residual == doctest::Approx(expected.cwiseAbs().maxCoeff()));
  CHECK(state.newton_coefficients().size() == 5);
  // Newton basis columns vanish at earlier picks.
  const Eigen::MatrixXd N = state.newton();
  for (int j = 1; j < 5; ++j)
    for (int i = 0; i < j; ++i) CHECK(std::abs(N(state.chosen()[i], j)) <= 1e-12);
}

TEST_CASE("stop reasons") {
  const Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{1.0}, s.values);

  SelectorConfig cfg;
  cfg.budget = 2;
  CHECK(select_nodes(s, kernel, cfg).stop_reason() == StopReason::kBudget);

  cfg.budget = 4;
  cfg.tolerance = 0.2;
  const auto loose = select_nodes(s, kernel, cfg);
  CHECK(loose.stop_reason() == StopReason::kPowerTolerance);
  CHECK(loose.chosen().size() < 4);

  // A target in the span of one kernel column is met after one pick.
  cfg.tolerance = 1e-12;
  cfg.target = kernel_column(s, kernel, 0);
  cfg.budget = 3;
  const auto fitted = select_nodes(s, kernel, cfg);
  CHECK(fitted.chosen().size() < 3);
  CHECK(fitted.stop_reason() == StopReason::kResidualTolerance);

  // Rank-two kernel: nothing is left after two picks.
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(4, 1e-40);
  weights(0) = 1.0;
  weights(1) = 1.0;
  const GbfKernel low_rank(CustomSpectral{weights, "x"}, s.values);
  SelectorConfig tight;
  tight.budget = 4;
  tight.tolerance = 1e-300;
  const auto exhausted = select_nodes(s, low_rank, tight);
  CHECK(exhausted.stop_reason() == StopReason::kExhausted);
  CHECK(exhausted.chosen().size() == 2);
  CHECK(to_string(StopReason::kExhausted) == "exhausted");
}

TEST_CASE("initial nodes are kept and extended") {
  std::mt19937_64 rng(55);
  const Graph g = test::random_connected_graph(rng, 12, 0.2);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.5}, s.values);
  SelectorConfig cfg;
  cfg.initial = {7, 3};
  cfg.budget = 3;
  const auto state = select_nodes(s, kernel, cfg);
  REQUIRE(state.chosen().size() == 5);
  CHECK(state.chosen()[0] == 7);
  CHECK(state.chosen()[1] == 3);
  CHECK(state.initial_count() == 2);
  CHECK(state.history().size() == 5);
  const Eigen::VectorXd direct = power_direct_all(s, kernel, state.chosen());
  CHECK((state.power() - direct).cwiseAbs().maxCoeff() <= 1e-9);

  cfg.initial = {3, 3};
  CHECK_THROWS_AS(select_nodes(s, kernel, cfg), Error);
  cfg.initial = {12};
  CHECK_THROWS_AS(select_nodes(s, kernel, cfg), Error);
}

TEST_CASE("selection input errors") {
  const Graph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.5}, s.values);
  auto code = [&](const GbfKernel& k, SelectorConfig cfg) {
    try {
      select_nodes(s, k, cfg);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kEmptyResult;
  };
  SelectorConfig cfg;
  cfg.budget = 4;
  CHECK(code(kernel, cfg) == ErrorCode::kBudgetInfeasible);
  cfg.budget = -1;
  CHECK(code(kernel, cfg) == ErrorCode::kBudgetInfeasible);
  cfg.budget = 1;
  cfg.tolerance = 0.0;
  CHECK(code(kernel, cfg) == ErrorCode::kInvalidArgument);
  cfg.tolerance = 1e-12;
  const GbfKernel bad(CustomSpectral{Eigen::Vector3d(1.0, -1.0, 1.0), "x"}, s.values);
  CHECK(code(bad, cfg) == ErrorCode::kIndefiniteKernel);
  CHECK(code(bad.clamped(1e-14), cfg) == ErrorCode::kEmptyResult);
  cfg.target = Eigen::VectorXd::Ones(2);
  CHECK(code(kernel, cfg) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("power along an arbitrary order") {
  std::mt19937_64 rng(56);
  const Graph g = test::random_connected_graph(rng, 10, 0.3);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.2}, s.values);
  const std::vector<NodeId> order{4, 9, 4, 0};
  const auto powers = power_along(s, kernel, order);
  REQUIRE(powers.size() == 5);
  CHECK((powers[0] - kernel_diagonal(s, kernel).cwiseSqrt()).cwiseAbs().maxCoeff() <= 1e-14);
  const std::vector<NodeId> first_two{4, 9};
  CHECK((powers[2] - power_direct_all(s, kernel, first_two)).cwiseAbs().maxCoeff() <= 1e-9);
  // A repeated node leaves the power unchanged.
  CHECK(powers[3] == powers[2]);
  CHECK_THROWS_AS(power_along(s, kernel, {10}), Error);
}

TEST_CASE("selection report JSON round trip") {
  const Graph g(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{-1.0}, s.values);
  SelectorConfig cfg;
  cfg.budget = 2;
  const auto state = select_nodes(s, kernel, cfg);
  const auto report = make_report(state, g, kernel, LaplacianKind::kStandard, 1e-12);
  const auto doc = to_json(report);
  for (const char* key : {"nodes", "max_power", "max_residual", "kernel", "laplacian", "tolerance"})
    CHECK(doc.contains(key));
  CHECK(doc["kernel"] == "diffusion:t=-1");
  const auto back = selection_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.nodes == report.nodes);
  CHECK(back.max_power == report.max_power);
  CHECK(back.stop_reason == "budget");
  CHECK_THROWS_AS(selection_from_json(nlohmann::json::object()), Error);
}
