#include <doctest.h>

#include <cmath>
#include <random>

#include "gbfim/error.hpp"
#include "gbfim/graph.hpp"
#include "gbfim/kernel.hpp"
#include "gbfim/spectral.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using namespace gbfim;

namespace {

ErrorCode spec_error(const std::string& spec) {
  try {
    parse_kernel_spec(spec);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected failure for " << spec);
  return ErrorCode::kEmptyResult;
}

}  // namespace

TEST_CASE("kernel spec parsing") {
  const auto d = parse_kernel_spec("diffusion:t=-10");
  REQUIRE(std::holds_alternative<Diffusion>(d));
  CHECK(std::get<Diffusion>(d).t == -10.0);
  const auto s = parse_kernel_spec("spline:eps=0.01,s=-1");
  REQUIRE(std::holds_alternative<VariationalSpline>(s));
  CHECK(std::get<VariationalSpline>(s).eps == 0.01);
  CHECK(std::get<VariationalSpline>(s).s == -1.0);
  CHECK(std::get<VariationalSpline>(parse_kernel_spec("spline:s=2,eps=1e-16")).eps == 1e-16);

  CHECK(spec_error("gaussian:t=1") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("diffusion") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("diffusion:t=abc") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("diffusion:t=1,x=2") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("diffusion:t=1,t=2") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("spline:eps=1") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("diffusion:t=inf") == ErrorCode::kInvalidArgument);
  CHECK(spec_error("custom:file=/nonexistent/coeffs.csv") == ErrorCode::kInvalidArgument);
}

TEST_CASE("spec strings round trip") {
  for (const char* text : {"diffusion:t=-10", "diffusion:t=0.25", "spline:eps=0.01,s=-1", "spline:eps=1e-16,s=2.5"}) {
    CHECK(to_spec_string(parse_kernel_spec(text)) == text);
  }
  const KernelFamily tricky = VariationalSpline{0.1 + 0.2, -1.0 / 3.0};
  const auto back = std::get<VariationalSpline>(parse_kernel_spec(to_spec_string(tricky)));
  CHECK(back.eps == 0.1 + 0.2);
  CHECK(back.s == -1.0 / 3.0);
}

TEST_CASE("custom coefficients load from a file") {
  test::ScratchDir dir;
  test::write_text(dir / "c.csv", "k,weight\n0,1\n1,0.5\n# trailing comment\n2,0.25\n");
  const auto family = parse_kernel_spec("custom:file=" + (dir / "c.csv").string());
  const auto& c = std::get<CustomSpectral>(family);
  REQUIRE(c.coefficients.size() == 3);
  CHECK(c.coefficients(2) == 0.25);
  const Eigen::VectorXd lambda = Eigen::Vector3d(0.0, 1.0, 3.0);
  CHECK(GbfKernel(family, lambda).coefficients() == c.coefficients);
  CHECK_THROWS_AS(GbfKernel(family, Eigen::Vector2d(0.0, 2.0)), Error);
  test::write_text(dir / "empty.csv", "# none\n");
  CHECK_THROWS_AS(parse_kernel_spec("custom:file=" + (dir / "empty.csv").string()), Error);
}

TEST_CASE("diffusion kernel matches the matrix exponential") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = test::random_connected_graph(rng, test::uniform_int(rng, 2, 20), 0.2, trial % 2 == 0);
    const double t = test::uniform(rng, -10.0, 10.0);
    const Spectrum s = eigendecompose(laplacian(g));
    const GbfKernel kernel(Diffusion{t}, s.values);
    const Eigen::MatrixXd expected = test::expm_oracle(-t * test::laplacian_oracle(g, false));
    const Eigen::MatrixXd actual = kernel_matrix(s, kernel);
    CHECK((actual - expected).cwiseAbs().maxCoeff() <= 1e-8 * expected.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("spline coefficients follow the closed form exactly") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = test::random_connected_graph(rng, test::uniform_int(rng, 2, 20), 0.2);
    const Spectrum s = eigendecompose(laplacian(g));
    const double eps = std::pow(10.0, test::uniform(rng, -6.0, 0.0));
    const double power = test::uniform(rng, -5.0, 5.0);
    const GbfKernel kernel(VariationalSpline{eps, power}, s.values);
    for (Eigen::Index k = 0; k < s.size(); ++k) CHECK(kernel.coefficients()(k) == std::pow(eps + s.values(k), -power));
  }
}

TEST_CASE("spline singular and complex cases are rejected") {
  const Eigen::VectorXd lambda = Eigen::Vector3d(0.0, 1.0, 3.0);
  auto code = [&](double eps, double s) {
    try {
      GbfKernel(VariationalSpline{eps, s}, lambda);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kEmptyResult;
  };
  CHECK(code(0.0, 1.0) == ErrorCode::kSplineSingularity);
  CHECK(code(-1.0, 2.0) == ErrorCode::kSplineSingularity);
  CHECK(code(-0.5, 0.5) == ErrorCode::kComplexPower);
  // Integer powers of a negative base are real.
  CHECK(code(-0.5, 1.0) == ErrorCode::kEmptyResult);
  CHECK_FALSE(GbfKernel(VariationalSpline{-0.5, 1.0}, lambda).positive_definite());
  CHECK(GbfKernel(VariationalSpline{-0.5, 2.0}, lambda).positive_definite());
  CHECK(code(1.0, 0.0) == ErrorCode::kEmptyResult);
}

TEST_CASE("positive definiteness flag agrees with the smallest eigenvalue") {
  std::mt19937_64 rng(33);
  int pd = 0, not_pd = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = test::random_connected_graph(rng, test::uniform_int(rng, 3, 15), 0.2);
    const Spectrum s = eigendecompose(laplacian(g));
    const auto eig = test::jacobi_eigen(test::laplacian_oracle(g, false));
    Eigen::VectorXd weights(s.size());
    KernelFamily family;
    switch (trial % 4) {
      case 0:
        family = Diffusion{test::uniform(rng, 0.0, 1.0)};
        for (Eigen::Index k = 0; k < s.size(); ++k) weights(k) = std::exp(-std::get<Diffusion>(family).t * eig.values(k));
        break;
      case 1: {
        const double eps = test::uniform(rng, 0.1, 1.0);
        family = VariationalSpline{eps, 2.0};
        for (Eigen::Index k = 0; k < s.size(); ++k) weights(k) = std::pow(eps + eig.values(k), -2.0);
        break;
      }
      case 2: {
        // Odd power with the pole below the Fiedler value flips the sign at zero.
        const double eps = -s.values(1) / 2.0;
        family = VariationalSpline{eps, 1.0};
        for (Eigen::Index k = 0; k < s.size(); ++k) weights(k) = 1.0 / (eps + eig.values(k));
        break;
      }
      default: {
        for (auto& w : weights) w = test::uniform(rng, 0.1, 1.0);
        weights(test::uniform_int(rng, 0, static_cast<int>(s.size()) - 1)) = -test::uniform(rng, 0.1, 1.0);
        family = CustomSpectral{weights, "inline"};
        break;
      }
    }
    const GbfKernel kernel(family, s.values);
    const double min_eig = test::jacobi_eigen(test::kernel_from_weights(eig, weights)).values(0);
    CHECK(kernel.positive_definite() == (min_eig > 0.0));
    CHECK(is_positive_definite(kernel) == kernel.positive_definite());
    (kernel.positive_definite() ? pd : not_pd)++;
  }
  CHECK(pd > 0);
  CHECK(not_pd > 0);
}

TEST_CASE("clamp and jitter repair indefinite kernels") {
  const Eigen::VectorXd lambda = Eigen::Vector3d(0.0, 1.0, 3.0);
  const GbfKernel bad(CustomSpectral{Eigen::Vector3d(1.0, -0.5, 0.0), "x"}, lambda);
  CHECK_FALSE(bad.positive_definite());
  const GbfKernel clamped = bad.clamped(1e-14);
  CHECK(clamped.positive_definite());
  CHECK(clamped.coefficients()(0) == 1.0);
  CHECK(clamped.coefficients()(1) == 1e-14);
  CHECK(clamped.coefficients()(2) == 1e-14);
  CHECK(clamped.describe().find("clamp=1e-14") != std::string::npos);

  const GbfKernel semi(CustomSpectral{Eigen::Vector3d(1.0, 0.0, 0.0), "x"}, lambda);
  const GbfKernel jittered = semi.jittered(1e-3);
  CHECK(jittered.positive_definite());
  CHECK(jittered.coefficients()(1) == 1e-3);
  CHECK(jittered.describe() == "custom:file=x [jitter=0.001]");
  CHECK_THROWS_AS(bad.clamped(0.0), Error);
  CHECK_THROWS_AS(bad.jittered(-1.0), Error);
}

TEST_CASE("kernel columns, diagonal and submatrices agree with the dense kernel") {
  std::mt19937_64 rng(34);
  const Graph g = test::random_connected_graph(rng, 18, 0.2, true);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(VariationalSpline{0.1, 1.5}, s.values);
  const Eigen::MatrixXd K = kernel_matrix(s, kernel);
  const auto eig = test::jacobi_eigen(test::laplacian_oracle(g, false));
  Eigen::VectorXd weights(18);
  for (int k = 0; k < 18; ++k) weights(k) = std::pow(0.1 + eig.values(k), -1.5);
  CHECK((K - test::kernel_from_weights(eig, weights)).cwiseAbs().maxCoeff() <= 1e-9 * K.cwiseAbs().maxCoeff());
  CHECK((kernel_diagonal(s, kernel) - K.diagonal()).cwiseAbs().maxCoeff() <= 1e-12 * K.cwiseAbs().maxCoeff());
  for (NodeId w : {0, 5, 17}) CHECK((kernel_column(s, kernel, w) - K.col(w)).cwiseAbs().maxCoeff() <= 1e-12 * K.cwiseAbs().maxCoeff());
  const std::vector<NodeId> rows{3, 1}, cols{4, 3, 0};
  const Eigen::MatrixXd sub = kernel_matrix(s, kernel, rows, cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      CHECK(sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) ==
            doctest::Approx(K(rows[i], cols[j])).epsilon(1e-12));
  CHECK_THROWS_AS(kernel_column(s, kernel, 18), Error);
}

TEST_CASE("native-space inner product reproduces kernel values") {
  std::mt19937_64 rng(35);
  const Graph g = test::random_connected_graph(rng, 12, 0.3);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.5}, s.values);
  for (NodeId a = 0; a < 12; a += 3) {
    for (NodeId b = 0; b < 12; b += 4) {
      const double inner = rkhs_inner(kernel, s, kernel_column(s, kernel, a), kernel_column(s, kernel, b));
      CHECK(inner == doctest::Approx(kernel_matrix(s, kernel)(a, b)).epsilon(1e-9));
    }
  }
  const Eigen::VectorXd col = kernel_column(s, kernel, 2);
  CHECK(rkhs_norm(kernel, s, col) == doctest::Approx(std::sqrt(col(2))).epsilon(1e-9));
  const GbfKernel bad(CustomSpectral{-Eigen::VectorXd::Ones(12), "x"}, s.values);
  CHECK_THROWS_AS(rkhs_norm(bad, s, col), Error);
}

TEST_CASE("kernel features factor the kernel matrix") {
  std::mt19937_64 rng(808);
  const Graph g = test::random_connected_graph(rng, 14, 0.2, true);
  const Eigen::MatrixXd L = test::laplacian_oracle(g, false);
  const Spectrum s = eigendecompose(laplacian(g));
  const GbfKernel kernel(Diffusion{0.4}, s.values);
  const Eigen::MatrixXd features = kernel_features(s, kernel);
  const Eigen::MatrixXd expected = test::expm_oracle(-0.4 * L);
  CHECK((features * features.transpose() - expected).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::VectorXd weights = Eigen::VectorXd::Ones(14);
  weights(3) = -1.0;
  try {
    kernel_features(s, GbfKernel(CustomSpectral{weights, "neg"}, s.values));
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIndefiniteKernel);
  }
}
