#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "bmline/grid.hpp"
#include "bmline/operator_norm.hpp"
#include "bmline/state.hpp"

using namespace bmline;
using Catch::Approx;

namespace {

Eigen::MatrixXd dense_op(const Grid& g) {
  const std::size_t m = g.nodes();
  DiscreteOp op(g);
  Eigen::MatrixXd D(m, m);
  std::vector<double> e(m, 0.0), col;
  for (std::size_t j = 0; j < m; ++j) {
    e.assign(m, 0.0);
    e[j] = 1.0;
    op.apply(e, col);
    for (std::size_t k = 0; k < m; ++k) D(k, j) = col[k];
  }
  return D;
}

}  // namespace

TEST_CASE("grid invariants", "[grid]") {
  Grid g(7);
  CHECK(g.nodes() == 8);
  CHECK(g.dz * double(g.n_cells) == Approx(1.0).epsilon(1e-15));
  CHECK(g.z(0) == 0.0);
  CHECK(g.z(7) == Approx(1.0));
  CHECK_THROWS_AS(Grid(1), std::invalid_argument);
}

TEST_CASE("integrate trapezoid values", "[grid][quadrature]") {
  SECTION("constant integrand is exact") {
    for (std::size_t n : {2, 5, 17}) {
      Grid g(n);
      std::vector<double> f(g.nodes(), 1.0);
      CHECK(integrate(f, g) == Approx(1.0).epsilon(1e-14));
    }
  }
  SECTION("affine exactness") {
    for (std::size_t n : {2, 9, 40}) {
      Grid g(n);
      auto f = vecops::sample(g, [](double z) { return 3.0 * z - 0.7; });
      CHECK(integrate(f, g) == Approx(3.0 / 2.0 - 0.7).epsilon(1e-14));
      auto id = vecops::sample(g, [](double z) { return z; });
      CHECK(integrate(id, g) == Approx(0.5).epsilon(1e-14));
    }
  }
  SECTION("hand trapezoid of z^2 on two cells") {
    Grid g(2);
    auto f = vecops::sample(g, [](double z) { return z * z; });
    CHECK(integrate(f, g) == Approx(0.375).epsilon(1e-14));
  }
  SECTION("length mismatch names both lengths") {
    Grid g(4);
    std::vector<double> f(3, 0.0);
    CHECK_THROWS_WITH(integrate(f, g),
                      Catch::Matchers::ContainsSubstring("3") &&
                          Catch::Matchers::ContainsSubstring("5"));
  }
}

TEST_CASE("apply_dz stencil", "[grid][stencil]") {
  SECTION("constant -> zeros") {
    Grid g(11);
    DiscreteOp op(g);
    std::vector<double> f(g.nodes(), 4.25);
    for (double x : op(f)) CHECK(std::abs(x) <= 1e-13);
  }
  SECTION("identity -> ones at every node") {
    Grid g(13);
    DiscreteOp op(g);
    auto f = vecops::sample(g, [](double z) { return z; });
    for (double x : op(f)) CHECK(x == Approx(1.0).margin(1e-12));
  }
  SECTION("smooth field error decays at order >= 1.9") {
    auto max_err = [](std::size_t n) {
      Grid g(n);
      DiscreteOp op(g);
      auto f = vecops::sample(g, [](double z) { return std::sin(M_PI * z); });
      auto exact = vecops::sample(g, [](double z) { return M_PI * std::cos(M_PI * z); });
      return vecops::max_abs_diff(op(f), exact);
    };
    const double e1 = max_err(20), e2 = max_err(40), e3 = max_err(80);
    CHECK(std::log2(e1 / e2) >= 1.9);
    CHECK(std::log2(e2 / e3) >= 1.9);
    // halving the grid cuts the error by about 4
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.35));
  }
}

TEST_CASE("summation-by-parts residual stays O(dz^2)", "[grid][stencil]") {
  // constant fitted once for this (f, g) pair: measured resid/dz^2 ~ 4.1
  const double C_sbp = 8.0;
  for (std::size_t n : {50, 100, 200}) {
    Grid g(n);
    DiscreteOp op(g);
    auto f = vecops::sample(g, [](double z) { return std::sin(M_PI * z) * std::exp(z); });
    auto h = vecops::sample(g, [](double z) { return std::cos(2.0 * z) + z * z; });
    auto df = op(f);
    auto dh = op(h);
    std::vector<double> q(g.nodes());
    for (std::size_t k = 0; k < q.size(); ++k) q[k] = f[k] * dh[k] + h[k] * df[k];
    const double lhs = integrate(q, g);
    const double boundary = f.back() * h.back() - f.front() * h.front();
    CHECK(std::abs(lhs - boundary) <= C_sbp * g.dz * g.dz);
  }
}

TEST_CASE("op_norm power iteration", "[grid][opnorm]") {
  SECTION("n=2 matches dense SVD") {
    Grid g(2);
    const double est = op_norm(DiscreteOp(g), g);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense_op(g));
    CHECK(est == Approx(svd.singularValues()(0)).epsilon(1e-5));
  }
  SECTION("matches dense SVD on a mid-size grid") {
    Grid g(40);
    const double est = op_norm(DiscreteOp(g), g);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(dense_op(g));
    CHECK(est == Approx(svd.singularValues()(0)).epsilon(1e-4));
  }
  SECTION("doubling the grid roughly doubles the norm") {
    Grid g1(50), g2(100);
    const double n1 = op_norm(DiscreteOp(g1), g1);
    const double n2 = op_norm(DiscreteOp(g2), g2);
    CHECK(n2 / n1 >= 1.7);
    CHECK(n2 / n1 <= 2.3);
  }
  SECTION("scaling the stencil by 2 doubles the norm") {
    Grid g(30);
    DiscreteOp op(g), op2(g);
    op2.scale = 2.0;
    const double a = op_norm(op, g);
    const double b = op_norm(op2, g);
    CHECK(b / a == Approx(2.0).epsilon(1e-6));
  }
  SECTION("non-convergence carries the last iterate") {
    Grid g(20);
    OpNormOptions opt;
    opt.max_iters = 1;
    try {
      op_norm(DiscreteOp(g), g, opt);
      FAIL("expected PowerIterationError");
    } catch (const PowerIterationError& e) {
      CHECK(e.last_estimate() >= 0.0);
    }
  }
}

TEST_CASE("h0 and h1 norms", "[norm]") {
  Grid g(10);
  SECTION("zero state gives zero") {
    FullState s(g);
    CHECK(h0_norm(s, g) == 0.0);
    CHECK(h1_norm(s, g) == 0.0);
  }
  SECTION("i=1, v=0 evaluates the definition by hand") {
    FullState s(g);
    s.field.i.assign(g.nodes(), 1.0);
    CHECK(h0_norm(s, g) == Approx(3.0).epsilon(1e-14));
  }
  SECTION("h1 >= h0 on random states") {
    UniformRng rng(123);
    for (int trial = 0; trial < 25; ++trial) {
      FullState s(g);
      for (auto& x : s.field.i) x = rng.symmetric();
      for (auto& x : s.field.v) x = rng.symmetric();
      CHECK(h1_norm(s, g) >= h0_norm(s, g));
    }
  }
}
