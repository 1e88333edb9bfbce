#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bmline/errors.hpp"
#include "bmline/grid.hpp"
#include "bmline/rng.hpp"

namespace bmline {

struct OpNormOptions {
  double rel_tol = 1e-6;
  std::size_t max_iters = 200000;
  std::uint32_t seed = 42;
};

/// Largest singular value of the discrete d/dz operator, by power iteration
/// on D^T D. Deterministic start vector from the seeded generator.
inline double op_norm(const DiscreteOp& op, const Grid& g, const OpNormOptions& opt = {}) {
  const std::size_t m = g.nodes();
  UniformRng rng(opt.seed);
  std::vector<double> x(m), dx(m), y(m);
  for (double& e : x) e = rng.symmetric();

  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    s = std::sqrt(s);
    for (double& e : v) e /= s;
    return s;
  };
  normalize(x);

  // y = D^T (D x); with our stencil D^T is applied by explicit accumulation.
  auto apply_DtD = [&](const std::vector<double>& in, std::vector<double>& out) {
    op.apply(in, dx);
    std::fill(out.begin(), out.end(), 0.0);
    const double c = op.scale / (2.0 * g.dz);
    const std::size_t n = g.n_cells;
    // row 0: coefficients (-3, 4, -1) at columns 0,1,2
    out[0] += -3.0 * c * dx[0];
    out[1] += 4.0 * c * dx[0];
    out[2] += -1.0 * c * dx[0];
    for (std::size_t k = 1; k < n; ++k) {
      out[k - 1] += -c * dx[k];
      out[k + 1] += c * dx[k];
    }
    out[n - 2] += 1.0 * c * dx[n];
    out[n - 1] += -4.0 * c * dx[n];
    out[n] += 3.0 * c * dx[n];
  };

  double lambda = 0.0;
  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    apply_DtD(x, y);
    double lambda_new = 0.0;  // Rayleigh quotient, x is unit
    for (std::size_t k = 0; k < m; ++k) lambda_new += x[k] * y[k];
    x = y;
    normalize(x);
    if (it > 0 && std::abs(lambda_new - lambda) <= opt.rel_tol * std::abs(lambda_new))
      return std::sqrt(lambda_new);
    lambda = lambda_new;
  }
  throw PowerIterationError("op_norm: power iteration did not converge in " +
                                std::to_string(opt.max_iters) + " iterations",
                            std::sqrt(std::abs(lambda)));
}

}  // namespace bmline
