#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bmline/errors.hpp"

namespace bmline {

/// Uniform grid on [0,1] with n_cells+1 nodes z_k = k/n_cells.
struct Grid {
  explicit Grid(std::size_t n_cells_) : n_cells(n_cells_), dz(1.0 / double(n_cells_)) {
    if (n_cells < 2) throw std::invalid_argument("Grid: n_cells must be >= 2, got " + std::to_string(n_cells));
  }

  std::size_t n_cells;
  double dz;

  std::size_t nodes() const { return n_cells + 1; }
  double z(std::size_t k) const { return double(k) * dz; }

  std::vector<double> node_coords() const {
    std::vector<double> zc(nodes());
    for (std::size_t k = 0; k < nodes(); ++k) zc[k] = z(k);
    return zc;
  }
};

/// Sampled current/voltage profiles on the grid nodes.
struct Field {
  Field() = default;
  explicit Field(const Grid& g) : i(g.nodes(), 0.0), v(g.nodes(), 0.0) {}
  Field(std::vector<double> i_, std::vector<double> v_) : i(std::move(i_)), v(std::move(v_)) {}

  std::vector<double> i;
  std::vector<double> v;

  std::size_t nodes() const { return i.size(); }

  void check_shape(const Grid& g) const {
    if (i.size() != g.nodes() || v.size() != g.nodes())
      throw std::invalid_argument("Field: lengths (i=" + std::to_string(i.size()) + ", v=" +
                                  std::to_string(v.size()) + ") do not match grid nodes " +
                                  std::to_string(g.nodes()));
  }

  bool finite() const {
    for (double x : i)
      if (!std::isfinite(x)) return false;
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  }
};

namespace detail {
inline void check_length(const char* who, std::size_t got, std::size_t want) {
  if (got != want)
    throw std::invalid_argument(std::string(who) + ": field length " + std::to_string(got) +
                                " does not match grid nodes " + std::to_string(want));
}
}  // namespace detail

/// Trapezoid quadrature of nodal samples over [0,1]; exact on affine integrands.
inline double integrate(const std::vector<double>& f, const Grid& g) {
  detail::check_length("integrate", f.size(), g.nodes());
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) acc += f[k];
  return acc * g.dz;
}

/// d/dz with second-order central interior rows and second-order one-sided
/// rows at both ends (bandwidth-3 stencil).
struct DiscreteOp {
  explicit DiscreteOp(const Grid& g) : dz(g.dz), n(g.n_cells), scale(1.0) {}

  double dz;
  std::size_t n;
  double scale;  // multiplies every stencil coefficient

  void apply(const std::vector<double>& f, std::vector<double>& out) const {
    detail::check_length("apply_dz", f.size(), n + 1);
    out.resize(n + 1);
    const double c = scale / (2.0 * dz);
    out[0] = c * (-3.0 * f[0] + 4.0 * f[1] - f[2]);
    for (std::size_t k = 1; k < n; ++k) out[k] = c * (f[k + 1] - f[k - 1]);
    out[n] = c * (f[n - 2] - 4.0 * f[n - 1] + 3.0 * f[n]);
  }

  std::vector<double> operator()(const std::vector<double>& f) const {
    std::vector<double> out;
    apply(f, out);
    return out;
  }
};

inline std::vector<double> apply_dz(const std::vector<double>& f, const DiscreteOp& op) {
  return op(f);
}

// small vector helpers used throughout
namespace vecops {

inline std::vector<double> sample(const Grid& g, double (*fn)(double)) {
  std::vector<double> out(g.nodes());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(g.z(k));
  return out;
}

template <typename F>
inline std::vector<double> sample(const Grid& g, F&& fn) {
  std::vector<double> out(g.nodes());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(g.z(k));
  return out;
}

inline double max_abs(const std::vector<double>& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace vecops
}  // namespace bmline
