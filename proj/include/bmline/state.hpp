#pragma once

#include <cmath>
#include <optional>

#include "bmline/grid.hpp"

namespace bmline {

/// Field plus the boundary-capacitor voltage and an optional controller
/// state. v1 is not stored separately: field.v.back() is the single source
/// of truth, so the aliasing invariant holds by construction.
struct FullState {
  FullState() = default;
  explicit FullState(const Grid& g) : field(g) {}
  explicit FullState(Field f) : field(std::move(f)) {}

  Field field;
  std::optional<double> xi;  // controller state, present in closed-loop runs

  double v1() const { return field.v.back(); }
  double i1() const { return field.i.back(); }
  double v0() const { return field.v.front(); }
  double i0() const { return field.i.front(); }
};

// Discrete versions of the ||u||_0 and ||u||_1 definitions. Both return the
// squared form (the definitions' right-hand sides): the boundary inner
// products plus the field quadrature; h1 adds the derivative quadrature.
// Callers that need the norm itself take sqrt.

inline double h0_norm(const FullState& s, const Grid& g) {
  const Field& f = s.field;
  f.check_shape(g);
  double boundary = f.i.front() * f.i.front() + f.v.front() * f.v.front() +
                    f.i.back() * f.i.back() + f.v.back() * f.v.back();
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = f.i[k] * f.i[k] + f.v[k] * f.v[k];
  return boundary + integrate(q, g);
}

inline double h1_norm(const FullState& s, const Grid& g) {
  DiscreteOp d(g);
  std::vector<double> di = d(s.field.i);
  std::vector<double> dv = d(s.field.v);
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = di[k] * di[k] + dv[k] * dv[k];
  return h0_norm(s, g) + integrate(q, g);
}

}  // namespace bmline
