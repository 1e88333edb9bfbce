#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bmline/grid.hpp"

namespace bmline {

/// One logged instant of a line simulation. Functional values are evaluated
/// at log time; boundary rates come from the same rhs evaluation the stepper
/// uses. Closed-loop-only entries stay at zero for open-loop runs (the
/// Trajectory flags say which are meaningful).
struct Sample {
  double t = 0.0;

  double i0 = 0.0, v0 = 0.0, i1 = 0.0, v1 = 0.0;
  double di0 = 0.0, dv0 = 0.0, di1 = 0.0, dv1 = 0.0;

  double P = 0.0;        // mixed potential
  double calP = 0.0;     // boundary-augmented potential
  double Pt = 0.0;       // admissible-pair storage (completed-square form)
  double P1 = 0.0;       // first alternate storage integrand
  double I2 = 0.0;       // integral of L*i_t^2 + C*v_t^2 (no 1/2 factor)
  double resid = 0.0;    // equilibrium residual, sqrt(h0 form) of the enforced stack

  double Pd = 0.0;       // shaped potential (closed loop)
  double casimir = 0.0;  // -xi + int i dz (closed loop)

  std::vector<double> probe_i;
  std::vector<double> probe_v;
};

struct Trajectory {
  std::vector<Sample> samples;
  std::vector<std::size_t> probe_nodes;
  Field final_field;
  double xi_final = 0.0;
  bool has_closed_loop = false;
  bool c1_degenerate = false;  // SourceLoad ran with C1 = 0 -> algebraic v1

  std::size_t size() const { return samples.size(); }
};

/// Centered differences of a logged scalar series; one-sided at the ends.
/// Monitors exclude the first/last entries from violation maxima.
template <typename Getter>
inline std::vector<double> centered_rate(const Trajectory& traj, Getter get) {
  const std::size_t n = traj.size();
  if (n < 3) throw std::invalid_argument("centered_rate: trajectory too short (" +
                                         std::to_string(n) + " samples, need >= 3)");
  std::vector<double> out(n);
  auto t = [&](std::size_t k) { return traj.samples[k].t; };
  auto x = [&](std::size_t k) { return get(traj.samples[k]); };
  out[0] = (x(1) - x(0)) / (t(1) - t(0));
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (x(k + 1) - x(k - 1)) / (t(k + 1) - t(k - 1));
  out[n - 1] = (x(n - 1) - x(n - 2)) / (t(n - 1) - t(n - 2));
  return out;
}

/// max over interior entries (first and last excluded)
inline double interior_max(const std::vector<double>& xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) m = std::max(m, xs[k]);
  return m;
}

inline double interior_max_abs(const std::vector<double>& xs) {
  double m = 0.0;
  for (std::size_t k = 1; k + 1 < xs.size(); ++k) m = std::max(m, std::abs(xs[k]));
  return m;
}

}  // namespace bmline
