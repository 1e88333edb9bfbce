#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bmline/errors.hpp"

namespace bmline::rlc {

// Series source/resistor/inductor loop feeding a capacitor in parallel with a
// resistor. The finite-dimensional anchor for everything else in the library:
// same mixed-potential structure, same control law shape, small enough that
// every quantity has a hand value.

struct RlcParams {
  double L = 1.0;    // inductance, H
  double C = 1.0;    // capacitance, F
  double R_L = 1.0;  // series resistance, ohm
  double R_C = 1.0;  // parallel resistance, ohm
  double K = 1.0;    // controller gain
  double v_S_star = 0.0;  // target source voltage, V

  void validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("RlcParams: L must be positive");
    if (!(C > 0.0)) throw std::invalid_argument("RlcParams: C must be positive");
    if (R_L < 0.0) throw std::invalid_argument("RlcParams: R_L must be nonnegative");
    if (!(R_C > 0.0)) throw std::invalid_argument("RlcParams: R_C must be positive");
    if (K < 0.0) throw std::invalid_argument("RlcParams: K must be nonnegative");
  }

  /// L >= R_C^2 C: the condition under which the admissible pair's symmetric
  /// part is negative semidefinite. Recorded, not enforced.
  bool admissible() const { return L >= R_C * R_C * C; }
};

struct RlcState {
  double i_L = 0.0;
  double v_C = 0.0;
};

/// A x' = dP/dx + [-1;0] v_S with A = diag{-L, C}; equals the series-RL /
/// parallel-RC circuit equations.
inline RlcState rlc_rhs(const RlcState& s, const RlcParams& p, double v_S) {
  if (p.L == 0.0 || p.C == 0.0)
    throw std::invalid_argument("rlc_rhs: singular A matrix (L or C is zero)");
  return {(v_S - s.v_C - p.R_L * s.i_L) / p.L, (s.i_L - s.v_C / p.R_C) / p.C};
}

inline RlcState rlc_equilibrium(const RlcParams& p) {
  if (p.R_C + p.R_L == 0.0)
    throw std::invalid_argument("rlc_equilibrium: R_C + R_L must be nonzero");
  const double i_star = p.v_S_star / (p.R_C + p.R_L);
  return {i_star, p.R_C * i_star};
}

struct RlcPotentials {
  double P = 0.0;
  double P_tilde = 0.0;
  double P_tilde_d = 0.0;
};

inline RlcPotentials rlc_potentials(const RlcState& s, const RlcParams& p) {
  const double mismatch = s.v_C / p.R_C - s.i_L;
  const double series = 0.5 * (p.R_L + p.R_C) * s.i_L * s.i_L;
  const double dev = s.i_L - rlc_equilibrium(p).i_L;
  RlcPotentials out;
  out.P = -0.5 * p.R_C * mismatch * mismatch + series;
  out.P_tilde = 0.5 * p.R_C * mismatch * mismatch + series;
  out.P_tilde_d = 0.5 * p.R_C * mismatch * mismatch + 0.5 * (p.R_L + p.R_C + p.K) * dev * dev;
  return out;
}

/// v_S = -K (i_L - i_L*) + (R_L + R_C) i_L*
inline double rlc_control(const RlcState& s, const RlcParams& p) {
  const double i_star = rlc_equilibrium(p).i_L;
  return -p.K * (s.i_L - i_star) + (p.R_L + p.R_C) * i_star;
}

/// Conservative stiffness heuristic; overridable.
inline double rlc_default_dt(const RlcParams& p) {
  return std::min(p.L, p.C) / (20.0 * (p.R_L + p.R_C + p.K + 1.0));
}

struct RlcSample {
  double t;
  double i_L;
  double v_C;
  double v_S;
  double P;
  double P_tilde;
  double P_tilde_d;
};

struct RlcRunResult {
  std::vector<RlcSample> trajectory;
  bool ptilde_d_monotone = false;   // within tolerance, every step
  double worst_step_increase = 0.0; // most positive P_tilde_d step difference
  double monotone_tol = 0.0;
  bool admissible_condition = false;
};

/// Fixed-step RK4 of the closed loop (v_S from rlc_control each stage).
inline RlcRunResult rlc_simulate(const RlcParams& p, const RlcState& s0, double t_end,
                                 double dt = 0.0) {
  p.validate();
  if (dt == 0.0) dt = rlc_default_dt(p);
  if (!(dt > 0.0)) throw std::invalid_argument("rlc_simulate: dt must be positive");
  if (!(t_end > 0.0)) throw std::invalid_argument("rlc_simulate: t_end must be positive");

  auto f = [&](const RlcState& s) { return rlc_rhs(s, p, rlc_control(s, p)); };

  RlcRunResult out;
  out.admissible_condition = p.admissible();

  RlcState s = s0;
  const std::size_t nsteps = static_cast<std::size_t>(std::llround(t_end / dt));
  out.trajectory.reserve(nsteps + 1);

  auto record = [&](double t) {
    const RlcPotentials pot = rlc_potentials(s, p);
    out.trajectory.push_back({t, s.i_L, s.v_C, rlc_control(s, p), pot.P, pot.P_tilde, pot.P_tilde_d});
  };
  record(0.0);

  for (std::size_t k = 0; k < nsteps; ++k) {
    const RlcState k1 = f(s);
    const RlcState k2 = f({s.i_L + 0.5 * dt * k1.i_L, s.v_C + 0.5 * dt * k1.v_C});
    const RlcState k3 = f({s.i_L + 0.5 * dt * k2.i_L, s.v_C + 0.5 * dt * k2.v_C});
    const RlcState k4 = f({s.i_L + dt * k3.i_L, s.v_C + dt * k3.v_C});
    s.i_L += dt / 6.0 * (k1.i_L + 2.0 * k2.i_L + 2.0 * k3.i_L + k4.i_L);
    s.v_C += dt / 6.0 * (k1.v_C + 2.0 * k2.v_C + 2.0 * k3.v_C + k4.v_C);
    if (std::abs(s.i_L) > 1e12 || std::abs(s.v_C) > 1e12)
      throw SimulationAbort("rlc_simulate: state magnitude exceeded 1e12 at step " +
                                std::to_string(k + 1),
                            k + 1);
    record(double(k + 1) * dt);
  }

  out.monotone_tol = 1e-9 * std::max(1.0, std::abs(out.trajectory.front().P_tilde_d));
  out.worst_step_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < out.trajectory.size(); ++k)
    out.worst_step_increase = std::max(
        out.worst_step_increase, out.trajectory[k].P_tilde_d - out.trajectory[k - 1].P_tilde_d);
  out.ptilde_d_monotone = out.worst_step_increase <= out.monotone_tol;
  return out;
}

}  // namespace bmline::rlc
