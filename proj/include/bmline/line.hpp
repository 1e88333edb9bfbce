#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bmline/errors.hpp"
#include "bmline/grid.hpp"
#include "bmline/state.hpp"
#include "bmline/trajectory.hpp"

namespace bmline {

/// Physical constants of the line and its terminations.
struct LineParams {
  double L = 1.0;   // specific inductance, H/m
  double C = 1.0;   // specific capacitance, F/m
  double R = 0.0;   // specific resistance, ohm/m
  double G = 1.0;   // specific conductance, S/m (strictly positive)
  double R0 = 0.0;  // source resistance, ohm
  double E = 0.0;   // source voltage, V
  double R1 = 1.0;  // load resistance, ohm
  double C1 = 0.0;  // load capacitance, F

  void validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("LineParams: L must be positive");
    if (!(C > 0.0)) throw std::invalid_argument("LineParams: C must be positive");
    if (R < 0.0) throw std::invalid_argument("LineParams: R must be nonnegative");
    if (!(G > 0.0)) throw std::invalid_argument("LineParams: G must be positive");
    if (R0 < 0.0) throw std::invalid_argument("LineParams: R0 must be nonnegative");
    if (!(R1 > 0.0)) throw std::invalid_argument("LineParams: R1 must be positive");
    if (C1 < 0.0) throw std::invalid_argument("LineParams: C1 must be nonnegative");
  }

  double wave_speed() const { return 1.0 / std::sqrt(L * C); }
  double transit_time() const { return std::sqrt(L * C); }
};

enum class BoundaryKind {
  SourceLoad,    // v0 = E - R0*i0 algebraic; C1 dv1/dt = i1 - v1/R1
  PassiveShort,  // source off: v0 = -R0*i0 (E = 0 in the source constraint); i1 = 0
  Controlled,    // v0 supplied externally; i1 = 0
};

struct BoundaryMode {
  BoundaryKind kind = BoundaryKind::SourceLoad;
  std::function<double(double)> v0_drive;  // Controlled only

  static BoundaryMode source_load() { return {BoundaryKind::SourceLoad, {}}; }
  static BoundaryMode passive_short() { return {BoundaryKind::PassiveShort, {}}; }
  static BoundaryMode controlled(std::function<double(double)> drive) {
    if (!drive) throw std::invalid_argument("BoundaryMode::controlled: drive must be callable");
    return {BoundaryKind::Controlled, std::move(drive)};
  }
};

struct StateRate {
  std::vector<double> di;
  std::vector<double> dv;
};

namespace detail {

/// Interior telegrapher rates at every node, one-sided rows at the ends.
/// No boundary handling; the mode layers on top.
inline void free_field_rates(const Field& f, const LineParams& p, const DiscreteOp& op,
                             StateRate& out) {
  op.apply(f.v, out.di);
  op.apply(f.i, out.dv);
  const std::size_t m = f.nodes();
  for (std::size_t k = 0; k < m; ++k) {
    out.di[k] = (-out.di[k] - p.R * f.i[k]) / p.L;
    out.dv[k] = -(out.dv[k] + p.G * f.v[k]) / p.C;
  }
}

}  // namespace detail

/// Applies the mode's algebraic constraints in place.
inline void enforce_boundary(Field& f, const LineParams& p, const BoundaryMode& mode, double t) {
  switch (mode.kind) {
    case BoundaryKind::SourceLoad:
      f.v.front() = p.E - p.R0 * f.i.front();
      if (p.C1 == 0.0) f.v.back() = p.R1 * f.i.back();
      break;
    case BoundaryKind::PassiveShort:
      f.v.front() = -p.R0 * f.i.front();
      f.i.back() = 0.0;
      break;
    case BoundaryKind::Controlled:
      f.v.front() = mode.v0_drive(t);
      f.i.back() = 0.0;
      break;
  }
}

/// Rates of the constrained system. Assumes the constraints already hold on
/// f (callers enforce at every stage state). Algebraic rows carry rate zero;
/// their values are re-enforced after each stage.
inline StateRate telegrapher_rhs(const Field& f, const LineParams& p, const DiscreteOp& op,
                                 const BoundaryMode& mode) {
  StateRate r;
  detail::free_field_rates(f, p, op, r);
  switch (mode.kind) {
    case BoundaryKind::SourceLoad:
      r.dv.front() = 0.0;  // algebraic source constraint
      if (p.C1 > 0.0)
        r.dv.back() = (f.i.back() - f.v.back() / p.R1) / p.C1;
      else
        r.dv.back() = 0.0;  // degenerate load: algebraic v1 = R1*i1
      break;
    case BoundaryKind::PassiveShort:
    case BoundaryKind::Controlled:
      r.dv.front() = 0.0;
      r.di.back() = 0.0;
      break;
  }
  return r;
}

/// Mixed potential: integral of (-dv/dz * i + G v^2/2 - R i^2/2).
inline double mixed_potential_P(const FullState& s, const LineParams& p, const Grid& g) {
  const Field& f = s.field;
  f.check_shape(g);
  DiscreteOp op(g);
  std::vector<double> vz = op(f.v);
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = -vz[k] * f.i[k] + 0.5 * p.G * f.v[k] * f.v[k] - 0.5 * p.R * f.i[k] * f.i[k];
  return integrate(q, g);
}

/// P plus the boundary terms: P0 = (E - v0) i0 - R0 i0^2 / 2, P1 = v1^2 / (2 R1).
inline double augmented_potential(const FullState& s, const LineParams& p, const Grid& g) {
  const double P = mixed_potential_P(s, p, g);
  const double i0 = s.i0(), v0 = s.v0(), v1 = s.v1();
  const double P0 = (p.E - v0) * i0 - 0.5 * i0 * i0 * p.R0;
  const double P1 = 0.5 * v1 * v1 / p.R1;
  return P + P0 + P1;
}

/// The six-component variational stack of the augmented potential:
/// interior pair at every node plus the four boundary components.
struct VariationalStack {
  std::vector<double> di;  // -dv/dz - R i
  std::vector<double> dv;  // G v + di/dz
  double b0_i = 0.0;       // E - v0 - R0 i0
  double b0_v = 0.0;       // identically zero
  double b1_i = 0.0;       // identically zero
  double b1_v = 0.0;       // v1/R1 - i1
};

inline VariationalStack variational_derivative(const FullState& s, const LineParams& p,
                                               const Grid& g) {
  const Field& f = s.field;
  f.check_shape(g);
  DiscreteOp op(g);
  VariationalStack out;
  op.apply(f.v, out.di);
  op.apply(f.i, out.dv);
  for (std::size_t k = 0; k < g.nodes(); ++k) {
    out.di[k] = -out.di[k] - p.R * f.i[k];
    out.dv[k] = p.G * f.v[k] + out.dv[k];
  }
  out.b0_i = p.E - f.v.front() - p.R0 * f.i.front();
  out.b1_v = f.v.back() / p.R1 - f.i.back();
  return out;
}

/// h0-style quadratic form of a variational stack (boundary pairs + field
/// quadrature), returned as the norm (square root).
inline double stack_h0(const VariationalStack& st, const Grid& g) {
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = st.di[k] * st.di[k] + st.dv[k] * st.dv[k];
  double b = st.b0_i * st.b0_i + st.b0_v * st.b0_v + st.b1_i * st.b1_i + st.b1_v * st.b1_v;
  return std::sqrt(b + integrate(q, g));
}

/// Equilibrium residual of the equations the discrete system actually
/// enforces in the given mode. The verbatim stack keeps the field v-rows at
/// the boundary nodes, but the discrete system replaces those rows by the
/// termination/constraint equations; measuring the enforced set is what
/// vanishes (to rounding) at the discrete steady state.
inline double equilibrium_residual(const FullState& s, const LineParams& p, const Grid& g,
                                   const BoundaryMode& mode, double t = 0.0) {
  VariationalStack st = variational_derivative(s, p, g);
  const Field& f = s.field;
  switch (mode.kind) {
    case BoundaryKind::SourceLoad:
      st.b0_i = p.E - f.v.front() - p.R0 * f.i.front();
      st.b1_v = f.v.back() / p.R1 - f.i.back();
      break;
    case BoundaryKind::PassiveShort:
      st.b0_i = -p.R0 * f.i.front() - f.v.front();
      st.b1_v = f.i.back();
      break;
    case BoundaryKind::Controlled:
      st.b0_i = mode.v0_drive(t) - f.v.front();
      st.b1_v = f.i.back();
      break;
  }
  // v-field rows at the boundary nodes are owned by the constraint rows above
  st.dv.front() = 0.0;
  if (mode.kind == BoundaryKind::SourceLoad && p.C1 > 0.0)
    st.dv.back() = f.i.back() - f.v.back() / p.R1;
  else
    st.dv.back() = 0.0;
  // pinned i rows
  if (mode.kind != BoundaryKind::SourceLoad) st.di.back() = 0.0;
  return stack_h0(st, g);
}

struct SimOptions {
  double dt = 0.0;          // 0 -> auto
  double t_end = 1.0;
  std::size_t log_stride = 1;
  double cfl_safety = 0.5;
  std::vector<std::size_t> probe_nodes;
  double blowup_limit = 1e12;
};

inline std::string format_cfl(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

inline double cfl_limit(const LineParams& p, const Grid& g, double safety) {
  return safety * g.dz * std::sqrt(p.L * p.C);
}

/// Default step: CFL bound and the two relaxation-rate bounds, each with the
/// same safety factor.
inline double auto_dt(const LineParams& p, const Grid& g, double safety = 0.5) {
  double dt = cfl_limit(p, g, safety);
  dt = std::min(dt, safety * p.C / p.G);
  if (p.R > 0.0) dt = std::min(dt, safety * p.L / p.R);
  return dt;
}

namespace detail {

template <typename RhsFn, typename EnforceFn>
inline void rk4_step(Field& f, double t, double dt, RhsFn&& rhs, EnforceFn&& enforce) {
  const std::size_t m = f.nodes();
  Field stage = f;
  StateRate k1 = rhs(stage, t);

  auto make_stage = [&](const StateRate& k, double a, double ts) -> StateRate {
    for (std::size_t j = 0; j < m; ++j) {
      stage.i[j] = f.i[j] + a * dt * k.di[j];
      stage.v[j] = f.v[j] + a * dt * k.dv[j];
    }
    enforce(stage, ts);
    return rhs(stage, ts);
  };

  StateRate k2 = make_stage(k1, 0.5, t + 0.5 * dt);
  StateRate k3 = make_stage(k2, 0.5, t + 0.5 * dt);
  StateRate k4 = make_stage(k3, 1.0, t + dt);

  for (std::size_t j = 0; j < m; ++j) {
    f.i[j] += dt / 6.0 * (k1.di[j] + 2.0 * k2.di[j] + 2.0 * k3.di[j] + k4.di[j]);
    f.v[j] += dt / 6.0 * (k1.dv[j] + 2.0 * k2.dv[j] + 2.0 * k3.dv[j] + k4.dv[j]);
  }
  enforce(f, t + dt);
}

}  // namespace detail

/// One RK4 update of the constrained system; algebraic rows re-enforced
/// after every stage.
inline FullState step(const FullState& s, const LineParams& p, const Grid& g,
                      const BoundaryMode& mode, double dt, double cfl_safety = 0.5) {
  p.validate();
  s.field.check_shape(g);
  const double limit = cfl_limit(p, g, cfl_safety);
  if (dt > limit)
    throw CflViolation("step: dt " + format_cfl(dt) + " exceeds CFL bound " + format_cfl(limit) +
                           "; suggested dt = " + format_cfl(limit),
                       limit);
  DiscreteOp op(g);
  FullState out = s;
  detail::rk4_step(
      out.field, 0.0, dt,
      [&](const Field& f, double) { return telegrapher_rhs(f, p, op, mode); },
      [&](Field& f, double t2) { enforce_boundary(f, p, mode, t2); });
  return out;
}

/// Fixed-step run with per-stride diagnostics. The Sample carries every
/// functional the monitors consume so no run needs repeating.
inline Trajectory simulate(const FullState& s0, const LineParams& p, const Grid& g,
                           const BoundaryMode& mode, const SimOptions& opt) {
  p.validate();
  s0.field.check_shape(g);
  if (!s0.field.finite()) throw std::invalid_argument("simulate: initial field has non-finite entries");

  double dt = opt.dt > 0.0 ? opt.dt : auto_dt(p, g, opt.cfl_safety);
  const double limit = cfl_limit(p, g, opt.cfl_safety);
  if (dt > limit)
    throw CflViolation("simulate: dt " + format_cfl(dt) + " exceeds CFL bound " +
                           format_cfl(limit) + "; suggested dt = " + format_cfl(limit),
                       limit);

  DiscreteOp op(g);
  Trajectory traj;
  traj.probe_nodes = opt.probe_nodes;
  traj.c1_degenerate = (mode.kind == BoundaryKind::SourceLoad && p.C1 == 0.0);

  Field f = s0.field;
  enforce_boundary(f, p, mode, 0.0);

  const std::size_t nsteps = static_cast<std::size_t>(std::llround(opt.t_end / dt));

  std::vector<double> iz, vz, q(g.nodes());
  auto log_sample = [&](double t) {
    Sample smp;
    smp.t = t;
    op.apply(f.i, iz);
    op.apply(f.v, vz);
    const StateRate r = telegrapher_rhs(f, p, op, mode);

    // potentials
    for (std::size_t k = 0; k < g.nodes(); ++k)
      q[k] = -vz[k] * f.i[k] + 0.5 * p.G * f.v[k] * f.v[k] - 0.5 * p.R * f.i[k] * f.i[k];
    const double P = integrate(q, g);
    for (std::size_t k = 0; k < g.nodes(); ++k) {
      const double a = iz[k] + p.G * f.v[k];
      q[k] = 0.5 / p.G * a * a + 0.5 / p.G * iz[k] * iz[k] + 0.5 * p.R * f.i[k] * f.i[k];
    }
    const double Pt = integrate(q, g);
    for (std::size_t k = 0; k < g.nodes(); ++k)
      q[k] = -0.5 * p.R * f.i[k] * f.i[k] + 0.5 * p.G * f.v[k] * f.v[k] - f.i[k] * vz[k];
    const double P1 = integrate(q, g);
    for (std::size_t k = 0; k < g.nodes(); ++k)
      q[k] = p.L * r.di[k] * r.di[k] + p.C * r.dv[k] * r.dv[k];
    const double I2 = integrate(q, g);

    FullState cur(f);
    smp.P = P;
    smp.calP = augmented_potential(cur, p, g);
    smp.Pt = Pt;
    smp.P1 = P1;
    smp.I2 = I2;
    smp.resid = equilibrium_residual(cur, p, g, mode, t);
    smp.i0 = f.i.front();
    smp.v0 = f.v.front();
    smp.i1 = f.i.back();
    smp.v1 = f.v.back();
    smp.di0 = r.di.front();
    smp.di1 = r.di.back();
    smp.dv1 = r.dv.back();
    switch (mode.kind) {
      case BoundaryKind::SourceLoad:
        smp.dv0 = -p.R0 * r.di.front();
        if (p.C1 == 0.0) smp.dv1 = p.R1 * r.di.back();
        break;
      case BoundaryKind::PassiveShort:
        smp.dv0 = -p.R0 * r.di.front();
        break;
      case BoundaryKind::Controlled: {
        // drive rate via a symmetric difference of the supplied signal
        const double h = std::max(dt * 1e-3, 1e-12);
        smp.dv0 = (mode.v0_drive(t + h) - mode.v0_drive(std::max(t - h, 0.0))) /
                  (t - h < 0.0 ? (t + h) : 2.0 * h);
        break;
      }
    }
    smp.probe_i.reserve(traj.probe_nodes.size());
    smp.probe_v.reserve(traj.probe_nodes.size());
    for (std::size_t nidx : traj.probe_nodes) {
      smp.probe_i.push_back(f.i.at(nidx));
      smp.probe_v.push_back(f.v.at(nidx));
    }
    traj.samples.push_back(std::move(smp));
  };

  double t = 0.0;
  for (std::size_t k = 0;; ++k) {
    if (k % opt.log_stride == 0) log_sample(t);
    if (k == nsteps) break;
    detail::rk4_step(
        f, t, dt, [&](const Field& ff, double) { return telegrapher_rhs(ff, p, op, mode); },
        [&](Field& ff, double t2) { enforce_boundary(ff, p, mode, t2); });
    t = double(k + 1) * dt;
    double m = std::max(vecops::max_abs(f.i), vecops::max_abs(f.v));
    if (!(m <= opt.blowup_limit))
      throw SimulationAbort("simulate: state magnitude exceeded " +
                                std::to_string(opt.blowup_limit) + " at step " + std::to_string(k + 1),
                            k + 1);
  }

  traj.final_field = f;
  return traj;
}

}  // namespace bmline
