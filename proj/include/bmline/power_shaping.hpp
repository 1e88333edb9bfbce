#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bmline/admissible.hpp"
#include "bmline/line.hpp"

namespace bmline {

/// Desired equilibrium (i*, v*) satisfying the discrete relation
/// G v* + D i* = 0. Constructors build pairs that satisfy it to rounding;
/// the constructor verifies the residual bound either way.
struct TargetProfile {
  std::vector<double> i_star;
  std::vector<double> v_star;

  static constexpr double kResidualBound = 1e-8;

  TargetProfile(std::vector<double> i_s, std::vector<double> v_s, const LineParams& p,
                const Grid& g)
      : i_star(std::move(i_s)), v_star(std::move(v_s)) {
    detail::check_length("TargetProfile(i_star)", i_star.size(), g.nodes());
    detail::check_length("TargetProfile(v_star)", v_star.size(), g.nodes());
    const double r = residual(p, g);
    if (!(r <= kResidualBound))
      throw std::invalid_argument("TargetProfile: equilibrium relation residual " +
                                  format_double(r) + " exceeds " + format_double(kResidualBound));
  }

  /// max_k |G v*_k + (D i*)_k|
  double residual(const LineParams& p, const Grid& g) const {
    DiscreteOp op(g);
    std::vector<double> iz = op(i_star);
    double m = 0.0;
    for (std::size_t k = 0; k < iz.size(); ++k)
      m = std::max(m, std::abs(p.G * v_star[k] + iz[k]));
    return m;
  }

  static TargetProfile constant_current(double c, const LineParams& p, const Grid& g) {
    return TargetProfile(std::vector<double>(g.nodes(), c), std::vector<double>(g.nodes(), 0.0),
                         p, g);
  }

  /// Any current profile; the voltage is the one the relation dictates.
  static TargetProfile from_current(std::vector<double> i_s, const LineParams& p, const Grid& g) {
    DiscreteOp op(g);
    std::vector<double> iz = op(i_s);
    std::vector<double> v_s(g.nodes());
    for (std::size_t k = 0; k < v_s.size(); ++k) v_s[k] = -iz[k] / p.G;
    return TargetProfile(std::move(i_s), std::move(v_s), p, g);
  }

  /// Integrates i*(z) = i1 + int_z^1 G v* dz', then snaps v* to the discrete
  /// relation so the stored pair is consistent to rounding (the quadrature
  /// alone leaves an O(dz^2) residual).
  static TargetProfile from_voltage(const std::vector<double>& v_s, double i_at_1,
                                    const LineParams& p, const Grid& g) {
    detail::check_length("TargetProfile::from_voltage", v_s.size(), g.nodes());
    std::vector<double> i_s(g.nodes());
    i_s.back() = i_at_1;
    for (std::size_t k = g.nodes() - 1; k-- > 0;)
      i_s[k] = i_s[k + 1] + 0.5 * g.dz * p.G * (v_s[k] + v_s[k + 1]);
    return from_current(std::move(i_s), p, g);
  }
};

struct ControllerState {
  double xi = 0.0;
  double K_gain = 1.0;
};

enum class ClosedLoopMode {
  ShapedDynamics,  // simulate the shaped field equations directly
  Interconnected,  // boundary feedback through the finite controller
};

/// Casimir candidate: -xi + int i dz + c.
inline double casimir_value(const FullState& s, const Grid& g, double c = 0.0) {
  if (!s.xi.has_value())
    throw std::invalid_argument("casimir_value: state has no controller state xi");
  return -*s.xi + integrate(s.field.i, g) + c;
}

struct CasimirConditions {
  double dv_residual = 0.0;     // delta_v C, zero by construction
  double dz_di_residual = 0.0;  // max |D applied to delta_i C = 1|
};

/// The structural conditions on the Casimir candidate. delta_v C vanishes by
/// construction; delta_i C = 1, so its z-derivative is the stencil applied
/// to the all-ones vector.
inline CasimirConditions casimir_conditions(const Grid& g) {
  DiscreteOp op(g);
  std::vector<double> ones(g.nodes(), 1.0);
  CasimirConditions out;
  out.dv_residual = 0.0;
  out.dz_di_residual = vecops::max_abs(op(ones));
  return out;
}

/// Controller power function on the current field:
/// int (K/2 (i - i*)^2 - i i* R + di/dz v*) dz.
inline double hc_eval(const FullState& s, const TargetProfile& tp, const LineParams& p,
                      const Grid& g, double K_gain) {
  const Field& f = s.field;
  f.check_shape(g);
  DiscreteOp op(g);
  std::vector<double> iz = op(f.i);
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double e = f.i[k] - tp.i_star[k];
    q[k] = 0.5 * K_gain * e * e - f.i[k] * tp.i_star[k] * p.R + iz[k] * tp.v_star[k];
  }
  return integrate(q, g);
}

struct PdForms {
  double assembled = 0.0;    // P~ + H_c + c
  double closed_form = 0.0;  // three-squares form
};

/// The shaped potential both ways: assembled from its pieces with
/// c = int (R i*^2 + G v*^2)/2 dz, and the completed three-squares form.
inline PdForms pd_eval(const FullState& s, const TargetProfile& tp, const LineParams& p,
                       const Grid& g, double K_gain) {
  const Field& f = s.field;
  f.check_shape(g);
  DiscreteOp op(g);
  std::vector<double> iz = op(f.i);
  std::vector<double> iz_star = op(tp.i_star);
  std::vector<double> q(g.nodes());

  PdForms out;
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = 0.5 * (p.R * tp.i_star[k] * tp.i_star[k] + p.G * tp.v_star[k] * tp.v_star[k]);
  const double c = integrate(q, g);
  const double pt = ptilde_two_forms(s, p, g).raw;
  out.assembled = pt + hc_eval(s, tp, p, g, K_gain) + c;

  for (std::size_t k = 0; k < q.size(); ++k) {
    const double a = p.G * f.v[k] + iz[k];
    const double e = f.i[k] - tp.i_star[k];
    const double astar = p.G * tp.v_star[k] + iz_star[k];
    q[k] = (a * a + p.G * (K_gain + p.R) * e * e + astar * astar) / (2.0 * p.G);
  }
  out.closed_form = integrate(q, g);
  return out;
}

/// Variational derivative of the shaped potential (field rows).
inline void pd_variational(const Field& f, const TargetProfile& tp, const LineParams& p,
                           const DiscreteOp& op, double K_gain, std::vector<double>& di,
                           std::vector<double>& dv) {
  const std::size_t m = f.nodes();
  std::vector<double> iz = op(f.i);
  // d(integrand)/d(i_z) = v + v* + 2 i_z / G; delta_i = (K+R)(i-i*) - D(that)
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) w[k] = f.v[k] + tp.v_star[k] + 2.0 * iz[k] / p.G;
  op.apply(w, di);
  for (std::size_t k = 0; k < m; ++k)
    di[k] = (K_gain + p.R) * (f.i[k] - tp.i_star[k]) - di[k];
  op.apply(f.i, dv);
  for (std::size_t k = 0; k < m; ++k) dv[k] = p.G * f.v[k] + dv[k];
}

/// Shaped field rates: the pair's operator matrix applied to
/// (delta_i Pd, delta_v Pd). Free field, one-sided rows at the ends.
inline StateRate shaped_rhs(const Field& f, const TargetProfile& tp, const LineParams& p,
                            const DiscreteOp& op, double K_gain) {
  StateRate r;
  std::vector<double> di_pd, dv_pd;
  pd_variational(f, tp, p, op, K_gain, di_pd, dv_pd);
  std::vector<double> dz_dv = op(dv_pd);
  const std::size_t m = f.nodes();
  r.di.resize(m);
  r.dv.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    r.di[k] = -di_pd[k] / p.L - 2.0 / (p.G * p.L) * dz_dv[k];
    r.dv[k] = -dv_pd[k] / p.C;
  }
  return r;
}

/// h0-style norm of the shaped stack at a state (field rows only; the shaped
/// system has no boundary constraint rows).
inline double pd_equilibrium_residual(const FullState& s, const TargetProfile& tp,
                                      const LineParams& p, const Grid& g, double K_gain) {
  DiscreteOp op(g);
  VariationalStack st;
  pd_variational(s.field, tp, p, op, K_gain, st.di, st.dv);
  return stack_h0(st, g);
}

struct ClosedLoopOptions {
  double dt = 0.0;  // 0 -> auto
  double t_end = 1.0;
  std::size_t log_stride = 1;
  double cfl_safety = 0.5;
  std::vector<std::size_t> probe_nodes;
  double blowup_limit = 1e12;
  double casimir_c = 0.0;
  double xi0 = std::numeric_limits<double>::quiet_NaN();  // NaN -> int i(.,0) dz
};

struct ClosedLoopResult {
  Trajectory traj;
  ClosedLoopMode mode;
  double K_gain = 0.0;
  double terminal_error_i = 0.0;  // max |i - i*|
  double terminal_error_v = 0.0;
  double casimir_drift = 0.0;     // C(T) - C(0)
  bool pd_monotone = false;
  double pd_worst_rate = 0.0;
  double pd_tol = 0.0;

  Report summary() const {
    Report r;
    r.put("mode", mode == ClosedLoopMode::ShapedDynamics ? "shaped" : "interconnected");
    r.put("K", K_gain);
    r.put("terminal_error", std::max(terminal_error_i, terminal_error_v));
    r.put("terminal_error_i", terminal_error_i);
    r.put("terminal_error_v", terminal_error_v);
    r.put("pd_monotone", pd_monotone);
    r.put("pd_worst_rate", pd_worst_rate);
    r.put("pd_tol", pd_tol);
    r.put("casimir_drift", casimir_drift);
    return r;
  }
};

/// Closed-loop run. ShapedDynamics integrates the shaped field equations;
/// Interconnected drives the line's z=0 voltage from the finite controller
/// (u0 = -y_c, xi' = di0/dt) with i(1,t) = 0, and logs the Casimir drift.
inline ClosedLoopResult simulate_closed_loop(const FullState& s0, const TargetProfile& tp,
                                             const LineParams& p, const Grid& g, double K_gain,
                                             ClosedLoopMode mode, const ClosedLoopOptions& opt) {
  p.validate();
  s0.field.check_shape(g);
  if (K_gain < 0.0) throw std::invalid_argument("simulate_closed_loop: K_gain must be nonnegative");

  DiscreteOp op(g);
  const double dt_auto = auto_dt(p, g, opt.cfl_safety);
  const double dt = opt.dt > 0.0 ? opt.dt : dt_auto;
  const double limit = cfl_limit(p, g, opt.cfl_safety);
  if (dt > limit)
    throw CflViolation("simulate_closed_loop: dt " + format_cfl(dt) + " exceeds CFL bound " +
                           format_cfl(limit) + "; suggested dt = " + format_cfl(limit),
                       limit);

  ClosedLoopResult out;
  out.mode = mode;
  out.K_gain = K_gain;
  Trajectory& traj = out.traj;
  traj.probe_nodes = opt.probe_nodes;
  traj.has_closed_loop = true;

  Field f = s0.field;
  double xi = std::isnan(opt.xi0) ? integrate(f.i, g) : opt.xi0;
  const double i_star_total = integrate(tp.i_star, g);

  // u0 = -y_c with y_c = K (xi - xi_ref) - R int i* dz on the leaf xi_ref = int i* dz + c
  auto u0_of_xi = [&](double x) {
    const double y_c = K_gain * (x - (i_star_total + opt.casimir_c)) - p.R * i_star_total;
    return -y_c;
  };

  auto enforce = [&](Field& ff, double x) {
    if (mode == ClosedLoopMode::Interconnected) {
      ff.v.front() = u0_of_xi(x);
      ff.i.back() = 0.0;
    }
  };

  auto rhs = [&](const Field& ff) -> StateRate {
    if (mode == ClosedLoopMode::ShapedDynamics) return shaped_rhs(ff, tp, p, op, K_gain);
    StateRate r;
    detail::free_field_rates(ff, p, op, r);
    r.dv.front() = 0.0;
    r.di.back() = 0.0;
    return r;
  };

  enforce(f, xi);

  const std::size_t nsteps = static_cast<std::size_t>(std::llround(opt.t_end / dt));
  std::vector<double> q(g.nodes());

  auto log_sample = [&](double t) {
    Sample smp;
    smp.t = t;
    FullState cur(f);
    cur.xi = xi;
    const StateRate r = rhs(f);
    const PdForms pd = pd_eval(cur, tp, p, g, K_gain);
    smp.Pd = pd.closed_form;
    smp.casimir = casimir_value(cur, g, opt.casimir_c);
    smp.resid = pd_equilibrium_residual(cur, tp, p, g, K_gain);
    smp.P = mixed_potential_P(cur, p, g);
    smp.Pt = ptilde_two_forms(cur, p, g).completed_square;
    smp.i0 = f.i.front();
    smp.v0 = f.v.front();
    smp.i1 = f.i.back();
    smp.v1 = f.v.back();
    smp.di0 = r.di.front();
    smp.di1 = r.di.back();
    smp.dv0 = r.dv.front();
    smp.dv1 = r.dv.back();
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

    if (mode == ClosedLoopMode::ShapedDynamics) {
      detail::rk4_step(
          f, t, dt, [&](const Field& ff, double) { return rhs(ff); },
          [&](Field&, double) {});
    } else {
      // RK4 on (field, xi) jointly; xi' = di0/dt of the constrained stage
      Field base = f;
      const double xi_base = xi;
      Field stage = f;
      double xs = xi;

      auto stage_rate = [&](const Field& ff, double x) -> std::pair<StateRate, double> {
        Field cf = ff;
        enforce(cf, x);
        StateRate r = rhs(cf);
        const double di0 = r.di.front();
        return {std::move(r), di0};
      };

      auto [k1, x1] = stage_rate(base, xi_base);
      for (std::size_t j = 0; j < g.nodes(); ++j) {
        stage.i[j] = base.i[j] + 0.5 * dt * k1.di[j];
        stage.v[j] = base.v[j] + 0.5 * dt * k1.dv[j];
      }
      xs = xi_base + 0.5 * dt * x1;
      auto [k2, x2] = stage_rate(stage, xs);
      for (std::size_t j = 0; j < g.nodes(); ++j) {
        stage.i[j] = base.i[j] + 0.5 * dt * k2.di[j];
        stage.v[j] = base.v[j] + 0.5 * dt * k2.dv[j];
      }
      xs = xi_base + 0.5 * dt * x2;
      auto [k3, x3] = stage_rate(stage, xs);
      for (std::size_t j = 0; j < g.nodes(); ++j) {
        stage.i[j] = base.i[j] + dt * k3.di[j];
        stage.v[j] = base.v[j] + dt * k3.dv[j];
      }
      xs = xi_base + dt * x3;
      auto [k4, x4] = stage_rate(stage, xs);

      for (std::size_t j = 0; j < g.nodes(); ++j) {
        f.i[j] = base.i[j] + dt / 6.0 * (k1.di[j] + 2.0 * k2.di[j] + 2.0 * k3.di[j] + k4.di[j]);
        f.v[j] = base.v[j] + dt / 6.0 * (k1.dv[j] + 2.0 * k2.dv[j] + 2.0 * k3.dv[j] + k4.dv[j]);
      }
      xi = xi_base + dt / 6.0 * (x1 + 2.0 * x2 + 2.0 * x3 + x4);
      enforce(f, xi);
    }

    t = double(k + 1) * dt;
    double m = std::max(vecops::max_abs(f.i), vecops::max_abs(f.v));
    if (!(m <= opt.blowup_limit))
      throw SimulationAbort("simulate_closed_loop: state magnitude exceeded " +
                                std::to_string(opt.blowup_limit) + " at step " +
                                std::to_string(k + 1),
                            k + 1);
  }

  traj.final_field = f;
  traj.xi_final = xi;

  out.terminal_error_i = vecops::max_abs_diff(f.i, tp.i_star);
  out.terminal_error_v = vecops::max_abs_diff(f.v, tp.v_star);
  out.casimir_drift = traj.samples.back().casimir - traj.samples.front().casimir;

  std::vector<double> pd_rate = centered_rate(traj, [](const Sample& s) { return s.Pd; });
  out.pd_worst_rate = interior_max(pd_rate);
  out.pd_tol = 1e-8 * std::max(1.0, std::abs(traj.samples.front().Pd));
  out.pd_monotone = out.pd_worst_rate <= out.pd_tol;
  return out;
}

}  // namespace bmline
