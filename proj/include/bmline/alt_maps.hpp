#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "bmline/line.hpp"
#include "bmline/report.hpp"
#include "bmline/trajectory.hpp"

namespace bmline {

/// Second storage family: P1 (power units), P2 (power/time), Phat = lambda P1 + P2.
/// lambda carries 1/time units; the passivity window is 0 < lambda < R/L.
struct AltMapConfig {
  double lambda = 0.0;
  bool half_p2 = true;  // P2 carries a 1/2 factor; reconciles the chain rule
  bool window_ok = false;

  AltMapConfig(double lambda_, const LineParams& p, bool half = true)
      : lambda(lambda_), half_p2(half), window_ok(lambda_ > 0.0 && lambda_ < p.R / p.L) {}
};

/// P1 = int (-R i^2/2 + G v^2/2 - i dv/dz) dz
inline double p1_eval(const FullState& s, const LineParams& p, const Grid& g) {
  const Field& f = s.field;
  f.check_shape(g);
  DiscreteOp op(g);
  std::vector<double> vz = op(f.v);
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = -0.5 * p.R * f.i[k] * f.i[k] + 0.5 * p.G * f.v[k] * f.v[k] - f.i[k] * vz[k];
  return integrate(q, g);
}

/// P2 = (1/2 if half_p2) int (L i_t^2 + C v_t^2) dz, with rates supplied by
/// the caller (the state's rhs).
inline double p2_eval(const FullState& s, const StateRate& rate, const LineParams& p,
                      const Grid& g, const AltMapConfig& cfg) {
  s.field.check_shape(g);
  detail::check_length("p2_eval", rate.di.size(), g.nodes());
  std::vector<double> q(g.nodes());
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = p.L * rate.di[k] * rate.di[k] + p.C * rate.dv[k] * rate.dv[k];
  return (cfg.half_p2 ? 0.5 : 1.0) * integrate(q, g);
}

inline double phat_eval(const FullState& s, const StateRate& rate, const LineParams& p,
                        const Grid& g, const AltMapConfig& cfg) {
  return cfg.lambda * p1_eval(s, p, g) + p2_eval(s, rate, p, g, cfg);
}

struct PhatReport {
  double lambda = 0.0;
  bool window_ok = false;
  double max_residual = 0.0;  // max over interior steps of dPhat/dt + (v_t i_t)|_0^1
  double tol = 0.0;
  bool violation_observed = false;
  bool holds = false;  // meaningful when window_ok

  Report to_report() const {
    Report r;
    r.put("lambda", lambda);
    r.put("window_ok", window_ok);
    r.put("max_residual", max_residual);
    r.put("tol", tol);
    r.put("violation_observed", violation_observed);
    r.put("holds", holds);
    return r;
  }
};

/// Monitors dPhat/dt + (v_t i_t)|_0^1 along a trajectory. Inside the window
/// the expression is non-positive up to discretization noise; outside it the
/// report records whether a sign violation was observed.
inline PhatReport phat_rate_monitor(const Trajectory& traj, const LineParams& p,
                                    const AltMapConfig& cfg) {
  if (traj.size() < 5)
    throw std::invalid_argument("phat_rate_monitor: trajectory too short (" +
                                std::to_string(traj.size()) + " samples, need >= 5)");
  std::vector<double> rate = centered_rate(traj, [&](const Sample& s) {
    return cfg.lambda * s.P1 + (cfg.half_p2 ? 0.5 : 1.0) * s.I2;
  });
  PhatReport rep;
  rep.lambda = cfg.lambda;
  rep.window_ok = cfg.window_ok;
  double worst = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const Sample& s = traj.samples[k];
    const double boundary = s.dv1 * s.di1 - s.dv0 * s.di0;
    worst = std::max(worst, rate[k] + boundary);
    scale = std::max(scale, std::abs(rate[k]));
  }
  rep.max_residual = worst;
  rep.tol = 1e-6 * scale;
  rep.violation_observed = worst > rep.tol;
  rep.holds = !rep.violation_observed;
  return rep;
}

}  // namespace bmline
