#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "bmline/line.hpp"
#include "bmline/operator_norm.hpp"
#include "bmline/report.hpp"
#include "bmline/trajectory.hpp"

namespace bmline {

/// Alternative storage/matrix pair generating the same dynamics. The
/// generic construction uses the integrated-by-parts form of the mixed
/// potential (integrand v di/dz instead of -dv/dz i); with the default pair
/// (lambda = -1, K = diag(0, 2/G)) the evaluator then reproduces the
/// completed-square storage exactly, including on fields with nonzero
/// boundary values.
struct AdmissiblePair {
  double lambda = -1.0;
  std::array<double, 2> K_diag{0.0, 0.0};
  std::function<double(const FullState&)> ptilde;
  std::function<double(const StateRate&)> atilde_form;
};

inline AdmissiblePair build_pair(double lambda, std::array<double, 2> K_diag,
                                 const LineParams& p, const Grid& g) {
  if (!(p.G > 0.0)) throw std::invalid_argument("build_pair: G must be positive");
  if (K_diag[0] < 0.0 || K_diag[1] < 0.0)
    throw std::invalid_argument("build_pair: K_diag entries must be nonnegative");

  AdmissiblePair out;
  out.lambda = lambda;
  out.K_diag = K_diag;

  out.ptilde = [lambda, K_diag, p, g](const FullState& s) {
    const Field& f = s.field;
    f.check_shape(g);
    DiscreteOp op(g);
    std::vector<double> iz = op(f.i);
    std::vector<double> q(g.nodes());
    for (std::size_t k = 0; k < q.size(); ++k)
      q[k] = f.v[k] * iz[k] + 0.5 * p.G * f.v[k] * f.v[k] - 0.5 * p.R * f.i[k] * f.i[k];
    double val = lambda * integrate(q, g);
    std::vector<double> vz = op(f.v);
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double di_P = -vz[k] - p.R * f.i[k];
      const double dv_P = p.G * f.v[k] + iz[k];
      q[k] = 0.5 * (K_diag[0] * di_P * di_P + K_diag[1] * dv_P * dv_P);
    }
    return val + integrate(q, g);
  };

  out.atilde_form = [p, g](const StateRate& r) {
    DiscreteOp op(g);
    std::vector<double> dvz = op(r.dv);
    std::vector<double> q(g.nodes());
    for (std::size_t k = 0; k < q.size(); ++k)
      q[k] = -p.L * r.di[k] * r.di[k] + (2.0 * p.C / p.G) * r.di[k] * dvz[k] -
             p.C * r.dv[k] * r.dv[k];
    return integrate(q, g);
  };
  return out;
}

/// The default pair from the construction above.
inline AdmissiblePair paper_pair(const LineParams& p, const Grid& g) {
  return build_pair(-1.0, {0.0, 2.0 / p.G}, p, g);
}

struct PtildeForms {
  double raw = 0.0;
  double completed_square = 0.0;
};

/// Both printed forms of the storage functional; algebraically identical,
/// returned separately so tests can assert the identity.
inline PtildeForms ptilde_two_forms(const FullState& s, const LineParams& p, const Grid& g) {
  const Field& f = s.field;
  f.check_shape(g);
  DiscreteOp op(g);
  std::vector<double> iz = op(f.i);
  std::vector<double> q(g.nodes());
  PtildeForms out;
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = 0.5 * p.R * f.i[k] * f.i[k] + 0.5 * p.G * f.v[k] * f.v[k] + f.v[k] * iz[k] +
           iz[k] * iz[k] / p.G;
  out.raw = integrate(q, g);
  for (std::size_t k = 0; k < q.size(); ++k) {
    const double a = iz[k] + p.G * f.v[k];
    q[k] = 0.5 / p.G * a * a + 0.5 / p.G * iz[k] * iz[k] + 0.5 * p.R * f.i[k] * f.i[k];
  }
  out.completed_square = integrate(q, g);
  return out;
}

/// Quadratic form of the symmetric part of the pair's matrix on a rate
/// field; the dP~/dt surrogate under zero boundary flow.
inline double atilde_negativity(const StateRate& rate, const LineParams& p, const Grid& g) {
  detail::check_length("atilde_negativity", rate.di.size(), g.nodes());
  detail::check_length("atilde_negativity", rate.dv.size(), g.nodes());
  return paper_pair(p, g).atilde_form(rate);
}

struct StabilityConditionReport {
  double lhs = 0.0;
  double operator_norm = 0.0;
  bool holds = false;

  Report to_report() const {
    Report r;
    r.put("lhs", lhs);
    r.put("operator_norm", operator_norm);
    r.put("holds", holds);
    return r;
  }
};

/// sqrt(C/L)/G * ||d/dz|| <= 1, evaluated with the measured discrete
/// operator norm. Reported per grid; the direct rate monitor is the
/// authoritative check.
inline StabilityConditionReport stability_condition(const LineParams& p, const Grid& g,
                                                    const OpNormOptions& opt = {}) {
  StabilityConditionReport out;
  out.operator_norm = op_norm(DiscreteOp(g), g, opt);
  out.lhs = std::sqrt(p.C / p.L) / p.G * out.operator_norm;
  out.holds = out.lhs <= 1.0;
  return out;
}

/// Supply-rate check d(calP)/dt <= v0 di0/dt with calP = P~ + R0 i0^2 / 2.
/// Rates by centered differences of the logged series; first/last samples
/// excluded from the violation maximum.
inline FunctionalReport boundary_passivity_monitor(const Trajectory& traj, const LineParams& p) {
  if (traj.size() < 3)
    throw std::invalid_argument("boundary_passivity_monitor: trajectory too short (" +
                                std::to_string(traj.size()) + " samples, need >= 3)");
  std::vector<double> dcal = centered_rate(
      traj, [&](const Sample& s) { return s.Pt + 0.5 * p.R0 * s.i0 * s.i0; });
  double worst = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const Sample& s = traj.samples[k];
    const double supply = s.v0 * s.di0;
    worst = std::max(worst, dcal[k] - supply);
    scale = std::max(scale, std::abs(dcal[k]));
  }
  FunctionalReport rep;
  rep.name = "boundary_passivity";
  rep.value = traj.samples.front().Pt + 0.5 * p.R0 * traj.samples.front().i0 * traj.samples.front().i0;
  rep.measured_max = worst;
  rep.bound = 1e-6 * scale;
  rep.holds = worst <= rep.bound;
  return rep;
}

/// dP~/dt <= tol at every interior logged step (zero-boundary-flow runs).
inline FunctionalReport dissipation_monitor(const Trajectory& traj, double tol_factor = 1e-8) {
  if (traj.size() < 3)
    throw std::invalid_argument("dissipation_monitor: trajectory too short");
  std::vector<double> rate = centered_rate(traj, [](const Sample& s) { return s.Pt; });
  const double worst = interior_max(rate);
  const double scale = interior_max_abs(rate);
  FunctionalReport rep;
  rep.name = "ptilde_dissipation";
  rep.value = traj.samples.front().Pt;
  rep.measured_max = worst;
  rep.bound = tol_factor * scale;
  rep.holds = worst <= rep.bound;
  return rep;
}

}  // namespace bmline
