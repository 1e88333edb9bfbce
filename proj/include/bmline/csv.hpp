#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bmline/grid.hpp"
#include "bmline/report.hpp"
#include "bmline/rlc.hpp"
#include "bmline/trajectory.hpp"

namespace bmline {

namespace detail {
inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}
}  // namespace detail

inline void write_rlc_csv(const std::filesystem::path& path,
                          const std::vector<rlc::RlcSample>& traj) {
  auto out = detail::open_out(path);
  out << "t,i_L,v_C,v_S,P,P_tilde,P_tilde_d\n";
  for (const auto& s : traj)
    out << format_double(s.t) << ',' << format_double(s.i_L) << ',' << format_double(s.v_C) << ','
        << format_double(s.v_S) << ',' << format_double(s.P) << ',' << format_double(s.P_tilde)
        << ',' << format_double(s.P_tilde_d) << '\n';
}

/// Per-run line CSV: t, i/v at the probe nodes, P, the augmented potential,
/// and the equilibrium residual.
inline void write_line_csv(const std::filesystem::path& path, const Trajectory& traj,
                           const Grid& g) {
  auto out = detail::open_out(path);
  out << "t";
  for (std::size_t nidx : traj.probe_nodes) out << ",i@z=" << format_double(g.z(nidx));
  for (std::size_t nidx : traj.probe_nodes) out << ",v@z=" << format_double(g.z(nidx));
  out << ",P,calP,resid\n";
  for (const auto& s : traj.samples) {
    out << format_double(s.t);
    for (double x : s.probe_i) out << ',' << format_double(x);
    for (double x : s.probe_v) out << ',' << format_double(x);
    out << ',' << format_double(s.P) << ',' << format_double(s.calP) << ','
        << format_double(s.resid) << '\n';
  }
}

inline void write_closed_loop_csv(const std::filesystem::path& path, const Trajectory& traj,
                                  const Grid& g) {
  auto out = detail::open_out(path);
  out << "t";
  for (std::size_t nidx : traj.probe_nodes) out << ",i@z=" << format_double(g.z(nidx));
  for (std::size_t nidx : traj.probe_nodes) out << ",v@z=" << format_double(g.z(nidx));
  out << ",P_d,casimir,resid\n";
  for (const auto& s : traj.samples) {
    out << format_double(s.t);
    for (double x : s.probe_i) out << ',' << format_double(x);
    for (double x : s.probe_v) out << ',' << format_double(x);
    out << ',' << format_double(s.Pd) << ',' << format_double(s.casimir) << ','
        << format_double(s.resid) << '\n';
  }
}

/// Snapshot dump: plain numeric text columns z, i, v; one file per snapshot.
inline void write_snapshot(const std::filesystem::path& path, const Field& f, const Grid& g) {
  auto out = detail::open_out(path);
  for (std::size_t k = 0; k < g.nodes(); ++k)
    out << format_double(g.z(k)) << ' ' << format_double(f.i[k]) << ' '
        << format_double(f.v[k]) << '\n';
}

inline void write_report(const std::filesystem::path& path, const std::string& heading,
                         const Report& rep) {
  auto out = detail::open_out(path);
  out << "# " << heading << '\n' << rep.to_text();
}

inline void append_report(std::ofstream& out, const std::string& heading, const Report& rep) {
  out << "# " << heading << '\n' << rep.to_text();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = detail::open_out(path);
  out << text;
}

}  // namespace bmline
