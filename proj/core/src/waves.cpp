#include "seabed/waves.hpp"

#include <cmath>
#include <string>

#include "seabed/errors.hpp"

namespace seabed {
namespace {

void check_depth(const ScalarField& zeta, const ScalarField& b, double floor, double t) {
  for (int i = 0; i < zeta.size(); ++i)
    if (zeta[i] - b[i] < floor)
      throw DepthViolation("simulate: depth " + std::to_string(zeta[i] - b[i]) +
                           " under floor at X = " + std::to_string(zeta.grid().x(i)) +
                           ", t = " + std::to_string(t));
}

}  // namespace

std::pair<ScalarField, ScalarField> rhs(const WaveState& s, const ScalarField& b,
                                        const SimConfig& cfg) {
  require_same_grid(s.zeta.grid(), b.grid(), "rhs");
  require_same_grid(s.zeta.grid(), s.psi.grid(), "rhs");
  check_depth(s.zeta, b, cfg.depth_floor, s.t);
  const bool periodic = cfg.lateral == LateralPolicy::periodic;
  if (!periodic)
    throw ConfigError("rhs: only the periodic lateral policy is supported for time stepping");

  FluidDomainSpec dom = build_domain(b, s.zeta, cfg.depth_floor);
  PotentialField phi = solve_potential_periodic(dom, s.psi, cfg.n_sigma, cfg.solver);
  ScalarField G = dno(phi);
  if (cfg.conserve_mean) {
    // Drop the (discretization-level) mean so \int zeta stays constant.
    const double m = G.mean();
    for (int i = 0; i < G.size(); ++i) G[i] -= m;
  }

  const ScalarField zx = s.zeta.derivative_periodic();
  const ScalarField px = s.psi.derivative_periodic();
  ScalarField dpsi(s.psi.grid());
  for (int i = 0; i < dpsi.size(); ++i) {
    const double num = G[i] + zx[i] * px[i];
    dpsi[i] = -cfg.g * s.zeta[i] - 0.5 * px[i] * px[i] +
              num * num / (2.0 * (1.0 + zx[i] * zx[i]));
  }
  return {G, dpsi};
}

WaveState step_rk4(const WaveState& s, const ScalarField& b, const SimConfig& cfg) {
  const double dt = cfg.dt;
  auto advance = [&](const WaveState& base, const std::pair<ScalarField, ScalarField>& k,
                     double frac) {
    WaveState out = base;
    out.t = s.t + frac * dt;
    ScalarField z = base.zeta, p = base.psi;
    z += frac * dt * k.first;
    p += frac * dt * k.second;
    out.zeta = std::move(z);
    out.psi = std::move(p);
    return out;
  };
  const auto k1 = rhs(s, b, cfg);
  const auto k2 = rhs(advance(s, k1, 0.5), b, cfg);
  const auto k3 = rhs(advance(s, k2, 0.5), b, cfg);
  const auto k4 = rhs(advance(s, k3, 1.0), b, cfg);
  WaveState out = s;
  out.t = s.t + dt;
  for (int i = 0; i < s.zeta.size(); ++i) {
    out.zeta[i] =
        s.zeta[i] + dt / 6.0 * (k1.first[i] + 2.0 * k2.first[i] + 2.0 * k3.first[i] + k4.first[i]);
    out.psi[i] = s.psi[i] +
                 dt / 6.0 * (k1.second[i] + 2.0 * k2.second[i] + 2.0 * k3.second[i] + k4.second[i]);
  }
  return out;
}

Trajectory simulate(const WaveState& init, const ScalarField& b, const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end >= init.t))
    throw ConfigError("simulate: need dt > 0 and t_end >= start time");
  Trajectory traj;
  traj.dt = cfg.dt;
  traj.states.push_back(init);
  const int steps = static_cast<int>(std::llround((cfg.t_end - init.t) / cfg.dt));
  for (int k = 0; k < steps; ++k) {
    traj.states.push_back(step_rk4(traj.states.back(), b, cfg));
  }
  return traj;
}

int window_offset(const Grid1D& mother, const Grid1D& window) {
  const double h = mother.spacing();
  const double tol = 1e-9 * std::max(1.0, mother.length());
  if (window.a1 < mother.a1 - tol || window.a2 > mother.a2 + tol)
    throw WindowOutsideDomain("window exceeds the mother domain");
  const double off = (window.a1 - mother.a1) / h;
  const int i0 = static_cast<int>(std::llround(off));
  if (std::abs(off - i0) > 1e-6)
    throw WindowOutsideDomain("window start is not a mother grid node");
  if (std::abs(window.spacing() - h) > 1e-9 * h)
    throw WindowOutsideDomain("window spacing differs from the mother grid");
  if (i0 + window.n > mother.n) throw WindowOutsideDomain("window end is not a mother grid node");
  return i0;
}

ScalarField restrict_to_window(const ScalarField& f, const Grid1D& window) {
  const int i0 = window_offset(f.grid(), window);
  ScalarField out(window);
  for (int i = 0; i < window.n; ++i) out[i] = f[i0 + i];
  return out;
}

Measurement measure(const Trajectory& traj, double t0, const ScalarField& b,
                    const Grid1D& window, const SimConfig& cfg) {
  if (traj.states.empty()) throw TimeOutOfRange("measure: empty trajectory");
  const double t_first = traj.states.front().t;
  const double t_last = traj.states.back().t;
  if (t0 < t_first - 0.5 * traj.dt || t0 > t_last + 0.5 * traj.dt)
    throw TimeOutOfRange("measure: t0 = " + std::to_string(t0) + " outside [" +
                         std::to_string(t_first) + ", " + std::to_string(t_last) + "]");
  size_t best = 0;
  double dbest = std::abs(traj.states[0].t - t0);
  for (size_t k = 1; k < traj.states.size(); ++k) {
    const double d = std::abs(traj.states[k].t - t0);
    if (d < dbest) {
      dbest = d;
      best = k;
    }
  }
  const WaveState& s = traj.states[best];

  const int i0 = window_offset(s.zeta.grid(), window);
  // Report the raw surface flux of the measured state: the mean projection is
  // a time-stepping device and would bias the exported rate.
  SimConfig raw = cfg;
  raw.conserve_mean = false;
  const auto rates = rhs(s, b, raw);

  // Wall traces come straight from the mother solve: at a shared column the
  // window sigma layers coincide with the mother layers.
  FluidDomainSpec dom = build_domain(b, s.zeta, cfg.depth_floor);
  PotentialField phi = solve_potential_periodic(dom, s.psi, cfg.n_sigma, cfg.solver);
  Measurement out;
  out.n_sigma = cfg.n_sigma;
  out.theta.left.resize(static_cast<size_t>(cfg.n_sigma));
  out.theta.right.resize(static_cast<size_t>(cfg.n_sigma));
  const int i1 = i0 + window.n - 1;
  for (int j = 0; j < cfg.n_sigma; ++j) {
    out.theta.left[static_cast<size_t>(j)] = phi.u(i0, j);
    out.theta.right[static_cast<size_t>(j)] = phi.u(i1, j);
  }

  out.tuple.t0 = s.t;
  out.tuple.b_left = b[i0];
  out.tuple.b_right = b[i1];
  out.tuple.zeta = restrict_to_window(s.zeta, window);
  out.tuple.dt_zeta = restrict_to_window(rates.first, window);
  out.tuple.psi = restrict_to_window(s.psi, window);
  return out;
}

}  // namespace seabed
