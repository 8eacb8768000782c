#include "seabed_cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "seabed/errors.hpp"
#include "seabed/geometry.hpp"
#include "seabed/inversion.hpp"
#include "seabed/raster.hpp"
#include "seabed/waves.hpp"
#include "seabed_cli/experiment.hpp"

namespace seabed::cli {
namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

CheckResult make_result(const std::string& name, double observed, double bound, bool pass,
                        const std::string& detail = "") {
  CheckResult r;
  r.name = name;
  r.observed = observed;
  r.bound = bound;
  r.pass = pass;
  r.detail = detail.empty() ? (fmt(observed) + " vs bound " + fmt(bound)) : detail;
  return r;
}

CheckResult upper_bound_check(const std::string& name, double observed, double bound,
                              const std::string& detail = "") {
  return make_result(name, observed, bound, observed <= bound, detail);
}

CheckResult lower_bound_check(const std::string& name, double observed, double bound,
                              const std::string& detail = "") {
  return make_result(name, observed, bound, observed >= bound, detail);
}

// ---------------------------------------------------------------------------
// manufactured harmonic: cosh(k (y + 1)) cos(k X) on a flat bottom at y = -1

double harmonic(double k, double x, double y) { return std::cosh(k * (y + 1.0)) * std::cos(k * x); }

double manufactured_error(int n, double k, const SolverOptions& solver) {
  Grid1D g{0.0, 1.0, n};
  ScalarField b(g, [](double) { return -1.0; });
  ScalarField z(g, [](double x) { return 0.07 * std::sin(2.0 * kPi * x); });
  FluidDomainSpec dom = build_domain(b, z, 0.5);
  ScalarField psi(g, [&](double x) { return harmonic(k, x, 0.07 * std::sin(2.0 * kPi * x)); });
  LateralTrace th;
  th.left.resize(n);
  th.right.resize(n);
  SigmaMap map{b, z, n};
  for (int j = 0; j < n; ++j) {
    th.left[j] = harmonic(k, g.x(0), map.y(0, j));
    th.right[j] = harmonic(k, g.x(n - 1), map.y(n - 1, j));
  }
  PotentialField phi = solve_potential(dom, psi, th, n, solver);
  double err2 = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double w = psi.weight(i) * map.depth(i) / (n - 1) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
      const double d = phi.u(i, j) - harmonic(k, g.x(i), map.y(i, j));
      err2 += w * d * d;
    }
  }
  return std::sqrt(err2);
}

// ---------------------------------------------------------------------------
// randomized admissible configurations

struct MotherProfiles {
  std::function<double(double)> bottom, surface, psi;
};

MotherProfiles random_profiles(Rng& rng) {
  const double a1 = rng.uniform(0.01, 0.035), a2 = rng.uniform(0.0, 0.02);
  const double p1 = rng.uniform(0.0, 2.0 * kPi), p2 = rng.uniform(0.0, 2.0 * kPi);
  const double c1 = rng.uniform(0.005, 0.02), q1 = rng.uniform(0.0, 2.0 * kPi);
  const double d1 = rng.uniform(0.02, 0.08), d2 = rng.uniform(0.0, 0.04);
  const double r1 = rng.uniform(0.0, 2.0 * kPi), r2 = rng.uniform(0.0, 2.0 * kPi);
  MotherProfiles mp;
  mp.bottom = [=](double x) {
    return -1.0 + a1 * std::sin(kPi * x + p1) + a2 * std::sin(2.0 * kPi * x + p2);
  };
  mp.surface = [=](double x) { return c1 * std::sin(kPi * x + q1); };
  mp.psi = [=](double x) {
    return d1 * std::sin(kPi * x + r1) + d2 * std::sin(2.0 * kPi * x + r2);
  };
  return mp;
}

double bump(double x, double c, double amp, double width = 120.0) {
  return amp * std::exp(-width * (x - c) * (x - c));
}

WindowConfig side_from(const std::function<double(double)>& b,
                       const std::function<double(double)>& z,
                       const std::function<double(double)>& p, int n, int n_sigma,
                       const SolverOptions& solver) {
  Grid1D window{0.0, 1.0, n};
  Grid1D mother{-0.5, 1.5, 2 * n - 1};
  WindowSide ws = window_side(mother, window, ScalarField(mother, b), ScalarField(mother, z),
                              ScalarField(mother, p), 0.5, n_sigma, solver);
  return WindowConfig{ws.domain, ws.psi, ws.theta};
}

}  // namespace

WindowConfig random_window_config(Rng& rng, int n, int n_sigma, const SolverOptions& solver) {
  MotherProfiles mp = random_profiles(rng);
  return side_from(mp.bottom, mp.surface, mp.psi, n, n_sigma, solver);
}

PairConfiguration random_admissible_pair(Rng& rng, int n, int n_sigma,
                                         const SolverOptions& solver, bool wall_gap) {
  MotherProfiles mp = random_profiles(rng);
  const double ab = rng.uniform(-0.05, 0.05);
  const double xc = wall_gap ? 0.0 : rng.uniform(0.35, 0.65);
  const double az = rng.uniform(-0.015, 0.015);
  const double xz = rng.uniform(0.35, 0.65);
  const double ap = rng.uniform(-0.03, 0.03);
  auto b0 = [=](double x) { return mp.bottom(x) + bump(x, xc, ab); };
  auto z0 = [=](double x) { return mp.surface(x) + bump(x, xz, az); };
  auto p0 = [=](double x) { return mp.psi(x) + bump(x, 0.5, ap); };

  WindowConfig a = side_from(mp.bottom, mp.surface, mp.psi, n, n_sigma, solver);
  WindowConfig a0 = side_from(b0, z0, p0, n, n_sigma, solver);
  PairOptions opts;
  opts.n_sigma = n_sigma;
  opts.solver = solver;
  return make_pair(a.domain, a.psi, a.theta, a0.domain, a0.psi, a0.theta, opts);
}

std::vector<CheckResult> convergence_checks(const CheckOptions& opts) {
  const double k = kPi;
  std::vector<double> errs;
  std::ostringstream detail;
  for (int n : opts.convergence_sizes) {
    errs.push_back(manufactured_error(n, k, opts.solver));
    detail << "n=" << n << " err=" << fmt(errs.back()) << " ";
  }
  // least-squares slope of log err against log spacing
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const int m = static_cast<int>(errs.size());
  for (int i = 0; i < m; ++i) {
    const double x = std::log(1.0 / (opts.convergence_sizes[i] - 1));
    const double y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  std::vector<CheckResult> out;
  out.push_back(lower_bound_check("manufactured harmonic convergence order", order, 1.7,
                                  "order " + fmt(order) + " (" + detail.str() + ")"));
  return out;
}

CheckResult dispersion_check(const CheckOptions& opts) {
  const double k = 2.0 * kPi;
  Grid1D g{0.0, 1.0, opts.dispersion_n};
  ScalarField b(g, [](double) { return -1.0; });
  ScalarField z(g, [](double) { return 0.0; });
  FluidDomainSpec dom = build_domain(b, z, 0.5);
  ScalarField psi(g, [=](double x) { return std::cos(k * x); });
  PotentialField phi = solve_potential_periodic(dom, psi, opts.dispersion_n_sigma, opts.solver);
  ScalarField flux = dno(phi);
  const double factor = k * std::tanh(k);
  const double rel = (flux - psi * factor).l2() / (psi * factor).l2();
  return upper_bound_check("flat strip dispersion factor", rel, opts.dispersion_bound,
                           "relative L2 error " + fmt(rel));
}

std::vector<CheckResult> trace_identity_checks(const CheckOptions& opts) {
  Rng rng(opts.seed, "trace-identities");
  double worst = 0.0;
  const double h = 1.0 / (opts.n - 1);
  for (int t = 0; t < opts.n_configs; ++t) {
    WindowConfig c = random_window_config(rng, opts.n, opts.n_sigma, opts.solver);
    PotentialField phi = solve_potential(c.domain, c.psi, c.theta, opts.n_sigma, opts.solver);
    SurfaceTraces own = surface_traces(phi);
    ScalarField flux = dno(phi);
    ScalarField zx = c.domain.surface.derivative();
    ScalarField nrm(flux.grid());
    for (int i = 0; i < nrm.size(); ++i) nrm[i] = flux[i] / std::sqrt(1.0 + zx[i] * zx[i]);
    SurfaceTraces rec = traces_from_measurements(c.psi, c.domain.surface, nrm);
    auto rel = [&](const ScalarField& a, const ScalarField& b) {
      const double scale = std::max(1.0, b.linf());
      return (a - b).linf() / (5.0 * h * h * scale);
    };
    worst = std::max({worst, rel(rec.value, own.value), rel(rec.grad_x, own.grad_x),
                      rel(rec.grad_y, own.grad_y), rel(rec.normal, own.normal)});
  }
  std::vector<CheckResult> out;
  out.push_back(upper_bound_check("surface trace reconstruction", worst, 1.0,
                                  "worst deviation " + fmt(worst) +
                                      " of the 5 h^2 scale allowance"));
  return out;
}

std::vector<CheckResult> conservation_checks(const CheckOptions& opts) {
  Rng rng(opts.seed, "conservation");
  double worst_green = 0.0, worst_flux = 0.0;
  const double h = 1.0 / (opts.n - 1);
  for (int t = 0; t < opts.n_configs; ++t) {
    WindowConfig c = random_window_config(rng, opts.n, opts.n_sigma, opts.solver);
    PotentialField phi = solve_potential(c.domain, c.psi, c.theta, opts.n_sigma, opts.solver);
    const double e = energy(phi);
    ScalarField flux = dno(phi);

    const int nx = phi.nx(), ns = phi.ns();
    const auto& dx = phi.grid_dx();
    auto wall = [&](int i, bool with_value) {
      std::vector<double> fx(ns), v(ns);
      for (int j = 0; j < ns; ++j) {
        fx[j] = dx[static_cast<size_t>(j) * nx + i];
        v[j] = with_value ? phi.u(i, j) : 1.0;
      }
      return wall_integral(phi.map().bottom[i], phi.map().surface[i], fx, v);
    };

    const double green = std::abs(e - (trapz_product(c.psi, flux) + wall(nx - 1, true) -
                                       wall(0, true)));
    const double balance =
        std::abs(flux.trapz() + wall(nx - 1, false) - wall(0, false));
    const double scale = std::max(1.0, e);
    worst_green = std::max(worst_green, green / (10.0 * h * h * scale));
    worst_flux = std::max(worst_flux, balance / (10.0 * h * h * scale));
  }
  std::vector<CheckResult> out;
  out.push_back(upper_bound_check("green identity", worst_green, 1.0,
                                  "worst deviation " + fmt(worst_green) +
                                      " of the 10 h^2 energy allowance"));
  out.push_back(upper_bound_check("boundary flux balance", worst_flux, 1.0,
                                  "worst deviation " + fmt(worst_flux) +
                                      " of the 10 h^2 energy allowance"));
  return out;
}

namespace {

struct EnvelopeTraceNorms {
  double value = 0.0;
  double grad = 0.0;
};

// Difference of the two potentials along the lower surface envelope, in the
// arc metric.
EnvelopeTraceNorms envelope_difference_norms(const PairConfiguration& pair) {
  const Grid1D& g = pair.a.domain.grid();
  ScalarField dv(g), dgx(g), dgy(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.x(i);
    const double y = pair.zeta_under[i];
    dv[i] = pair.a.phi.value_at(x, y) - pair.a0.phi.value_at(x, y);
    dgx[i] = pair.a.phi.dx_at(x, y) - pair.a0.phi.dx_at(x, y);
    dgy[i] = pair.a.phi.dy_at(x, y) - pair.a0.phi.dy_at(x, y);
  }
  EnvelopeTraceNorms out;
  out.value = std::sqrt(graph_integral(pair.zeta_under, dv, dv));
  out.grad = std::sqrt(graph_integral(pair.zeta_under, dgx, dgx) +
                       graph_integral(pair.zeta_under, dgy, dgy));
  return out;
}

void fold_min(double& slot, double margin) { slot = std::min(slot, margin); }

}  // namespace

std::vector<CheckResult> pair_inequality_checks(const CheckOptions& opts) {
  Rng rng(opts.seed, "admissible-pairs");
  const double h = 1.0 / (opts.n - 1);
  const double inf = std::numeric_limits<double>::infinity();
  double m_comparison = inf;
  double m_shift_value = inf, m_shift_gx = inf, m_shift_gy = inf;
  double m_g1x = inf, m_g1y = inf;
  double m_g2 = inf, m_g3 = inf, m_g4 = inf, m_g5 = inf;
  int violated = 0, holds = 0, non_informative = 0;

  for (int t = 0; t < opts.n_pairs; ++t) {
    const bool wall_gap = (t % 5 == 4);  // every fifth pair exercises the wall terms
    PairConfiguration pair = random_admissible_pair(rng, opts.n, opts.n_sigma, opts.solver,
                                                    wall_gap);

    EnergyComparison ec = energy_comparison_sides(pair);
    const double scale = std::max({1.0, std::abs(ec.rhs), std::abs(ec.lhs)});
    fold_min(m_comparison, (ec.rhs - ec.lhs) / (10.0 * h * h * scale));

    ShiftMargins sm = surface_shift_check(pair);
    const double sscale = 10.0 * h * h * std::max(1.0, sm.bound);
    fold_min(m_shift_value, sm.value / sscale);
    fold_min(m_shift_gx, sm.grad_x / sscale);
    fold_min(m_shift_gy, sm.grad_y / sscale);

    G1Result g1r = g1(pair);
    const double root1 = std::sqrt(g1r.g1);
    const double tol1 = 10.0 * h * h * std::max(1.0, root1);
    fold_min(m_g1x, (root1 - (pair.a.traces.grad_x - pair.a0.traces.grad_x).l2()) / tol1);
    fold_min(m_g1y, (root1 - (pair.a.traces.grad_y - pair.a0.traces.grad_y).l2()) / tol1);

    GTerms gt = g2_to_g5(pair);
    const double tol23 = 10.0 * h * h * std::max({1.0, gt.g2, gt.g3});
    fold_min(m_g2, (gt.g2 - std::abs(ec.surface_value_term)) / tol23);
    fold_min(m_g3, (gt.g3 - std::abs(ec.surface_normal_term)) / tol23);

    EnvelopeTraceNorms en = envelope_difference_norms(pair);
    const double tol45 =
        10.0 * h * h * std::max({1.0, std::sqrt(gt.g4), std::sqrt(gt.g5)});
    fold_min(m_g4, (std::sqrt(gt.g4) - en.value) / tol45);
    fold_min(m_g5, (std::sqrt(gt.g5) - en.grad) / tol45);

    if (opts.run_report_scan) {
      CertificateReport rep = stability_report(pair, ConfigConstants{});
      if (rep.verdict == "VIOLATED") ++violated;
      if (rep.verdict == "HOLDS") ++holds;
      if (rep.verdict == "NON_INFORMATIVE") ++non_informative;
    }
  }

  std::vector<CheckResult> out;
  auto margin = [&](const std::string& name, double m) {
    out.push_back(lower_bound_check(name, m, -1.0, "worst margin " + fmt(m) +
                                                       " in units of the tolerance"));
  };
  margin("energy comparison inequality", m_comparison);
  margin("surface shift bound (value)", m_shift_value);
  margin("surface shift bound (grad X)", m_shift_gx);
  margin("surface shift bound (grad y)", m_shift_gy);
  margin("trace difference bound (grad X)", m_g1x);
  margin("trace difference bound (grad y)", m_g1y);
  margin("surface value term bound", m_g2);
  margin("surface normal term bound", m_g3);
  margin("envelope value trace bound", m_g4);
  margin("envelope gradient trace bound", m_g5);
  if (opts.run_report_scan) {
    out.push_back(make_result("no violated verdicts on the randomized suite",
                              static_cast<double>(violated), 0.0, violated == 0,
                              std::to_string(holds) + " holds, " +
                                  std::to_string(non_informative) + " non-informative, " +
                                  std::to_string(violated) + " violated"));
  }
  return out;
}

std::vector<CheckResult> identical_pair_checks(const CheckOptions& opts) {
  auto b = [](double x) { return -1.0 + 0.05 * std::sin(kPi * x); };
  auto z = [](double x) { return 0.02 * std::cos(kPi * x); };
  auto p = [](double x) { return 0.06 * std::sin(kPi * x); };
  WindowConfig a = side_from(b, z, p, opts.n, opts.n_sigma, opts.solver);
  PairOptions po;
  po.n_sigma = opts.n_sigma;
  po.solver = opts.solver;
  PairConfiguration pair = make_pair(a.domain, a.psi, a.theta, a.domain, a.psi, a.theta, po);

  EnergyComparison ec = energy_comparison_sides(pair);
  G1Result g1r = g1(pair);
  GTerms gt = g2_to_g5(pair);
  const double worst =
      std::max({std::abs(ec.lhs), std::abs(ec.rhs), g1r.g1, gt.g2, gt.g3, gt.g4, gt.g5,
                tbot(pair)});
  bool identical_raised = false;
  try {
    (void)tlog(pair, ConfigConstants{}, TlogMode::trace_norms);
  } catch (const IdenticalPair&) {
    identical_raised = true;
  }
  std::vector<CheckResult> out;
  out.push_back(upper_bound_check("identical pair zeros", worst, 1e-12,
                                  "largest term magnitude " + fmt(worst)));
  out.push_back(make_result("identical pair is refused by the log factor",
                            identical_raised ? 1.0 : 0.0, 1.0, identical_raised,
                            identical_raised ? "IdenticalPair raised" : "no exception"));
  return out;
}

std::vector<CheckResult> size_oracle_checks(const CheckOptions& opts) {
  (void)opts;
  std::vector<CheckResult> out;

  // rectangular inter-bottom gap with a unit lateral flow
  Grid1D g{0.0, 1.0, 101};
  std::vector<double> vb(101, -1.0), vb0(101, -1.0);
  for (int i = 35; i <= 65; ++i) vb0[i] = -0.8;
  ScalarField b(g, std::move(vb));
  ScalarField b0(g, std::move(vb0));
  ScalarField z(g, 0.0);
  auto side = [&](const ScalarField& bot) {
    PairSide s;
    s.domain = build_domain(bot, z, 0.5);
    SigmaMap map{bot, z, 49};
    s.phi = PotentialField::from_function(map, [](double x, double) { return x; });
    s.psi = ScalarField(g, [](double x) { return x; });
    s.theta.left.assign(49, 0.0);
    s.theta.right.assign(49, 1.0);
    s.traces = surface_traces(s.phi);
    s.dno = dno(s.phi);
    s.energy = energy(s.phi);
    s.h2 = s.phi.h2_norm();
    return s;
  };
  PairConfiguration pair;
  pair.a = side(b);
  pair.a0 = side(b0);
  pair.h0 = 0.5;
  pair.n_sigma = 49;
  pair.zeta_under = z;
  pair.b_over = pointwise_max(b, b0);
  pair.split = split_surface(z, z);
  pair.decomposition = decompose_interbottom(b, b0);

  const double gap_area = region_area(b, pair.b_over);
  const double gap_energy = energy(pair.a.phi, b, pair.b_over);
  out.push_back(upper_bound_check("rectangular gap energy equals its area",
                                  std::abs(gap_energy - gap_area), 1e-6,
                                  "energy " + fmt(gap_energy) + " area " + fmt(gap_area)));

  CbotReport cb = estimate_cbot(pair);
  const double lhs = cb.defined ? cb.cbot * l1_error(b, b0) : 0.0;
  out.push_back(make_result("covering bound stays below the measured energy", lhs,
                            gap_energy, cb.defined && lhs <= gap_energy * (1.0 + 1e-9),
                            "cbot * l1 = " + fmt(lhs) + " vs energy " + fmt(gap_energy)));

  // square erosion radius closed form
  const double L = 0.4;
  const double px = L / 128.0;
  RasterRegion sq = RasterRegion::rectangle(0.0, L, 0.0, L, px);
  const double expected = (1.0 - 1.0 / std::sqrt(2.0)) * L / 2.0;
  const double observed = sq.half_measure_radius();
  out.push_back(upper_bound_check("square erosion radius closed form",
                                  std::abs(observed - expected), px,
                                  "radius " + fmt(observed) + " vs " + fmt(expected) +
                                      " within one pixel " + fmt(px)));
  return out;
}

std::vector<CheckResult> dynamics_checks(const CheckOptions& opts) {
  std::vector<CheckResult> out;

  // rest state
  {
    Grid1D g{0.0, 1.0, 65};
    ScalarField b(g, [](double x) { return -1.0 + 0.1 * std::sin(2.0 * kPi * x); });
    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = opts.rest_steps * cfg.dt;
    cfg.n_sigma = 33;
    cfg.solver = opts.solver;
    WaveState init{0.0, ScalarField(g), ScalarField(g)};
    Trajectory traj = simulate(init, b, cfg);
    double worst = 0.0;
    for (const auto& s : traj.states) worst = std::max({worst, s.zeta.linf(), s.psi.linf()});
    out.push_back(upper_bound_check("rest state is a fixed point", worst, 1e-12,
                                    "sup drift " + fmt(worst) + " over " +
                                        std::to_string(opts.rest_steps) + " steps"));
  }

  // standing wave: period and mean conservation
  {
    const double k = 2.0 * kPi;
    const double amp = 1e-3;
    Grid1D g{0.0, 1.0, opts.wave_n};
    ScalarField b(g, [](double) { return -1.0; });
    const double omega = std::sqrt(9.81 * k * std::tanh(k));
    const double period = 2.0 * kPi / omega;
    SimConfig cfg;
    cfg.dt = period / 160.0;
    cfg.t_end = 0.9 * period;
    cfg.n_sigma = 33;
    cfg.solver = opts.solver;
    WaveState init{0.0, ScalarField(g, [=](double x) { return amp * std::cos(k * x); }),
                   ScalarField(g)};
    Trajectory traj = simulate(init, b, cfg);

    ScalarField mode(g, [=](double x) { return std::cos(k * x); });
    std::vector<double> flips;
    double prev = trapz_product(traj.states[0].zeta, mode);
    for (size_t i = 1; i < traj.states.size() && flips.size() < 2; ++i) {
      const double cur = trapz_product(traj.states[i].zeta, mode);
      if ((prev > 0.0 && cur <= 0.0) || (prev < 0.0 && cur >= 0.0)) {
        const double frac = prev / (prev - cur);
        flips.push_back(traj.states[i - 1].t + frac * cfg.dt);
      }
      prev = cur;
    }
    double measured = 0.0;
    if (flips.size() == 2) measured = 2.0 * (flips[1] - flips[0]);
    const double rel = flips.size() == 2 ? std::abs(measured - period) / period : 1.0;
    out.push_back(upper_bound_check("standing wave period", rel, opts.period_bound,
                                    "measured " + fmt(measured) + " expected " + fmt(period) +
                                        " rel err " + fmt(rel)));

    const double m0 = traj.states.front().zeta.mean();
    double drift = 0.0;
    for (const auto& s : traj.states) drift = std::max(drift, std::abs(s.zeta.mean() - m0));
    const double per_step = drift / static_cast<double>(traj.states.size());
    out.push_back(upper_bound_check("surface mean drift per step", per_step, 1e-10));
  }

  // temporal order of the integrator
  {
    const double k = 2.0 * kPi;
    Grid1D g{0.0, 1.0, 33};
    ScalarField b(g, [](double) { return -1.0; });
    WaveState init{0.0, ScalarField(g, [=](double x) { return 0.01 * std::cos(k * x); }),
                   ScalarField(g, [=](double x) { return 0.004 * std::sin(k * x); })};
    const double horizon = 0.2;
    auto run = [&](double dt) {
      SimConfig cfg;
      cfg.dt = dt;
      cfg.t_end = horizon;
      cfg.n_sigma = 17;
      cfg.solver = opts.solver;
      return simulate(init, b, cfg).states.back();
    };
    WaveState s1 = run(horizon / 8.0);
    WaveState s2 = run(horizon / 16.0);
    WaveState s3 = run(horizon / 32.0);
    const double d12 = (s1.zeta - s2.zeta).linf() + (s1.psi - s2.psi).linf();
    const double d23 = (s2.zeta - s3.zeta).linf() + (s2.psi - s3.psi).linf();
    const double order = std::log2(d12 / d23);
    out.push_back(lower_bound_check("time integration order", order, 3.5,
                                    "observed order " + fmt(order)));
  }
  return out;
}

namespace {

struct InversionProblem {
  MeasurementTuple tuple;
  LateralTrace theta;
  ScalarField b_true_window;
  Grid1D window{0.0, 1.0, 2};
};

// Full pipeline: periodic mother simulation over a Gaussian bump, measured on
// the unit window at a fixed instant.
// Shallow column: the flux transmission from bottom to surface decays like
// sech(k * depth), so a thin layer keeps the bump modes observable and the
// recovery well determined by the measurement.
InversionProblem bump_problem(int window_n, int n_sigma, const SolverOptions& solver) {
  InversionProblem ip;
  ip.window = Grid1D{0.0, 1.0, window_n};
  Grid1D mother{-0.5, 1.5, 2 * window_n - 1};
  ScalarField b(mother, [](double x) {
    return -0.15 + 0.06 * std::exp(-30.0 * (x - 0.5) * (x - 0.5));
  });
  WaveState init{0.0, ScalarField(mother, [](double x) { return 0.01 * std::cos(kPi * x); }),
                 ScalarField(mother, [](double x) { return 0.05 * std::sin(kPi * x); })};
  SimConfig cfg;
  cfg.dt = 5e-3;
  cfg.t_end = 0.05;
  cfg.n_sigma = n_sigma;
  cfg.solver = solver;
  cfg.depth_floor = 0.05;
  Trajectory traj = simulate(init, b, cfg);
  Measurement m = measure(traj, cfg.t_end, b, ip.window, cfg);
  ip.tuple = m.tuple;
  ip.theta = m.theta;
  ip.b_true_window = restrict_to_window(b, ip.window);
  return ip;
}

}  // namespace

std::vector<CheckResult> gradient_checks(const CheckOptions& opts) {
  // Shallow column with a strong flux response: central differences of the
  // misfit then sit far above rounding noise, so the 1e-4 agreement bound
  // exercises the adjoint itself.
  Grid1D g{0.0, 1.0, opts.n};
  ScalarField b_data(g, [](double x) {
    return -0.15 + 0.06 * std::exp(-30.0 * (x - 0.5) * (x - 0.5));
  });
  ScalarField zeta(g, [](double x) { return 0.02 * std::cos(kPi * x); });
  ScalarField psi(g, [](double x) { return 0.05 * std::sin(kPi * x) + 0.02 * x; });
  LateralTrace theta;
  theta.left.resize(opts.n_sigma);
  theta.right.resize(opts.n_sigma);
  for (int j = 0; j < opts.n_sigma; ++j) {
    const double sj = static_cast<double>(j) / (opts.n_sigma - 1);
    theta.left[j] = 0.03 * sj * sj;
    theta.right[j] = 0.02 - 0.01 * (1.0 - sj);
  }
  FluidDomainSpec dom = build_domain(b_data, zeta, 0.03);
  PotentialField phi = solve_potential(dom, psi, theta, opts.n_sigma, opts.solver);
  MeasurementTuple m;
  m.t0 = 0.0;
  m.b_left = b_data[0];
  m.b_right = b_data[g.n - 1];
  m.zeta = zeta;
  m.psi = psi;
  m.dt_zeta = dno(phi);

  ScalarField b_candidate(g, [](double x) { return -0.15 + 0.01 * std::sin(2.0 * kPi * x); });
  b_candidate[0] = m.b_left;
  b_candidate[g.n - 1] = m.b_right;

  InversionOptions io;
  io.n_sigma = opts.n_sigma;
  io.solver = opts.solver;
  io.alpha_reg = 1e-8;
  io.depth_floor = 0.03;
  io.fd_step = 3e-5;
  ScalarField ga = gradient(b_candidate, m, theta, io);
  ScalarField gf = fd_gradient(b_candidate, m, theta, io);
  const double floor = 1e-3 * std::max(1e-12, gf.linf());
  double worst = 0.0;
  for (int i = 1; i + 1 < g.n; ++i) {
    const double denom = std::max(std::abs(gf[i]), floor);
    worst = std::max(worst, std::abs(ga[i] - gf[i]) / denom);
  }
  std::vector<CheckResult> out;
  out.push_back(upper_bound_check("adjoint gradient against central differences", worst, 1e-4,
                                  "worst relative deviation " + fmt(worst)));
  return out;
}

std::vector<CheckResult> inversion_recovery_checks(const CheckOptions& opts) {
  std::vector<CheckResult> out;
  InversionProblem ip = bump_problem(opts.inversion_n, 33, opts.solver);
  InversionOptions io;
  io.n_sigma = 33;
  io.solver = opts.solver;
  io.alpha_reg = 1e-9;
  io.max_iters = opts.inversion_iters;
  io.grad_tol = 1e-12;
  io.depth_floor = 0.05;

  ScalarField flat(ip.window, -0.15);
  const double mass = l1_error(ip.b_true_window, flat);

  // noiseless recovery
  InversionResult res = invert(ip.tuple, ip.theta, flat, io);
  const double rel = l1_error(res.b_est, ip.b_true_window) / mass;
  out.push_back(upper_bound_check("gaussian bump recovery", rel, opts.recovery_bound,
                                  "relative L1 error " + fmt(rel) + " after " +
                                      std::to_string(res.iterations) + " iterations"));

  // monotone misfit history
  double worst_increase = 0.0;
  for (size_t i = 1; i < res.misfit_history.size(); ++i)
    worst_increase = std::max(worst_increase,
                              res.misfit_history[i] - res.misfit_history[i - 1]);
  out.push_back(upper_bound_check("misfit history is nonincreasing", worst_increase, 0.0));

  // starting at the truth stops immediately
  InversionResult at_truth = invert(ip.tuple, ip.theta, ip.b_true_window, io);
  out.push_back(upper_bound_check("warm start at the truth stays put",
                                  l1_error(at_truth.b_est, ip.b_true_window) / mass, 0.02,
                                  std::to_string(at_truth.iterations) + " iterations, misfit " +
                                      fmt(at_truth.misfit_history.back())));

  // noise sweep
  Rng noise_rng(opts.seed, "measurement-noise");
  const double scale = ip.tuple.dt_zeta.linf();
  std::vector<double> noise_errors;
  for (double delta : {1e-4, 1e-3, 1e-2}) {
    MeasurementTuple noisy = ip.tuple;
    Rng r = noise_rng.split("delta-" + fmt(delta));
    for (int i = 0; i < noisy.dt_zeta.size(); ++i)
      noisy.dt_zeta[i] += delta * scale * r.normal();
    InversionResult nres = invert(noisy, ip.theta, flat, io);
    noise_errors.push_back(l1_error(nres.b_est, ip.b_true_window) / mass);
  }
  bool monotone = noise_errors[0] <= noise_errors[1] * (1.0 + 1e-9) &&
                  noise_errors[1] <= noise_errors[2] * (1.0 + 1e-9);
  out.push_back(make_result("noise sweep error is nondecreasing",
                            noise_errors[2] - noise_errors[0], 0.0, monotone,
                            "errors " + fmt(noise_errors[0]) + ", " + fmt(noise_errors[1]) +
                                ", " + fmt(noise_errors[2])));

  // still water carries no bottom information
  {
    Grid1D g = ip.window;
    MeasurementTuple still;
    still.t0 = 0.0;
    still.b_left = -1.0;
    still.b_right = -1.0;
    still.zeta = ScalarField(g);
    still.psi = ScalarField(g);
    still.dt_zeta = ScalarField(g);
    LateralTrace theta;
    theta.left.assign(33, 0.0);
    theta.right.assign(33, 0.0);
    InversionOptions probe = io;
    probe.alpha_reg = 0.0;
    Rng r(opts.seed, "still-water-candidates");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int t = 0; t < 3; ++t) {
      const double a = r.uniform(-0.1, 0.1), c = r.uniform(0.3, 0.7);
      ScalarField cand(g, [=](double x) {
        return -1.0 + a * std::exp(-40.0 * (x - c) * (x - c));
      });
      const double v = misfit(cand, still, theta, probe);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    out.push_back(upper_bound_check("still water misfit is flat", hi - lo, 1e-18,
                                    "misfit spread " + fmt(hi - lo)));
  }
  return out;
}

std::vector<CheckResult> sweep_trend_checks(const CheckOptions& opts) {
  auto b = [](double x) { return -1.0 + 0.03 * std::sin(kPi * x); };
  auto z = [](double x) { return 0.02 * std::cos(kPi * x); };
  auto p = [](double x) { return 0.06 * std::sin(kPi * x); };
  auto gap = [](double x) { return 0.05 * std::exp(-120.0 * (x - 0.5) * (x - 0.5)); };

  std::vector<double> epsilons = {0.8, 0.4, 0.2, 0.1, 0.05};
  std::vector<double> rhs_values;
  bool verdicts_ok = true;
  std::ostringstream detail;
  for (double eps : epsilons) {
    auto b0 = [&](double x) { return b(x) + eps * gap(x); };
    WindowConfig a = side_from(b, z, p, opts.n, opts.n_sigma, opts.solver);
    WindowConfig a0 = side_from(b0, z, p, opts.n, opts.n_sigma, opts.solver);
    PairOptions po;
    po.n_sigma = opts.n_sigma;
    po.solver = opts.solver;
    PairConfiguration pair = make_pair(a.domain, a.psi, a.theta, a0.domain, a0.psi, a0.theta, po);
    CertificateReport rep = stability_report(pair, ConfigConstants{});
    rhs_values.push_back(rep.terms.final_rhs);
    if (rep.verdict == "VIOLATED") verdicts_ok = false;
    detail << "eps=" << fmt(eps) << " rhs=" << fmt(rep.terms.final_rhs) << " " << rep.verdict
           << "; ";
  }
  double worst_increase = -std::numeric_limits<double>::infinity();
  bool finite = true;
  for (size_t i = 0; i + 1 < rhs_values.size(); ++i) {
    if (!std::isfinite(rhs_values[i]) || !std::isfinite(rhs_values[i + 1])) finite = false;
    worst_increase = std::max(worst_increase, rhs_values[i + 1] - rhs_values[i]);
  }
  std::vector<CheckResult> out;
  out.push_back(make_result("sweep bound decreases with the pair difference",
                            worst_increase, 0.0, finite && worst_increase <= 1e-12,
                            detail.str()));
  out.push_back(make_result("sweep verdicts stay informative or hold",
                            verdicts_ok ? 1.0 : 0.0, 1.0, verdicts_ok, detail.str()));
  return out;
}

std::vector<CheckResult> verify_suite(const CheckOptions& opts) {
  std::vector<CheckResult> all;
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& r : v) all.push_back(std::move(r));
  };
  append(convergence_checks(opts));
  all.push_back(dispersion_check(opts));
  append(trace_identity_checks(opts));
  append(conservation_checks(opts));
  append(pair_inequality_checks(opts));
  append(identical_pair_checks(opts));
  append(size_oracle_checks(opts));
  append(gradient_checks(opts));
  return all;
}

std::string format_check_line(const CheckResult& r) {
  std::string line = r.pass ? "PASS  " : "FAIL  ";
  line += r.name;
  if (!r.detail.empty()) line += "  [" + r.detail + "]";
  return line;
}

}  // namespace seabed::cli
