#include "seabed/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seabed/errors.hpp"

namespace seabed {
namespace {

constexpr double kEuler = 2.718281828459045;

double sq(double v) { return v * v; }

// Samples a point-evaluation of the potential along a curve; `mask` limits
// the work (and the domain requirements) to the selected nodes.
ScalarField on_curve(const PotentialField& phi, const ScalarField& curve,
                     const std::function<double(const PotentialField&, double, double)>& eval,
                     const std::vector<std::uint8_t>* mask = nullptr) {
  const Grid1D& g = curve.grid();
  ScalarField out(g);
  for (int i = 0; i < g.n; ++i) {
    if (mask && !(*mask)[static_cast<size_t>(i)]) continue;
    out[i] = eval(phi, g.x(i), curve[i]);
  }
  return out;
}

double val_at(const PotentialField& p, double x, double y) { return p.value_at(x, y); }
double dx_at(const PotentialField& p, double x, double y) { return p.dx_at(x, y); }
double dy_at(const PotentialField& p, double x, double y) { return p.dy_at(x, y); }

// Outward flux density through the graph of `curve` as a lower boundary of
// the region above it: (c' phi_x - phi_y) dX, the surface measure absorbed.
ScalarField lower_flux(const PotentialField& phi, const ScalarField& curve) {
  const ScalarField cp = curve.derivative();
  const ScalarField fx = on_curve(phi, curve, dx_at);
  const ScalarField fy = on_curve(phi, curve, dy_at);
  ScalarField out(curve.grid());
  for (int i = 0; i < curve.size(); ++i) out[i] = cp[i] * fx[i] - fy[i];
  return out;
}

// Outward flux density through the graph of `curve` as an upper boundary:
// (-c' phi_x + phi_y) dX.
ScalarField upper_flux(const PotentialField& phi, const ScalarField& curve) {
  ScalarField out = lower_flux(phi, curve);
  out *= -1.0;
  return out;
}

// Uniform vertical sample of a point evaluation on the wall x = a.
std::vector<double> wall_samples(const PotentialField& phi, double a, double y0, double y1, int k,
                                 const std::function<double(const PotentialField&, double, double)>& eval) {
  std::vector<double> out(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double y = y0 + (y1 - y0) * j / (k - 1);
    out[static_cast<size_t>(j)] = eval(phi, a, y);
  }
  return out;
}

struct WallPair {
  double a1, a2;      // wall abscissas
  double lo1, hi1;    // segment on the left wall
  double lo2, hi2;    // segment on the right wall
};

// \int f g over both wall segments.
double walls_integral(const PotentialField& phi, const WallPair& w, int k,
                      const std::function<double(const PotentialField&, double, double)>& f,
                      const std::function<double(const PotentialField&, double, double)>& g) {
  double s = 0.0;
  if (w.hi1 > w.lo1)
    s += wall_integral(w.lo1, w.hi1, wall_samples(phi, w.a1, w.lo1, w.hi1, k, f),
                       wall_samples(phi, w.a1, w.lo1, w.hi1, k, g));
  if (w.hi2 > w.lo2)
    s += wall_integral(w.lo2, w.hi2, wall_samples(phi, w.a2, w.lo2, w.hi2, k, f),
                       wall_samples(phi, w.a2, w.lo2, w.hi2, k, g));
  return s;
}

double wall_sup(const PotentialField& phi, const WallPair& w, int k) {
  double m = 0.0;
  for (int j = 0; j < k; ++j) {
    if (w.hi1 > w.lo1) {
      const double y = w.lo1 + (w.hi1 - w.lo1) * j / (k - 1);
      m = std::max(m, std::abs(phi.value_at(w.a1, y)));
    }
    if (w.hi2 > w.lo2) {
      const double y = w.lo2 + (w.hi2 - w.lo2) * j / (k - 1);
      m = std::max(m, std::abs(phi.value_at(w.a2, y)));
    }
  }
  return m;
}

int wall_sample_count(const PairConfiguration& pair) { return std::max(pair.n_sigma, 33); }

// H2 norm of phi - phi0 over the envelope strip between b_over and
// zeta_under, by trapezoid quadrature on a fresh sigma lattice.
double h2_difference(const PairConfiguration& pair) {
  const Grid1D& g = pair.zeta_under.grid();
  const int ns = std::max(pair.n_sigma, 9);
  const double ds = 1.0 / (ns - 1);
  double total = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const double wx = pair.zeta_under.weight(i);
    const double lo = pair.b_over[i];
    const double height = pair.zeta_under[i] - lo;
    const double x = g.x(i);
    double col = 0.0;
    for (int j = 0; j < ns; ++j) {
      const double ws = (j == 0 || j == ns - 1) ? 0.5 * ds : ds;
      const double y = lo + height * j * ds;
      const double dv = pair.a.phi.value_at(x, y) - pair.a0.phi.value_at(x, y);
      const double dgx = pair.a.phi.dx_at(x, y) - pair.a0.phi.dx_at(x, y);
      const double dgy = pair.a.phi.dy_at(x, y) - pair.a0.phi.dy_at(x, y);
      const double dxx = pair.a.phi.dxx_at(x, y) - pair.a0.phi.dxx_at(x, y);
      const double dxy = pair.a.phi.dxy_at(x, y) - pair.a0.phi.dxy_at(x, y);
      const double dyy = pair.a.phi.dyy_at(x, y) - pair.a0.phi.dyy_at(x, y);
      col += ws * (sq(dv) + sq(dgx) + sq(dgy) + sq(dxx) + 2.0 * sq(dxy) + sq(dyy));
    }
    total += wx * height * col;
  }
  return std::sqrt(std::max(0.0, total));
}

WallPair envelope_walls(const PairConfiguration& pair) {
  const Grid1D& g = pair.zeta_under.grid();
  const int last = g.n - 1;
  return WallPair{g.a1, g.a2, pair.b_over[0], pair.zeta_under[0], pair.b_over[last],
                  pair.zeta_under[last]};
}

// Norm of the wall-normal derivative over the envelope wall segments.
double wall_dn_norm(const PairConfiguration& pair, const PotentialField& phi) {
  const WallPair w = envelope_walls(pair);
  return std::sqrt(std::max(0.0, walls_integral(phi, w, wall_sample_count(pair), dx_at, dx_at)));
}

// L2 norm of phi0 over the whole envelope boundary: both graphs with the
// arc-length metric plus the wall segments.
double envelope_boundary_norm(const PairConfiguration& pair) {
  const PotentialField& p0 = pair.a0.phi;
  const ScalarField top = on_curve(p0, pair.zeta_under, val_at);
  const ScalarField bot = on_curve(p0, pair.b_over, val_at);
  double s = graph_integral(pair.zeta_under, top, top) + graph_integral(pair.b_over, bot, bot);
  s += walls_integral(p0, envelope_walls(pair), wall_sample_count(pair), val_at, val_at);
  return std::sqrt(std::max(0.0, s));
}

// Trace norms of the difference on the envelope surface: value norm plus
// full-gradient norm, both with the arc-length metric.
double trace_denominator(const PairConfiguration& pair) {
  const ScalarField& c = pair.zeta_under;
  ScalarField dv = on_curve(pair.a.phi, c, val_at) - on_curve(pair.a0.phi, c, val_at);
  ScalarField dgx = on_curve(pair.a.phi, c, dx_at) - on_curve(pair.a0.phi, c, dx_at);
  ScalarField dgy = on_curve(pair.a.phi, c, dy_at) - on_curve(pair.a0.phi, c, dy_at);
  const double value = std::sqrt(std::max(0.0, graph_integral(c, dv, dv)));
  const double grad =
      std::sqrt(std::max(0.0, graph_integral(c, dgx, dgx) + graph_integral(c, dgy, dgy)));
  return value + grad;
}

TlogResult evaluate_tlog(const PairConfiguration& pair, const ConfigConstants& cc, TlogMode mode,
                         const GTerms* precomputed) {
  validate_constants(cc);
  TlogResult r;
  r.h2_diff = h2_difference(pair);
  const double floor = 1e-12 * std::max({1.0, pair.a.h2, pair.a0.h2});
  if (r.h2_diff <= floor)
    throw IdenticalPair("potentials coincide up to the floor; the log estimate needs a nonzero difference");
  if (mode == TlogMode::trace_norms) {
    r.denominator = trace_denominator(pair);
  } else {
    GTerms gt = precomputed ? *precomputed : g2_to_g5(pair);
    r.denominator = std::sqrt(std::max(0.0, gt.g4)) + std::sqrt(std::max(0.0, gt.g5));
  }
  r.ratio = r.denominator > 0.0 ? r.h2_diff / r.denominator
                                : std::numeric_limits<double>::infinity();
  const bool small_enough = r.denominator <= r.h2_diff / (2.0 * cc.small_c);
  if (r.ratio <= kEuler) {
    r.status = TlogResult::Status::non_informative;
    r.value = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  const double lnln = std::log(std::log(r.ratio));
  const double dn_wall = wall_dn_norm(pair, pair.a.phi);
  const double bnd0 = envelope_boundary_norm(pair);
  r.value = cc.big_c * dn_wall * r.h2_diff * std::pow(lnln, -cc.s / 2.0) +
            3.0 * cc.big_c * bnd0 * r.h2_diff * std::pow(lnln, -cc.s * cc.s / 2.0);
  r.status = small_enough ? TlogResult::Status::value : TlogResult::Status::smallness_violated;
  return r;
}

// Distance from a point to the boundary polylines of the solved strip.
double strip_boundary_distance(const PotentialField& phi, double x, double y) {
  const SigmaMap& m = phi.map();
  const Grid1D& g = m.grid();
  auto seg = [&](double x1, double y1, double x2, double y2) {
    const double dx = x2 - x1, dy = y2 - y1;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((x - x1) * dx + (y - y1) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::hypot(x - (x1 + t * dx), y - (y1 + t * dy));
  };
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < g.n; ++i) {
    d = std::min(d, seg(g.x(i), m.bottom[i], g.x(i + 1), m.bottom[i + 1]));
    d = std::min(d, seg(g.x(i), m.surface[i], g.x(i + 1), m.surface[i + 1]));
  }
  d = std::min(d, seg(g.a1, m.bottom[0], g.a1, m.surface[0]));
  d = std::min(d, seg(g.a2, m.bottom[g.n - 1], g.a2, m.surface[g.n - 1]));
  return d;
}

double ball_energy(const PotentialField& phi, double cx, double cy, double rho) {
  const int nr = 64, nt = 128;
  const double dr = rho / nr;
  const double dt = 2.0 * M_PI / nt;
  double s = 0.0;
  for (int ir = 0; ir < nr; ++ir) {
    const double r = (ir + 0.5) * dr;
    double ring = 0.0;
    for (int it = 0; it < nt; ++it) {
      const double th = (it + 0.5) * dt;
      const double x = cx + r * std::cos(th);
      const double y = cy + r * std::sin(th);
      ring += sq(phi.dx_at(x, y)) + sq(phi.dy_at(x, y));
    }
    s += ring * r * dr * dt;
  }
  return s;
}

std::string status_name(TlogResult::Status s) {
  switch (s) {
    case TlogResult::Status::value: return "value";
    case TlogResult::Status::non_informative: return "non_informative";
    default: return "smallness_violated";
  }
}

}  // namespace

void validate_constants(const ConfigConstants& cc) {
  if (!(cc.s > 0.0 && cc.s < 0.5))
    throw ConfigError("constant s must lie in (0, 1/2)");
  if (!(cc.small_c > kEuler))
    throw ConfigError("constant c must exceed e");
  if (!(cc.big_c > 0.0))
    throw ConfigError("constant C must be positive");
}

PairConfiguration make_pair(const FluidDomainSpec& dom, const ScalarField& psi,
                            const LateralTrace& theta, const FluidDomainSpec& dom0,
                            const ScalarField& psi0, const LateralTrace& theta0,
                            const PairOptions& opts) {
  require_same_grid(dom.grid(), dom0.grid(), "make_pair");
  require_same_grid(dom.grid(), psi.grid(), "make_pair");
  require_same_grid(dom.grid(), psi0.grid(), "make_pair");
  PairConfiguration pair;
  pair.h0 = std::min(dom.h0, dom0.h0);
  pair.n_sigma = opts.n_sigma;

  const ScalarField dz = dom.surface - dom0.surface;
  if (pointwise_abs(dz).max() > pair.h0 / 2.0 + 1e-12 * std::max(1.0, pair.h0)) {
    std::ostringstream msg;
    msg << "surface gap " << pointwise_abs(dz).max() << " exceeds half the depth floor "
        << pair.h0 / 2.0;
    throw PairIncompatible(msg.str());
  }

  auto solve_side = [&](const FluidDomainSpec& d, const ScalarField& p, const LateralTrace& th) {
    PairSide side;
    side.domain = d;
    side.psi = p;
    side.theta = th;
    side.phi = solve_potential(d, p, th, opts.n_sigma, opts.solver);
    side.traces = surface_traces(side.phi);
    side.dno = dno(side.phi);
    side.energy = energy(side.phi);
    side.h2 = side.phi.h2_norm();
    return side;
  };
  pair.a = solve_side(dom, psi, theta);
  pair.a0 = solve_side(dom0, psi0, theta0);

  pair.zeta_under = pointwise_min(dom.surface, dom0.surface);
  pair.b_over = pointwise_max(dom.bottom, dom0.bottom);
  const ScalarField gap = pair.zeta_under - pair.b_over;
  if (gap.min() < pair.h0 / 2.0 - 1e-12 * std::max(1.0, pair.h0))
    throw PairIncompatible("envelope strip thinner than half the depth floor");
  pair.split = split_surface(dom.surface, dom0.surface);
  pair.decomposition = decompose_interbottom(dom.bottom, dom0.bottom, opts.decomposition);
  return pair;
}

EnergyComparison energy_comparison_sides(const PairConfiguration& pair) {
  EnergyComparison ec;
  const ScalarField& zu = pair.zeta_under;
  const ScalarField& bo = pair.b_over;
  const ScalarField& b = pair.a.domain.bottom;
  const ScalarField& b0 = pair.a0.domain.bottom;
  const PotentialField& phi = pair.a.phi;
  const PotentialField& phi0 = pair.a0.phi;
  const int k = wall_sample_count(pair);

  ec.lhs = energy(phi0, b0, bo) + energy(phi, b, bo);

  // Envelope-surface terms, flux form with the metric absorbed.
  const ScalarField flux_a = upper_flux(phi, zu);
  const ScalarField flux_a0 = upper_flux(phi0, zu);
  const ScalarField va = on_curve(phi, zu, val_at);
  const ScalarField va0 = on_curve(phi0, zu, val_at);
  ec.surface_value_term = trapz_product(flux_a, va - va0);
  ec.surface_normal_term = trapz_product(va0, flux_a0 - flux_a);

  // Wall terms between b_over and zeta_under. The left outward normal flips
  // the sign of the x-derivative.
  const WallPair wu = envelope_walls(pair);
  auto wall_term = [&](const PotentialField& fsrc, const PotentialField& gsrc, double sgn_left,
                       const WallPair& w,
                       const std::function<double(const PotentialField&, double, double)>& fe,
                       const std::function<double(const PotentialField&, double, double)>& ge) {
    double s = 0.0;
    if (w.hi1 > w.lo1)
      s += sgn_left * wall_integral(w.lo1, w.hi1, wall_samples(fsrc, w.a1, w.lo1, w.hi1, k, fe),
                                    wall_samples(gsrc, w.a1, w.lo1, w.hi1, k, ge));
    if (w.hi2 > w.lo2)
      s -= sgn_left * wall_integral(w.lo2, w.hi2, wall_samples(fsrc, w.a2, w.lo2, w.hi2, k, fe),
                                    wall_samples(gsrc, w.a2, w.lo2, w.hi2, k, ge));
    return s;
  };

  // T3: dn(phi) (phi - phi0) on the envelope walls.
  auto diff_val = [&](const PotentialField&, double x, double y) {
    return phi.value_at(x, y) - phi0.value_at(x, y);
  };
  auto diff_dx = [&](const PotentialField&, double x, double y) {
    return phi.dx_at(x, y) - phi0.dx_at(x, y);
  };
  const double t3 = wall_term(phi, phi, -1.0, wu, dx_at, diff_val);
  // T4: phi0 (dn(phi0) - dn(phi)) = phi0 * (-(phi0_x - phi_x)) on the left.
  const double t4 = wall_term(phi0, phi0, +1.0, wu, diff_dx, val_at);
  ec.j1 = t3 + t4;

  // T5/T6: own-potential wall terms between each bottom and the envelope.
  const int last = zu.grid().n - 1;
  const WallPair wb{zu.grid().a1, zu.grid().a2, b[0], bo[0], b[last], bo[last]};
  const WallPair wb0{zu.grid().a1, zu.grid().a2, b0[0], bo[0], b0[last], bo[last]};
  const double t5 = wall_term(phi, phi, -1.0, wb, dx_at, val_at);
  const double t6 = wall_term(phi0, phi0, -1.0, wb0, dx_at, val_at);
  ec.j2 = t5 + t6;

  // T7: exchange flux through the bottom envelope. Where the envelope rides
  // on this side's own bottom the impermeability condition holds exactly, so
  // the integrand is pinned to zero there.
  ScalarField flux_b = lower_flux(phi, bo);
  const double tau = pair.decomposition.tau;
  for (int i = 0; i < flux_b.size(); ++i)
    if (bo[i] - b[i] <= tau) flux_b[i] = 0.0;
  const ScalarField v0b = on_curve(phi0, bo, val_at);
  ec.j3 = -2.0 * trapz_product(flux_b, v0b);

  ec.rhs = ec.surface_value_term + ec.surface_normal_term + ec.j1 + ec.j2 + ec.j3;
  return ec;
}

double tbot(const PairConfiguration& pair) {
  const Grid1D& g = pair.zeta_under.grid();
  const int last = g.n - 1;
  const int k = wall_sample_count(pair);
  const ScalarField& b = pair.a.domain.bottom;
  const ScalarField& b0 = pair.a0.domain.bottom;
  const ScalarField& bo = pair.b_over;

  const WallPair seg{g.a1, g.a2, b[0], bo[0], b[last], bo[last]};
  const WallPair seg0{g.a1, g.a2, b0[0], bo[0], b0[last], bo[last]};
  const WallPair full{g.a1, g.a2, b[0], pair.zeta_under[0], b[last], pair.zeta_under[last]};
  const WallPair full0{g.a1, g.a2, b0[0], pair.zeta_under[0], b0[last], pair.zeta_under[last]};

  const double n1 = std::sqrt(std::max(0.0, walls_integral(pair.a.phi, seg, k, dx_at, dx_at)));
  const double n2 = std::sqrt(std::max(0.0, walls_integral(pair.a0.phi, seg0, k, dx_at, dx_at)));
  const double m1 = wall_sup(pair.a.phi, full, k);
  const double m2 = wall_sup(pair.a0.phi, full0, k);

  const double edge_gap = std::max(bo[0] - b[0], bo[last] - b[last]);
  const double measure = boundary_counting_measure(g);
  return (n1 * m1 + n2 * m2) * std::sqrt(std::max(0.0, measure * edge_gap));
}

TlogResult tlog(const PairConfiguration& pair, const ConfigConstants& cc, TlogMode mode) {
  TlogResult r = evaluate_tlog(pair, cc, mode, nullptr);
  if (r.status == TlogResult::Status::smallness_violated) {
    std::ostringstream msg;
    msg << "denominator " << r.denominator << " exceeds h2 difference " << r.h2_diff
        << " over 2c = " << 2.0 * cc.small_c;
    throw SmallnessViolated(msg.str());
  }
  return r;
}

G1Result g1(const PairConfiguration& pair) {
  G1Result r;
  const ScalarField dpsi_grad = pair.a.psi.derivative() - pair.a0.psi.derivative();
  const ScalarField dn_diff = pair.a.traces.normal - pair.a0.traces.normal;
  const ScalarField zeta_grad = pair.a.domain.surface.derivative();
  const ScalarField zeta0_grad = pair.a0.domain.surface.derivative();
  const ScalarField dzeta_grad = zeta0_grad - zeta_grad;

  ScalarField z3(pair.a.psi.grid());
  const ScalarField psi0_grad = pair.a0.psi.derivative();
  for (int i = 0; i < z3.size(); ++i)
    z3[i] = std::abs(pair.a0.traces.normal[i]) + std::abs(psi0_grad[i]) +
            (1.0 + std::abs(zeta0_grad[i])) * std::abs(pair.a0.traces.grad_y[i]);

  const double dg = sq(dpsi_grad.l2());
  r.ghat1 = 3.0 * dg + 3.0 * sq(dn_diff.l2()) + 3.0 * sq(z3.l2()) * sq(dzeta_grad.linf());
  r.gtilde1 = 3.0 * dg + 3.0 * sq(zeta0_grad.linf()) * r.ghat1 +
              3.0 * sq(pair.a.traces.grad_y.l2()) * sq(dzeta_grad.linf());
  r.g1 = std::max(r.ghat1, r.gtilde1);
  r.z3 = z3;
  return r;
}

GTerms g2_to_g5(const PairConfiguration& pair) {
  GTerms t;
  const Grid1D& g = pair.zeta_under.grid();
  const ScalarField& zeta = pair.a.domain.surface;
  const ScalarField& zeta0 = pair.a0.domain.surface;
  const ScalarField zeta_grad = zeta.derivative();
  const ScalarField zeta0_grad = zeta0.derivative();
  const auto& s1 = pair.split.s1;
  const auto& s2 = pair.split.s2;

  // Cross traces, evaluated only on the side of the split where the target
  // curve stays inside the source strip.
  ScalarField z4(g), dn_on_zeta0(g);
  for (int i = 0; i < g.n; ++i) {
    if (!s1[static_cast<size_t>(i)]) continue;
    const double x = g.x(i);
    const double fx = pair.a.phi.dx_at(x, zeta0[i]);
    const double fy = pair.a.phi.dy_at(x, zeta0[i]);
    z4[i] = -zeta0_grad[i] * fx + fy;
    dn_on_zeta0[i] = z4[i] / std::sqrt(1.0 + sq(zeta0_grad[i]));
  }
  ScalarField phi0_on_zeta(g), phi0_dx_on_zeta(g);
  for (int i = 0; i < g.n; ++i) {
    if (!s2[static_cast<size_t>(i)]) continue;
    const double x = g.x(i);
    phi0_on_zeta[i] = pair.a0.phi.value_at(x, zeta[i]);
    phi0_dx_on_zeta[i] = pair.a0.phi.dx_at(x, zeta[i]);
  }

  t.z4_norm = std::sqrt(masked_l2_sq(z4, s1));
  t.z5_norm = pair.a.dno.l2();
  for (int i = 0; i < g.n; ++i)
    t.z7 = std::max({t.z7, std::sqrt(1.0 + sq(zeta_grad[i])), std::sqrt(1.0 + sq(zeta0_grad[i]))});

  const double h2a = pair.a.h2;
  const double h2a0 = pair.a0.h2;
  const double dz_inf = pointwise_abs(zeta - zeta0).max();
  const double dzg_inf = pointwise_abs(zeta_grad - zeta0_grad).max();
  const double dpsi_l2 = (pair.a.psi - pair.a0.psi).l2();
  const double dn_diff_l2 = (pair.a.traces.normal - pair.a0.traces.normal).l2();

  const double phi0z0_l2 = pair.a0.traces.value.l2();
  ScalarField phi0z0_zgrad(g), phi0z_zgrad(g);
  for (int i = 0; i < g.n; ++i) {
    phi0z0_zgrad[i] = pair.a0.traces.value[i] * zeta0_grad[i];
    phi0z_zgrad[i] = phi0_on_zeta[i] * zeta0_grad[i];
  }
  const double phi0z_s2 = std::sqrt(masked_l2_sq(phi0_on_zeta, s2));
  const double phi0z_grad_s2 = std::sqrt(masked_l2_sq(phi0z_zgrad, s2));
  const double phi0dx_s2 = std::sqrt(masked_l2_sq(phi0_dx_on_zeta, s2));
  const double dn_cross_s1 = std::sqrt(masked_l2_sq(dn_on_zeta0, s1));

  t.z6 = phi0z_s2 * (phi0dx_s2 + pair.a0.traces.normal.l2()) +
         phi0z0_l2 * (pair.a.traces.grad_x.l2() + dn_cross_s1);

  t.g2 = (t.z4_norm * h2a + t.z5_norm * h2a0) * std::sqrt(dz_inf) +
         (t.z4_norm + t.z5_norm) * dpsi_l2;
  t.g3 = t.z7 * (phi0z0_l2 + phi0z_s2) * dn_diff_l2 +
         t.z7 *
             ((phi0z0_l2 + phi0z0_zgrad.l2()) * h2a + (phi0z_s2 + phi0z_grad_s2) * h2a0) *
             std::sqrt(dz_inf) +
         t.z7 * t.z6 * dzg_inf;
  t.g4 = t.z7 * (4.0 * sq(dpsi_l2) + 2.0 * (sq(h2a) + sq(h2a0)) * dz_inf);
  t.g5 = 4.0 * t.z7 * (sq(h2a) + sq(h2a0)) * dz_inf + 8.0 * t.z7 * g1(pair).g1;
  return t;
}

ShiftMargins surface_shift_check(const PairConfiguration& pair) {
  ShiftMargins m;
  const Grid1D& g = pair.zeta_under.grid();
  const ScalarField& zeta0 = pair.a0.domain.surface;
  const auto& s1 = pair.split.s1;
  const ScalarField dz = pair.a.domain.surface - pair.a0.domain.surface;
  m.bound = std::sqrt(pointwise_abs(dz).max()) * pair.a.h2;

  ScalarField dval(g), dgx(g), dgy(g);
  for (int i = 0; i < g.n; ++i) {
    if (!s1[static_cast<size_t>(i)]) continue;
    const double x = g.x(i);
    dval[i] = pair.a.psi[i] - pair.a.phi.value_at(x, zeta0[i]);
    dgx[i] = pair.a.traces.grad_x[i] - pair.a.phi.dx_at(x, zeta0[i]);
    dgy[i] = pair.a.traces.grad_y[i] - pair.a.phi.dy_at(x, zeta0[i]);
  }
  m.value = m.bound - std::sqrt(masked_l2_sq(dval, s1));
  m.grad_x = m.bound - std::sqrt(masked_l2_sq(dgx, s1));
  m.grad_y = m.bound - std::sqrt(masked_l2_sq(dgy, s1));
  return m;
}

double estimate_crho(const PotentialField& phi, double rho,
                     const std::vector<std::pair<double, double>>& points) {
  if (!(rho > 0.0)) throw ConfigError("estimate_crho needs a positive radius");
  if (points.empty()) throw ConfigError("estimate_crho needs at least one sample point");
  const double total = energy(phi);
  double scale = 1.0;
  for (double v : phi.values()) scale = std::max(scale, v * v);
  if (total <= 1e-28 * scale)
    throw ZeroEnergy("potential carries no Dirichlet energy; the ratio is undefined");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [x, y] : points) {
    const double d = strip_boundary_distance(phi, x, y);
    if (d <= 4.0 * rho) {
      std::ostringstream msg;
      msg << "sample point (" << x << ", " << y << ") sits " << d
          << " from the boundary, needs more than " << 4.0 * rho;
      throw PointTooNearBoundary(msg.str());
    }
    best = std::min(best, ball_energy(phi, x, y, rho) / total);
  }
  return best;
}

CbotReport estimate_cbot(const PairConfiguration& pair) {
  CbotReport report;
  const ScalarField& b = pair.a.domain.bottom;
  const ScalarField& b0 = pair.a0.domain.bottom;
  const double spacing = b.grid().spacing();
  const int refine =
      std::max(1, static_cast<int>(std::llround(spacing / pair.decomposition.raster_pixel)));

  for (const Component& comp : pair.decomposition.components) {
    ComponentCovering cov;
    cov.i_begin = comp.i_begin;
    cov.i_end = comp.i_end;
    cov.sign = comp.sign;
    cov.rho = comp.rho;
    cov.area = comp.area;
    if (!comp.fat) {
      report.components.push_back(cov);
      continue;
    }
    // The gap between the bottoms lies inside the domain of the potential
    // whose own bottom sits below it.
    const PotentialField& field = comp.sign > 0 ? pair.a0.phi : pair.a.phi;

    const RasterRegion raster = component_raster(b, b0, comp, refine);
    const std::vector<double>& dist = raster.boundary_distance();
    cov.eroded_area = raster.eroded_area(comp.rho);
    const double eps = comp.rho / 2.0;
    cov.square_side = eps;
    const double px = raster.pixel();
    const double ox = raster.cx(0) - 0.5 * px;
    const double oy = raster.cy(0) - 0.5 * px;

    struct SquareInfo {
      double best_dist = -1.0;
      double bx = 0.0, by = 0.0;
    };
    std::map<std::pair<int, int>, SquareInfo> squares;
    for (int j = 0; j < raster.ny(); ++j) {
      for (int i = 0; i < raster.nx(); ++i) {
        const double d = dist[static_cast<size_t>(j) * raster.nx() + i];
        if (d <= comp.rho) continue;
        // The raster transform can overestimate by a fraction of a pixel, so
        // the ball-ratio precondition is enforced against the exact polyline
        // distance of the strip the ball will live in.
        if (strip_boundary_distance(field, raster.cx(i), raster.cy(j)) <=
            comp.rho * (1.0 + 1e-9))
          continue;
        const int kx = static_cast<int>(std::floor((raster.cx(i) - ox) / eps));
        const int ky = static_cast<int>(std::floor((raster.cy(j) - oy) / eps));
        SquareInfo& info = squares[{kx, ky}];
        if (d > info.best_dist) {
          info.best_dist = d;
          info.bx = raster.cx(i);
          info.by = raster.cy(j);
        }
      }
    }
    cov.n_squares = static_cast<int>(squares.size());
    if (squares.empty()) {
      report.components.push_back(cov);
      continue;
    }

    const int m = std::clamp(static_cast<int>(std::ceil(eps / px)), 2, 8);
    double best_energy = std::numeric_limits<double>::infinity();
    SquareInfo best_info;
    for (const auto& [key, info] : squares) {
      const double qx = ox + key.first * eps;
      const double qy = oy + key.second * eps;
      double e = 0.0;
      const double cell = eps / m;
      for (int jj = 0; jj < m; ++jj)
        for (int ii = 0; ii < m; ++ii) {
          const double x = qx + (ii + 0.5) * cell;
          const double y = qy + (jj + 0.5) * cell;
          e += sq(field.dx_at(x, y)) + sq(field.dy_at(x, y));
        }
      e *= cell * cell;
      if (e < best_energy) {
        best_energy = e;
        best_info = info;
      }
    }
    cov.min_square_energy = best_energy;
    cov.sample_x = best_info.bx;
    cov.sample_y = best_info.by;
    cov.crho = estimate_crho(field, comp.rho / 4.0, {{best_info.bx, best_info.by}});
    cov.c_tilde = 2.0 * cov.crho / sq(comp.rho);
    cov.used = true;
    report.components.push_back(cov);
  }

  for (int sgn : {+1, -1}) {
    double cmin = std::numeric_limits<double>::infinity();
    double cmax = 0.0;
    int used = 0;
    for (const ComponentCovering& cov : report.components) {
      if (!cov.used || cov.sign != sgn) continue;
      cmin = std::min(cmin, cov.c_tilde);
      cmax = std::max(cmax, cov.c_tilde);
      ++used;
    }
    if (used == 0) continue;
    SideConstruction side;
    side.sign = sgn;
    side.n_used = used;
    side.case_label = (cmax <= 1e3 * cmin) ? 1 : 2;
    side.constant = side.case_label == 1 ? cmin : cmin * cmin;
    report.sides.push_back(side);
  }
  if (!report.sides.empty()) {
    report.defined = true;
    report.cbot = std::numeric_limits<double>::infinity();
    for (const SideConstruction& s : report.sides) report.cbot = std::min(report.cbot, s.constant);
  }
  return report;
}

CertificateReport stability_report(const PairConfiguration& pair, const ConfigConstants& cc) {
  validate_constants(cc);
  CertificateReport rep;
  rep.constants = cc;
  rep.grid = pair.zeta_under.grid();
  rep.n_sigma = pair.n_sigma;

  const EnergyComparison ec = energy_comparison_sides(pair);
  rep.terms.lhs_energy = ec.lhs;
  rep.terms.rhs_boundary = ec.rhs;
  rep.terms.surface_value_term = ec.surface_value_term;
  rep.terms.surface_normal_term = ec.surface_normal_term;
  rep.terms.j1 = ec.j1;
  rep.terms.j2 = ec.j2;
  rep.terms.j3 = ec.j3;

  rep.terms.tbot = tbot(pair);
  const G1Result g1r = g1(pair);
  rep.terms.g1 = g1r.g1;
  rep.terms.ghat1 = g1r.ghat1;
  rep.terms.gtilde1 = g1r.gtilde1;
  rep.terms.z3_norm = g1r.z3.l2();
  const GTerms gt = g2_to_g5(pair);
  rep.terms.g2 = gt.g2;
  rep.terms.g3 = gt.g3;
  rep.terms.g4 = gt.g4;
  rep.terms.g5 = gt.g5;
  rep.terms.z4_norm = gt.z4_norm;
  rep.terms.z5_norm = gt.z5_norm;
  rep.terms.z6 = gt.z6;
  rep.terms.z7 = gt.z7;

  rep.terms.tlog = evaluate_tlog(pair, cc, TlogMode::trace_norms, nullptr);
  rep.terms.tlog1 = evaluate_tlog(pair, cc, TlogMode::g_norms, &gt);
  rep.h2_diff = rep.terms.tlog1.h2_diff;

  rep.covering = estimate_cbot(pair);
  for (const ComponentCovering& cov : rep.covering.components)
    if (cov.used) rep.terms.crho_estimates.push_back(cov.crho);

  rep.l1_diff = pointwise_abs(pair.a.domain.bottom - pair.a0.domain.bottom).trapz();
  rep.energy_a = pair.a.energy;
  rep.energy_a0 = pair.a0.energy;
  rep.min_energy = std::min(rep.energy_a, rep.energy_a0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double tlog1_value =
      rep.terms.tlog1.status == TlogResult::Status::non_informative ? nan : rep.terms.tlog1.value;
  rep.terms.final_rhs =
      (rep.terms.g2 + rep.terms.g3 + tlog1_value + rep.terms.tbot) / rep.min_energy;
  rep.terms.cbot_estimate = rep.covering.defined ? rep.covering.cbot : nan;

  if (rep.covering.defined) {
    rep.lhs_bound = rep.covering.cbot * rep.l1_diff;
  } else if (rep.covering.components.empty()) {
    rep.lhs_bound = 0.0;  // bottoms agree beyond the mass floor
  } else {
    rep.lhs_bound = nan;  // components exist but none is fat enough
  }

  if (rep.terms.tlog1.status != TlogResult::Status::value) {
    rep.verdict = "NON_INFORMATIVE";
  } else if (std::isnan(rep.lhs_bound)) {
    rep.verdict = "NON_INFORMATIVE";
  } else if (rep.lhs_bound <= rep.terms.final_rhs + 1e-9 * std::max(1.0, std::abs(rep.terms.final_rhs))) {
    rep.verdict = "HOLDS";
  } else {
    rep.verdict = "VIOLATED";
  }
  return rep;
}

std::string render_report_json(const CertificateReport& rep) {
  nlohmann::json j;
  j["verdict"] = rep.verdict;
  j["constants"] = {{"big_c", rep.constants.big_c},
                    {"small_c", rep.constants.small_c},
                    {"s", rep.constants.s}};
  j["grid"] = {{"a1", rep.grid.a1}, {"a2", rep.grid.a2}, {"n", rep.grid.n},
               {"n_sigma", rep.n_sigma}};
  auto tlog_json = [](const TlogResult& t) {
    return nlohmann::json{{"status", status_name(t.status)},
                          {"value", t.value},
                          {"ratio", t.ratio},
                          {"h2_diff", t.h2_diff},
                          {"denominator", t.denominator}};
  };
  const TermBreakdown& tb = rep.terms;
  j["terms"] = {{"lhs_energy", tb.lhs_energy},
                {"rhs_boundary", tb.rhs_boundary},
                {"surface_value_term", tb.surface_value_term},
                {"surface_normal_term", tb.surface_normal_term},
                {"j1", tb.j1},
                {"j2", tb.j2},
                {"j3", tb.j3},
                {"tbot", tb.tbot},
                {"tlog", tlog_json(tb.tlog)},
                {"tlog1", tlog_json(tb.tlog1)},
                {"g1", tb.g1},
                {"ghat1", tb.ghat1},
                {"gtilde1", tb.gtilde1},
                {"g2", tb.g2},
                {"g3", tb.g3},
                {"g4", tb.g4},
                {"g5", tb.g5},
                {"z3_norm", tb.z3_norm},
                {"z4_norm", tb.z4_norm},
                {"z5_norm", tb.z5_norm},
                {"z6", tb.z6},
                {"z7", tb.z7},
                {"cbot_estimate", tb.cbot_estimate},
                {"crho_estimates", tb.crho_estimates},
                {"final_rhs", tb.final_rhs}};
  j["l1_diff"] = rep.l1_diff;
  j["h2_diff"] = rep.h2_diff;
  j["lhs_bound"] = rep.lhs_bound;
  j["energies"] = {{"side", rep.energy_a}, {"side0", rep.energy_a0}, {"min", rep.min_energy}};
  nlohmann::json comps = nlohmann::json::array();
  for (const ComponentCovering& c : rep.covering.components) {
    comps.push_back({{"i_begin", c.i_begin},
                     {"i_end", c.i_end},
                     {"sign", c.sign},
                     {"rho", c.rho},
                     {"area", c.area},
                     {"eroded_area", c.eroded_area},
                     {"n_squares", c.n_squares},
                     {"square_side", c.square_side},
                     {"min_square_energy", c.min_square_energy},
                     {"sample", {c.sample_x, c.sample_y}},
                     {"crho", c.crho},
                     {"c_tilde", c.c_tilde},
                     {"used", c.used}});
  }
  nlohmann::json sides = nlohmann::json::array();
  for (const SideConstruction& s : rep.covering.sides)
    sides.push_back({{"sign", s.sign},
                     {"case", s.case_label},
                     {"constant", s.constant},
                     {"n_components", s.n_used}});
  j["covering"] = {{"defined", rep.covering.defined},
                   {"cbot", rep.covering.cbot},
                   {"sides", sides},
                   {"components", comps}};
  return j.dump(2) + "\n";
}

}  // namespace seabed
