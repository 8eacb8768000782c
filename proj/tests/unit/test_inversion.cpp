#include <doctest.h>

#include <cmath>
#include <numbers>

#include "seabed/elliptic.hpp"
#include "seabed/errors.hpp"
#include "seabed/geometry.hpp"
#include "seabed/inversion.hpp"
#include "seabed/waves.hpp"

using namespace seabed;

namespace {

constexpr double kPi = std::numbers::pi;

// Window measurement synthesized directly from a strip solve with the given
// bottom: the misfit of that bottom is a discrete zero by construction.
struct SyntheticData {
  MeasurementTuple tuple;
  LateralTrace theta;
};

SyntheticData synth_measurement(const ScalarField& b_true, int n_sigma,
                                double depth_floor = 0.1) {
  const Grid1D& g = b_true.grid();
  SyntheticData d;
  ScalarField zeta(g, [](double x) { return 0.02 * std::cos(kPi * x); });
  ScalarField psi(g, [](double x) { return 0.05 * std::sin(kPi * x) + 0.02 * x; });
  d.theta.left.resize(n_sigma);
  d.theta.right.resize(n_sigma);
  for (int j = 0; j < n_sigma; ++j) {
    const double s = static_cast<double>(j) / (n_sigma - 1);
    d.theta.left[j] = 0.03 * s * s;
    d.theta.right[j] = 0.05 * std::sin(kPi * 1.0) + 0.02 - 0.01 * (1.0 - s);
  }
  FluidDomainSpec dom = build_domain(b_true, zeta, depth_floor);
  PotentialField phi = solve_potential(dom, psi, d.theta, n_sigma);
  d.tuple.t0 = 0.0;
  d.tuple.b_left = b_true.sample(0);
  d.tuple.b_right = b_true.sample(g.n - 1);
  d.tuple.zeta = zeta;
  d.tuple.psi = psi;
  d.tuple.dt_zeta = dno(phi);
  return d;
}

}  // namespace

TEST_CASE("l1 distance between profiles has the obvious closed forms") {
  Grid1D g{0.0, 1.0, 201};
  ScalarField a(g, [](double) { return -1.0; });
  ScalarField b(g, [](double) { return -0.9; });
  CHECK(l1_error(a, b) == doctest::Approx(0.1).epsilon(1e-12));
  // triangular bump, height 0.1 and base 0.2: mass 0.01
  ScalarField c(g, [](double x) {
    const double t = 1.0 - std::abs(x - 0.5) / 0.1;
    return -1.0 + (t > 0.0 ? 0.1 * t : 0.0);
  });
  CHECK(l1_error(a, c) == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("the data-generating bottom has zero misfit") {
  Grid1D g{0.0, 1.0, 33};
  ScalarField b_true(g, [](double x) { return -1.0 + 0.05 * std::sin(2.0 * kPi * x); });
  SyntheticData d = synth_measurement(b_true, 17);
  InversionOptions opts;
  opts.alpha_reg = 0.0;
  opts.n_sigma = 17;
  CHECK(misfit(b_true, d.tuple, d.theta, opts) < 1e-20);
  // a perturbed bottom does not
  ScalarField b_off(g, [](double x) { return -1.0 + 0.05 * std::sin(2.0 * kPi * x) + 0.02; });
  CHECK(misfit(b_off, d.tuple, d.theta, opts) > 1e-9);
}

TEST_CASE("curvature penalty adds its exact quadrature") {
  Grid1D g{0.0, 1.0, 33};
  ScalarField b_true(g, [](double) { return -1.0; });
  SyntheticData d = synth_measurement(b_true, 17);
  InversionOptions opts;
  opts.n_sigma = 17;
  opts.alpha_reg = 2.0;
  // candidate with known curvature energy: b = -1 + 0.1 x^2 has b'' = 0.2
  ScalarField b(g, [](double x) { return -1.0 + 0.1 * x * x; });
  InversionOptions no_reg = opts;
  no_reg.alpha_reg = 0.0;
  const double with_reg = misfit(b, d.tuple, d.theta, opts);
  const double without = misfit(b, d.tuple, d.theta, no_reg);
  CHECK(with_reg - without == doctest::Approx(0.5 * 2.0 * 0.04).epsilon(1e-9));
}

TEST_CASE("adjoint gradient matches central differences") {
  // Shallow column: the flux responds strongly to the bottom, so the
  // comparison probes the solve adjoint rather than finite-difference noise.
  Grid1D g{0.0, 1.0, 33};
  ScalarField b(g, [](double x) { return -0.15 + 0.01 * std::sin(2.0 * kPi * x); });
  ScalarField b_data(g, [](double x) {
    return -0.15 + 0.06 * std::exp(-30.0 * (x - 0.5) * (x - 0.5));
  });
  SyntheticData d = synth_measurement(b_data, 17, 0.03);
  InversionOptions opts;
  opts.n_sigma = 17;
  opts.depth_floor = 0.03;
  opts.alpha_reg = 1e-8;
  opts.fd_step = 3e-5;
  ScalarField ga = gradient(b, d.tuple, d.theta, opts);
  ScalarField gf = fd_gradient(b, d.tuple, d.theta, opts);
  const double floor_den = 1e-3 * std::max(1e-12, gf.linf());
  double worst = 0.0;
  for (int i = 1; i + 1 < g.n; ++i) {
    const double den = std::max(std::abs(gf.sample(i)), floor_den);
    worst = std::max(worst, std::abs(ga.sample(i) - gf.sample(i)) / den);
  }
  CHECK(worst < 1e-4);
  CHECK(ga.sample(0) == 0.0);
  CHECK(ga.sample(32) == 0.0);
  CHECK(ga.linf() > 0.0);
}

TEST_CASE("descent recovers a small interior bump") {
  Grid1D g{0.0, 1.0, 33};
  ScalarField b_true(g, [](double x) {
    return -0.15 + 0.06 * std::exp(-30.0 * (x - 0.5) * (x - 0.5));
  });
  SyntheticData d = synth_measurement(b_true, 17, 0.03);
  InversionOptions opts;
  opts.n_sigma = 17;
  opts.depth_floor = 0.03;
  opts.alpha_reg = 1e-9;
  opts.grad_tol = 1e-13;
  opts.max_iters = 400;
  InversionResult res = invert(d.tuple, d.theta, ScalarField(g, -0.15), opts);

  REQUIRE(!res.misfit_history.empty());
  for (size_t i = 1; i < res.misfit_history.size(); ++i)
    CHECK(res.misfit_history[i] <= res.misfit_history[i - 1] * (1.0 + 1e-12));
  CHECK(res.misfit_history.back() < 1e-2 * res.misfit_history.front());

  const double mass = l1_error(b_true, ScalarField(g, -0.15));
  CHECK(l1_error(res.b_est, b_true) < 0.3 * mass);

  // endpoints pinned, depth floor respected
  CHECK(res.b_est.sample(0) == doctest::Approx(d.tuple.b_left));
  CHECK(res.b_est.sample(32) == doctest::Approx(d.tuple.b_right));
  for (int i = 0; i < 33; ++i)
    CHECK(res.b_est.sample(i) <= d.tuple.zeta.sample(i) - opts.depth_floor + 1e-12);
  CHECK((res.stop_reason == "converged" || res.stop_reason == "max_iters" ||
         res.stop_reason == "line_search_failure"));
}

TEST_CASE("infeasible initial bottoms are refused") {
  Grid1D g{0.0, 1.0, 33};
  ScalarField b_true(g, [](double) { return -1.0; });
  SyntheticData d = synth_measurement(b_true, 9);
  InversionOptions opts;
  opts.n_sigma = 9;
  ScalarField too_high(g, [](double) { return 0.0; });
  CHECK_THROWS_AS(invert(d.tuple, d.theta, too_high, opts), InfeasibleInit);
  CHECK_THROWS_AS(misfit(too_high, d.tuple, d.theta, opts), DepthViolation);
}

TEST_CASE("still water is flagged flat by the misfit itself") {
  Grid1D g{0.0, 1.0, 33};
  MeasurementTuple m;
  m.t0 = 0.0;
  m.b_left = -1.0;
  m.b_right = -1.0;
  m.zeta = ScalarField(g);
  m.psi = ScalarField(g);
  m.dt_zeta = ScalarField(g);
  LateralTrace theta;
  theta.left.assign(17, 0.0);
  theta.right.assign(17, 0.0);
  InversionOptions opts;
  opts.n_sigma = 17;
  opts.alpha_reg = 0.0;
  ScalarField b1(g, [](double) { return -1.0; });
  ScalarField b2(g, [](double x) { return -1.0 - 0.1 * std::sin(kPi * x); });
  ScalarField b3(g, [](double x) { return -0.8 + 0.05 * std::cos(2.0 * kPi * x); });
  CHECK(misfit(b1, m, theta, opts) < 1e-24);
  CHECK(misfit(b2, m, theta, opts) < 1e-24);
  CHECK(misfit(b3, m, theta, opts) < 1e-24);
}
