#include <doctest.h>

#include <cmath>
#include <numbers>

#include "seabed/elliptic.hpp"
#include "seabed/errors.hpp"
#include "seabed/geometry.hpp"

using namespace seabed;

namespace {

constexpr double kPi = std::numbers::pi;

// Harmonic with zero vertical flux on the flat line y = -1.
double harmonic(double k, double x, double y) { return std::cosh(k * (y + 1.0)) * std::cos(k * x); }

FluidDomainSpec flat_bottom_domain(int n, double amp) {
  Grid1D g{0.0, 1.0, n};
  ScalarField b(g, [](double) { return -1.0; });
  ScalarField z(g, [=](double x) { return amp * std::sin(2.0 * kPi * x); });
  return build_domain(b, z, 0.5);
}

LateralTrace exact_walls(const FluidDomainSpec& dom, int n_sigma, double k) {
  SigmaMap map{dom.bottom, dom.surface, n_sigma};
  LateralTrace th;
  th.left.resize(n_sigma);
  th.right.resize(n_sigma);
  const int last = dom.grid().n - 1;
  for (int j = 0; j < n_sigma; ++j) {
    th.left[j] = harmonic(k, dom.grid().x(0), map.y(0, j));
    th.right[j] = harmonic(k, dom.grid().x(last), map.y(last, j));
  }
  return th;
}

double solve_error(int n, double k) {
  FluidDomainSpec dom = flat_bottom_domain(n, 0.07);
  ScalarField psi(dom.grid(),
                  [&](double x) { return harmonic(k, x, 0.07 * std::sin(2.0 * kPi * x)); });
  PotentialField phi = solve_potential(dom, psi, exact_walls(dom, n, k), n);
  // L2 of the nodal error over the strip, area weighted
  double err2 = 0.0, area = 0.0;
  const SigmaMap& map = phi.map();
  for (int j = 0; j < phi.ns(); ++j) {
    for (int i = 0; i < n; ++i) {
      double w = psi.weight(i) * map.depth(i) / (phi.ns() - 1) *
                 ((j == 0 || j == phi.ns() - 1) ? 0.5 : 1.0);
      double d = phi.u(i, j) - harmonic(k, dom.grid().x(i), map.y(i, j));
      err2 += w * d * d;
      area += w;
    }
  }
  (void)area;
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("strip solve converges at second order on a manufactured harmonic") {
  const double k = kPi;
  double e1 = solve_error(33, k);
  double e2 = solve_error(65, k);
  double order = std::log2(e1 / e2);
  CHECK(order > 1.7);
  CHECK(e2 < e1);
}

TEST_CASE("dirichlet data is reproduced exactly on the boundary rows") {
  FluidDomainSpec dom = flat_bottom_domain(33, 0.05);
  ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x); });
  LateralTrace th = exact_walls(dom, 17, kPi);
  PotentialField phi = solve_potential(dom, psi, th, 17);
  for (int i = 0; i < 33; ++i) CHECK(phi.u(i, 16) == doctest::Approx(psi.sample(i)).epsilon(1e-13));
  // Corner rows belong to the surface, so the wall trace is honored below it.
  for (int j = 0; j < 16; ++j) {
    CHECK(phi.u(0, j) == doctest::Approx(th.left[j]).epsilon(1e-13));
    CHECK(phi.u(32, j) == doctest::Approx(th.right[j]).epsilon(1e-13));
  }
}

TEST_CASE("assembled system reproduces the solve and the operator vanishes at the solution") {
  FluidDomainSpec dom = flat_bottom_domain(25, 0.06);
  ScalarField psi(dom.grid(), [](double x) { return std::cos(2.0 * kPi * x); });
  LateralTrace th = exact_walls(dom, 13, kPi);
  PotentialField phi = solve_potential(dom, psi, th, 13);
  Eigen::VectorXd u(25 * 13);
  for (int j = 0; j < 13; ++j)
    for (int i = 0; i < 25; ++i) u[j * 25 + i] = phi.u(i, j);
  Eigen::VectorXd r = apply_operator(dom, psi, th, 13, u);
  CHECK(r.lpNorm<Eigen::Infinity>() < 1e-9);

  AssembledSystem sys = assemble_system(dom, psi, th, 13);
  Eigen::VectorXd r2 = sys.matrix * u - sys.rhs;
  CHECK((r - r2).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("iterative and direct solvers agree") {
  FluidDomainSpec dom = flat_bottom_domain(41, 0.05);
  ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x) + 0.3; });
  LateralTrace th = exact_walls(dom, 21, kPi);
  SolverOptions direct;
  SolverOptions iter;
  iter.method = SolverOptions::Method::bicgstab;
  iter.tol = 1e-12;
  SolverDiagnostics dd, di;
  PotentialField pd = solve_potential(dom, psi, th, 21, direct, &dd);
  PotentialField pi = solve_potential(dom, psi, th, 21, iter, &di);
  double worst = 0.0;
  for (size_t k = 0; k < pd.values().size(); ++k)
    worst = std::max(worst, std::abs(pd.values()[k] - pi.values()[k]));
  CHECK(worst < 1e-7);
  CHECK(dd.method == "direct");
  CHECK(di.method == "bicgstab");
  CHECK(di.iterations > 0);
}

TEST_CASE("unreachable iterative tolerance reports divergence") {
  FluidDomainSpec dom = flat_bottom_domain(33, 0.05);
  ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x); });
  LateralTrace th = exact_walls(dom, 17, kPi);
  SolverOptions bad;
  bad.method = SolverOptions::Method::bicgstab;
  bad.tol = 1e-30;
  bad.max_iters = 1;
  CHECK_THROWS_AS(solve_potential(dom, psi, th, 17, bad), SolverDivergence);
}

TEST_CASE("flat strip surface flux reproduces the dispersion factor") {
  const double k = 2.0 * kPi;
  Grid1D g{0.0, 1.0, 129};
  ScalarField b(g, [](double) { return -1.0; });
  ScalarField z(g, [](double) { return 0.0; });
  FluidDomainSpec dom = build_domain(b, z, 0.5);
  ScalarField psi(g, [=](double x) { return std::cos(k * x); });
  PotentialField phi = solve_potential_periodic(dom, psi, 65);
  ScalarField flux = dno(phi);
  const double factor = k * std::tanh(k);
  ScalarField err = flux - psi * factor;
  CHECK(err.l2() / (psi * factor).l2() < 0.02);
}

TEST_CASE("derivative grids are exact for a bilinear potential on a flat strip") {
  Grid1D g{0.0, 1.0, 21};
  ScalarField b(g, [](double) { return -1.0; });
  ScalarField z(g, [](double) { return 0.0; });
  SigmaMap map{b, z, 11};
  PotentialField phi = PotentialField::from_function(map, [](double x, double y) { return x * y; });
  const auto& dx = phi.grid_dx();
  const auto& dy = phi.grid_dy();
  const auto& dxy = phi.grid_dxy();
  const auto& dxx = phi.grid_dxx();
  for (int j = 0; j < 11; ++j) {
    for (int i = 0; i < 21; ++i) {
      size_t id = static_cast<size_t>(j) * 21 + i;
      CHECK(dx[id] == doctest::Approx(map.y(i, j)).epsilon(1e-11));
      CHECK(dy[id] == doctest::Approx(g.x(i)).epsilon(1e-11));
      CHECK(dxy[id] == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(dxx[id] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    }
  }
  // interpolated point evaluations away from the nodes
  CHECK(phi.value_at(0.437, -0.618) == doctest::Approx(0.437 * -0.618).epsilon(1e-12));
  CHECK(phi.dx_at(0.437, -0.618) == doctest::Approx(-0.618).epsilon(1e-10));
  CHECK(phi.dy_at(0.437, -0.618) == doctest::Approx(0.437).epsilon(1e-10));
}

TEST_CASE("derivative grids converge on a curved strip") {
  auto worst_dy = [](int n) {
    Grid1D g{0.0, 1.0, n};
    ScalarField b(g, [](double x) { return -1.0 + 0.1 * std::sin(2.0 * kPi * x); });
    ScalarField z(g, [](double x) { return 0.05 * std::cos(2.0 * kPi * x); });
    SigmaMap map{b, z, n};
    PotentialField phi = PotentialField::from_function(
        map, [](double x, double y) { return std::sin(x) * std::exp(y); });
    const auto& dy = phi.grid_dy();
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(dy[static_cast<size_t>(j) * n + i] -
                                         std::sin(g.x(i)) * std::exp(map.y(i, j))));
    return worst;
  };
  double e1 = worst_dy(17);
  double e2 = worst_dy(33);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("dirichlet energy of a unit-gradient potential equals the strip area") {
  Grid1D g{0.0, 1.0, 65};
  ScalarField b(g, [](double x) { return -1.0 + 0.2 * std::sin(2.0 * kPi * x); });
  ScalarField z(g, [](double x) { return 0.1 * std::cos(4.0 * kPi * x); });
  SigmaMap map{b, z, 33};
  PotentialField phi = PotentialField::from_function(map, [](double x, double) { return x; });
  double area = region_area(b, z);
  CHECK(energy(phi) == doctest::Approx(area).epsilon(1e-10));

  // clipped variant over an interior band
  ScalarField lo(g, [](double) { return -0.75; });
  ScalarField hi(g, [](double) { return -0.35; });
  CHECK(energy(phi, lo, hi) == doctest::Approx(0.4).epsilon(1e-9));

  // degenerate band clips to zero
  CHECK(energy(phi, hi, lo) == doctest::Approx(0.0));
}

TEST_CASE("surface trace reconstruction from measurements matches the grid traces") {
  FluidDomainSpec dom = flat_bottom_domain(65, 0.06);
  ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x) + 0.2 * x; });
  LateralTrace th = exact_walls(dom, 33, kPi);
  PotentialField phi = solve_potential(dom, psi, th, 33);
  SurfaceTraces own = surface_traces(phi);
  SurfaceTraces rec = traces_from_measurements(psi, dom.surface, own.normal);
  CHECK((rec.value - own.value).linf() < 1e-12);
  CHECK((rec.grad_x - own.grad_x).linf() < 1e-10);
  CHECK((rec.grad_y - own.grad_y).linf() < 1e-10);
  CHECK((rec.normal - own.normal).linf() < 1e-10);
}

TEST_CASE("green identity balances interior energy against boundary flux") {
  Grid1D g{0.0, 1.0, 129};
  ScalarField b(g, [](double x) { return -1.0 + 0.1 * std::sin(2.0 * kPi * x); });
  ScalarField z(g, [](double x) { return 0.05 * std::cos(2.0 * kPi * x); });
  FluidDomainSpec dom = build_domain(b, z, 0.5);
  ScalarField psi(g, [](double x) { return 0.2 * std::cos(2.0 * kPi * x); });
  PotentialField phi = solve_potential_periodic(dom, psi, 65);
  double e = energy(phi);
  double surface_flux = trapz_product(psi, dno(phi));
  double scale = std::max(1.0, e);
  CHECK(std::abs(e - surface_flux) < 10.0 * g.spacing() * g.spacing() * scale);
}

TEST_CASE("graph and wall quadratures reproduce closed forms") {
  Grid1D g{0.0, 1.0, 51};
  ScalarField line(g, [](double x) { return x; });
  ScalarField one(g, [](double) { return 1.0; });
  CHECK(arc_length(line) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(graph_integral(line, one, one) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  ScalarField lin(g, [](double x) { return 2.0 * x; });
  CHECK(graph_integral(line, lin, one) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  std::vector<double> f = {0.0, 1.0, 2.0};
  std::vector<double> u = {1.0, 1.0, 1.0};
  CHECK(wall_integral(0.0, 1.0, f, u) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(wall_integral(1.0, 1.0, f, u) == doctest::Approx(0.0));
}

TEST_CASE("sigma map places layers between the profiles") {
  Grid1D g{0.0, 1.0, 5};
  ScalarField b(g, [](double) { return -2.0; });
  ScalarField z(g, [](double x) { return x; });
  SigmaMap map{b, z, 9};
  CHECK(map.y(0, 0) == doctest::Approx(-2.0));
  CHECK(map.y(4, 8) == doctest::Approx(1.0));
  CHECK(map.y(2, 4) == doctest::Approx(-0.75));
  CHECK(map.dsigma() == doctest::Approx(0.125));
}
