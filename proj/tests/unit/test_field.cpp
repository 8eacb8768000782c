#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "seabed/field.hpp"

using namespace seabed;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid nodes are uniform and inclusive of both ends") {
  Grid1D g{-1.0, 3.0, 9};
  CHECK(g.spacing() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.length() == doctest::Approx(4.0));
  CHECK(g.x(0) == doctest::Approx(-1.0));
  CHECK(g.x(8) == doctest::Approx(3.0));
  CHECK(g.x(4) == doctest::Approx(1.0));
  CHECK(g == Grid1D{-1.0, 3.0, 9});
  CHECK_FALSE(g == Grid1D{-1.0, 3.0, 17});
}

TEST_CASE("grid rejects degenerate intervals and tiny node counts") {
  CHECK_THROWS_AS(Grid1D(0.0, 0.0, 9), ConfigError);
  CHECK_THROWS_AS(Grid1D(1.0, 0.0, 9), ConfigError);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 1), ConfigError);
}

TEST_CASE("trapezoid rule integrates linear functions exactly") {
  Grid1D g{0.0, 2.0, 41};
  ScalarField f(g, [](double x) { return 3.0 * x - 1.0; });
  // integral of 3x-1 over [0,2] is 4
  CHECK(f.trapz() == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("trapezoid rule converges at second order on smooth data") {
  auto err = [](int n) {
    Grid1D g{0.0, 1.0, n};
    ScalarField f(g, [](double x) { return std::sin(kPi * x); });
    return std::abs(f.trapz() - 2.0 / kPi);
  };
  double e1 = err(17);
  double e2 = err(33);
  CHECK(e1 / e2 > 3.5);  // ratio 4 expected for order 2
}

TEST_CASE("l2 norm uses trapezoid weights") {
  Grid1D g{0.0, 1.0, 201};
  ScalarField f(g, [](double x) { return std::sin(2.0 * kPi * x); });
  // integral of sin^2 over one period is 1/2
  CHECK(f.l2() == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
}

TEST_CASE("linf, min, max, mean report the obvious values") {
  Grid1D g{0.0, 1.0, 101};
  ScalarField f(g, [](double x) { return x * (1.0 - x); });
  CHECK(f.max() == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(f.min() == doctest::Approx(0.0));
  CHECK(f.linf() == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(f.mean() == doctest::Approx(1.0 / 6.0).epsilon(1e-3));
}

TEST_CASE("endpoint quadrature weights are half the interior weight") {
  Grid1D g{0.0, 1.0, 5};
  ScalarField f(g, [](double) { return 1.0; });
  CHECK(f.weight(0) == doctest::Approx(0.125));
  CHECK(f.weight(2) == doctest::Approx(0.25));
  CHECK(f.weight(4) == doctest::Approx(0.125));
  double total = 0.0;
  for (int i = 0; i < g.n; ++i) total += f.weight(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("derivative is exact on quadratics including the ends") {
  Grid1D g{-1.0, 1.0, 21};
  ScalarField f(g, [](double x) { return 2.0 * x * x - x + 3.0; });
  ScalarField d = f.derivative();
  for (int i = 0; i < g.n; ++i) {
    CHECK(d.sample(i) == doctest::Approx(4.0 * g.x(i) - 1.0).epsilon(1e-12));
  }
}

TEST_CASE("derivative converges at second order uniformly") {
  auto err = [](int n) {
    Grid1D g{0.0, 1.0, n};
    ScalarField f(g, [](double x) { return std::exp(std::sin(2.0 * kPi * x)); });
    ScalarField d = f.derivative();
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double exact = 2.0 * kPi * std::cos(2.0 * kPi * g.x(i)) *
                     std::exp(std::sin(2.0 * kPi * g.x(i)));
      worst = std::max(worst, std::abs(d.sample(i) - exact));
    }
    return worst;
  };
  double e1 = err(65);
  double e2 = err(129);
  CHECK(e1 / e2 > 3.2);
}

TEST_CASE("periodic derivative treats the seam like an interior node") {
  Grid1D g{0.0, 1.0, 65};
  ScalarField f(g, [](double x) { return std::sin(2.0 * kPi * x); });
  ScalarField d = f.derivative_periodic();
  double worst = 0.0;
  for (int i = 0; i < g.n; ++i) {
    worst = std::max(worst, std::abs(d.sample(i) - 2.0 * kPi * std::cos(2.0 * kPi * g.x(i))));
  }
  // Central difference of sin(2 pi x) carries a (2 pi)^3 h^2 / 6 Taylor error.
  const double h = g.spacing();
  CHECK(worst < std::pow(2.0 * kPi, 3) / 6.0 * h * h * 1.01);
}

TEST_CASE("arithmetic operators act pointwise and respect grids") {
  Grid1D g{0.0, 1.0, 11};
  ScalarField a(g, [](double x) { return x; });
  ScalarField b(g, [](double x) { return 1.0 - x; });
  ScalarField s = a + b;
  for (int i = 0; i < g.n; ++i) CHECK(s.sample(i) == doctest::Approx(1.0));
  ScalarField p = a * 2.0;
  CHECK(p.sample(5) == doctest::Approx(1.0));
  ScalarField d = a - b;
  CHECK(d.sample(0) == doctest::Approx(-1.0));
  Grid1D other{0.0, 2.0, 11};
  ScalarField c(other, [](double x) { return x; });
  CHECK_THROWS_AS(require_same_grid(a, c), GridMismatch);
}

TEST_CASE("pointwise min, max, abs") {
  Grid1D g{-1.0, 1.0, 21};
  ScalarField a(g, [](double x) { return x; });
  ScalarField b(g, [](double x) { return -x; });
  ScalarField lo = pointwise_min(a, b);
  ScalarField hi = pointwise_max(a, b);
  ScalarField ab = pointwise_abs(a);
  for (int i = 0; i < g.n; ++i) {
    CHECK(lo.sample(i) == doctest::Approx(-std::abs(g.x(i))));
    CHECK(hi.sample(i) == doctest::Approx(std::abs(g.x(i))));
    CHECK(ab.sample(i) == doctest::Approx(std::abs(g.x(i))));
  }
}

TEST_CASE("trapz_product matches trapz of the product") {
  Grid1D g{0.0, 1.0, 33};
  ScalarField a(g, [](double x) { return std::cos(x); });
  ScalarField b(g, [](double x) { return x * x; });
  ScalarField prod = a * b;
  CHECK(trapz_product(a, b) == doctest::Approx(prod.trapz()).epsilon(1e-14));
}

TEST_CASE("masked norms split a field across a partition") {
  Grid1D g{0.0, 1.0, 101};
  ScalarField f(g, [](double x) { return 1.0 + x; });
  std::vector<std::uint8_t> left(101, 0), right(101, 0), all(101, 1);
  for (int i = 0; i < 101; ++i) (i <= 50 ? left : right)[i] = 1;
  double s_left = masked_l2_sq(f, left);
  double s_right = masked_l2_sq(f, right);
  double s_all = masked_l2_sq(f, all);
  // node 50 carries full weight in "left" and none in "right": the masked
  // quadratures overlap by one trapezoid cell, so allow that cell's area.
  CHECK(std::abs(s_left + s_right - s_all) < 4.0 * g.spacing());
  CHECK(s_all == doctest::Approx(7.0 / 3.0).epsilon(1e-3));
  CHECK(masked_linf(f, left) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(masked_linf(f, right) == doctest::Approx(2.0).epsilon(1e-12));
}
