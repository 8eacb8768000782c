#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "seabed/elliptic.hpp"
#include "seabed/geometry.hpp"
#include "seabed/inversion.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

seabed::FluidDomainSpec make_domain(int n) {
  seabed::Grid1D g{0.0, 1.0, n};
  seabed::ScalarField b(g, [](double x) { return -1.0 + 0.05 * std::sin(2.0 * kPi * x); });
  seabed::ScalarField z(g, [](double x) { return 0.02 * std::cos(2.0 * kPi * x); });
  return seabed::build_domain(b, z, 0.5);
}

void bm_solve_direct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  seabed::FluidDomainSpec dom = make_domain(n);
  seabed::ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x); });
  for (auto _ : state) {
    seabed::PotentialField phi = seabed::solve_potential_periodic(dom, psi, (n + 1) / 2);
    benchmark::DoNotOptimize(phi.values().data());
  }
  state.SetComplexityN(n);
}
BENCHMARK(bm_solve_direct)->Arg(33)->Arg(65)->Arg(129)->Arg(257)->Complexity();

void bm_solve_bicgstab(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  seabed::FluidDomainSpec dom = make_domain(n);
  seabed::ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x); });
  seabed::SolverOptions opts;
  opts.method = seabed::SolverOptions::Method::bicgstab;
  opts.tol = 1e-10;
  for (auto _ : state) {
    seabed::PotentialField phi = seabed::solve_potential_periodic(dom, psi, (n + 1) / 2, opts);
    benchmark::DoNotOptimize(phi.values().data());
  }
}
BENCHMARK(bm_solve_bicgstab)->Arg(65)->Arg(129);

void bm_dno(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  seabed::FluidDomainSpec dom = make_domain(n);
  seabed::ScalarField psi(dom.grid(), [](double x) { return std::sin(2.0 * kPi * x); });
  seabed::PotentialField phi = seabed::solve_potential_periodic(dom, psi, (n + 1) / 2);
  for (auto _ : state) {
    seabed::ScalarField f = seabed::dno(phi);
    benchmark::DoNotOptimize(f.values().data());
  }
}
BENCHMARK(bm_dno)->Arg(65)->Arg(257);

struct InversionFixture {
  seabed::MeasurementTuple m;
  seabed::LateralTrace theta;
  seabed::ScalarField candidate;
  seabed::InversionOptions opts;

  explicit InversionFixture(int n) {
    seabed::Grid1D g{0.0, 1.0, n};
    seabed::ScalarField b(g, [](double x) { return -1.0 + 0.05 * std::sin(kPi * x); });
    seabed::ScalarField z(g, [](double x) { return 0.02 * std::cos(kPi * x); });
    seabed::ScalarField psi(g, [](double x) { return 0.05 * std::sin(kPi * x); });
    seabed::FluidDomainSpec dom = seabed::build_domain(b, z, 0.5);
    opts.n_sigma = 33;
    theta.left.assign(33, 0.0);
    theta.right.assign(33, 0.0);
    seabed::PotentialField phi = seabed::solve_potential(dom, psi, theta, opts.n_sigma);
    m.zeta = z;
    m.psi = psi;
    m.dt_zeta = seabed::dno(phi);
    m.b_left = b[0];
    m.b_right = b[n - 1];
    candidate = seabed::ScalarField(g, -1.0);
    candidate[0] = m.b_left;
    candidate[n - 1] = m.b_right;
  }
};

void bm_misfit(benchmark::State& state) {
  InversionFixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(seabed::misfit(fx.candidate, fx.m, fx.theta, fx.opts));
}
BENCHMARK(bm_misfit)->Arg(65)->Arg(129);

void bm_gradient(benchmark::State& state) {
  InversionFixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    seabed::ScalarField g = seabed::gradient(fx.candidate, fx.m, fx.theta, fx.opts);
    benchmark::DoNotOptimize(g.values().data());
  }
}
BENCHMARK(bm_gradient)->Arg(65)->Arg(129);

}  // namespace

BENCHMARK_MAIN();
