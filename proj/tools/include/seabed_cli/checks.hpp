#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "seabed/certificate.hpp"
#include "seabed/elliptic.hpp"
#include "seabed/rng.hpp"

namespace seabed::cli {

// One numerical check: the measured quantity, the threshold it was held to,
// and whether it passed. `detail` is a single printable line.
struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 12345;
  // randomized identity and pair checks
  int n = 65;
  int n_sigma = 33;
  int n_configs = 10;
  int n_pairs = 20;
  SolverOptions solver;
  // manufactured-solution ladder
  std::vector<int> convergence_sizes = {33, 65, 129};
  // dispersion experiment
  int dispersion_n = 129;
  int dispersion_n_sigma = 65;
  double dispersion_bound = 0.02;
  // dynamics experiment
  int rest_steps = 200;
  int wave_n = 129;
  double period_bound = 0.02;
  // inversion experiment
  int inversion_n = 65;
  int inversion_iters = 300;
  double recovery_bound = 0.05;
  bool run_report_scan = true;  // full stability report per random pair
};

// Admissible random pair on the unit window, with wall traces restricted
// from periodic mother solves. wall_gap pushes the bottom difference onto
// the window edge so the bottom wall terms are nonzero.
PairConfiguration random_admissible_pair(Rng& rng, int n, int n_sigma,
                                         const SolverOptions& solver, bool wall_gap = false);

// Single random admissible window configuration (one side only).
struct WindowConfig {
  FluidDomainSpec domain;
  ScalarField psi;
  LateralTrace theta;
};
WindowConfig random_window_config(Rng& rng, int n, int n_sigma, const SolverOptions& solver);

std::vector<CheckResult> convergence_checks(const CheckOptions& opts);
CheckResult dispersion_check(const CheckOptions& opts);
std::vector<CheckResult> trace_identity_checks(const CheckOptions& opts);
std::vector<CheckResult> conservation_checks(const CheckOptions& opts);
std::vector<CheckResult> pair_inequality_checks(const CheckOptions& opts);
std::vector<CheckResult> identical_pair_checks(const CheckOptions& opts);
std::vector<CheckResult> size_oracle_checks(const CheckOptions& opts);
std::vector<CheckResult> dynamics_checks(const CheckOptions& opts);
std::vector<CheckResult> gradient_checks(const CheckOptions& opts);
std::vector<CheckResult> inversion_recovery_checks(const CheckOptions& opts);
std::vector<CheckResult> sweep_trend_checks(const CheckOptions& opts);

// The verify command's fast suite: manufactured solutions, trace identities,
// conservation laws, randomized pair margins, size oracles, and the gradient
// oracle.
std::vector<CheckResult> verify_suite(const CheckOptions& opts);

std::string format_check_line(const CheckResult& r);

}  // namespace seabed::cli
