// Acceptance gate: one line per criterion, exit 0 only when every criterion
// holds at its stated tolerance. Criteria with a wall-clock budget fail when
// they run over it.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "seabed_cli/checks.hpp"

using seabed::cli::CheckOptions;
using seabed::cli::CheckResult;

namespace {

struct Criterion {
  std::string label;
  std::vector<CheckResult> results;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0 means unlimited
  bool pass() const {
    for (const CheckResult& r : results)
      if (!r.pass) return false;
    return budget_seconds == 0.0 || seconds <= budget_seconds;
  }
};

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void print_criterion(int index, const Criterion& c) {
  std::printf("criterion %02d %s  %s  (%.1fs)\n", index, c.pass() ? "PASS" : "FAIL",
              c.label.c_str(), c.seconds);
  if (!c.pass()) {
    for (const CheckResult& r : c.results)
      if (!r.pass) std::printf("    failed: %s\n", seabed::cli::format_check_line(r).c_str());
    if (c.budget_seconds > 0.0 && c.seconds > c.budget_seconds)
      std::printf("    failed: over the %.0fs budget\n", c.budget_seconds);
  }
  std::fflush(stdout);
}

}  // namespace

int main() {
  CheckOptions opts;
  opts.convergence_sizes = {33, 65, 129, 257};
  opts.dispersion_n = 257;
  opts.dispersion_n_sigma = 129;
  opts.dispersion_bound = 0.01;
  opts.rest_steps = 1000;
  opts.wave_n = 129;
  opts.period_bound = 0.02;
  opts.inversion_n = 129;
  opts.inversion_iters = 300;
  opts.recovery_bound = 0.05;

  std::vector<Criterion> criteria(12);
  auto timed = [](Criterion& c, auto&& fn) {
    Timer t;
    c.results = fn();
    c.seconds = t.seconds();
  };

  criteria[0].label = "manufactured harmonic, L2 order >= 1.7 over n in {33,65,129,257}";
  criteria[0].budget_seconds = 60.0;
  timed(criteria[0], [&] { return seabed::cli::convergence_checks(opts); });

  criteria[1].label = "flat-strip dispersion factor within 1% at n = 257";
  timed(criteria[1], [&] {
    return std::vector<CheckResult>{seabed::cli::dispersion_check(opts)};
  });

  criteria[2].label = "trace reconstruction within 5 h^2 on 10 random configurations";
  timed(criteria[2], [&] { return seabed::cli::trace_identity_checks(opts); });

  criteria[3].label = "green identity and flux balance within 10 h^2 on the same configurations";
  timed(criteria[3], [&] { return seabed::cli::conservation_checks(opts); });

  // One run of the pair suite feeds criteria 5, 6, and the verdict scan of 12.
  Criterion pair_run;
  pair_run.label = "pair suite";
  timed(pair_run, [&] { return seabed::cli::pair_inequality_checks(opts); });

  criteria[4].label = "energy comparison inequality on 20 random admissible pairs";
  criteria[4].results = {pair_run.results.at(0)};
  criteria[4].seconds = pair_run.seconds;

  criteria[5].label = "nine derived inequalities on the same pairs";
  criteria[5].results.assign(pair_run.results.begin() + 1, pair_run.results.begin() + 10);
  criteria[5].seconds = pair_run.seconds;

  criteria[6].label = "identical pair: every comparison term at zero within 1e-12";
  timed(criteria[6], [&] { return seabed::cli::identical_pair_checks(opts); });

  criteria[7].label = "rectangular gap energy equals its area; covering bound below it";
  criteria[8].label = "square erosion radius within one raster pixel of the closed form";
  {
    Timer t;
    std::vector<CheckResult> size = seabed::cli::size_oracle_checks(opts);
    criteria[7].results = {size.at(0), size.at(1)};
    criteria[8].results = {size.at(2)};
    criteria[7].seconds = criteria[8].seconds = t.seconds();
  }

  criteria[9].label =
      "dynamics: rest fixed point, mean drift, standing-wave period, integrator order >= 3.5";
  criteria[9].budget_seconds = 300.0;
  timed(criteria[9], [&] { return seabed::cli::dynamics_checks(opts); });

  criteria[10].label =
      "inversion: bump recovery <= 5% L1 at n = 129, adjoint-FD agreement, noise trend, still water";
  criteria[10].budget_seconds = 600.0;
  timed(criteria[10], [&] {
    std::vector<CheckResult> all = seabed::cli::gradient_checks(opts);
    std::vector<CheckResult> rec = seabed::cli::inversion_recovery_checks(opts);
    all.insert(all.end(), rec.begin(), rec.end());
    return all;
  });

  criteria[11].label = "sweep: bound nonincreasing with epsilon, no violated verdicts";
  timed(criteria[11], [&] {
    std::vector<CheckResult> all = seabed::cli::sweep_trend_checks(opts);
    all.push_back(pair_run.results.at(10));  // verdict scan over the random pairs
    return all;
  });

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    print_criterion(static_cast<int>(i) + 1, criteria[i]);
    if (!criteria[i].pass()) ++failures;
  }
  if (failures == 0) {
    std::printf("all 12 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", failures);
  return 1;
}
