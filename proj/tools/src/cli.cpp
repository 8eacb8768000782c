#include "seabed_cli/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "seabed/certificate.hpp"
#include "seabed/errors.hpp"
#include "seabed/inversion.hpp"
#include "seabed/io.hpp"
#include "seabed/rng.hpp"
#include "seabed/svg.hpp"
#include "seabed/waves.hpp"
#include "seabed_cli/checks.hpp"
#include "seabed_cli/experiment.hpp"

namespace seabed::cli {
namespace {

using nlohmann::json;

struct Invocation {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  int threads = 1;
  std::string measurement_path;  // invert only; empty synthesizes from profiles
};

std::string joinp(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

json rng_json(std::uint64_t seed, const std::string& stream) {
  return json{{"algorithm", Rng::algorithm()}, {"seed", seed}, {"stream", stream}};
}

void write_json(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

json grid_json(const Grid1D& g) { return json{{"a1", g.a1}, {"a2", g.a2}, {"n", g.n}}; }

ScalarField profile_or(const Experiment& ex, const std::string& key, const Grid1D& g,
                       double fallback) {
  return ex.has_profile(key) ? ex.profile(key, g) : ScalarField(g, fallback);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Experiment& ex, const Invocation& inv) {
  const Grid1D& g = ex.grid();
  ScalarField b = ex.profile("bottom", g);
  WaveState init{0.0, profile_or(ex, "surface", g, 0.0), profile_or(ex, "psi", g, 0.0)};
  SimConfig cfg = ex.sim_config();
  Trajectory traj = simulate(init, b, cfg);

  const int stride = std::max(1, ex.config().integer_or("output", "trajectory_stride", 1));
  std::ostringstream csv;
  csv.precision(17);
  csv << "t,x,zeta,psi\n";
  int written = 0;
  for (size_t s = 0; s < traj.states.size(); ++s) {
    if (s % stride != 0 && s + 1 != traj.states.size()) continue;
    const WaveState& w = traj.states[s];
    for (int i = 0; i < g.n; ++i)
      csv << w.t << "," << g.x(i) << "," << w.zeta[i] << "," << w.psi[i] << "\n";
    ++written;
  }
  write_text_atomic(joinp(inv.out_dir, "trajectory.csv"), csv.str());

  const WaveState& last = traj.states.back();
  std::vector<PlotSeries> series = {series_from_field("surface at t_end", last.zeta),
                                    series_from_field("bottom", b)};
  PlotOptions po;
  po.title = "final state";
  po.y_label = "y";
  write_svg(joinp(inv.out_dir, "final_state.svg"), render_line_plot(series, po));

  json rep;
  rep["command"] = "simulate";
  rep["grid"] = grid_json(g);
  rep["dt"] = traj.dt;
  rep["steps"] = traj.states.size() - 1;
  rep["t_final"] = last.t;
  rep["states_written"] = written;
  rep["surface_final"] = {{"min", last.zeta.min()}, {"max", last.zeta.max()},
                          {"mean", last.zeta.mean()}};
  rep["rng"] = rng_json(inv.seed, "unused");
  rep["outputs"] = json::array({"trajectory.csv", "final_state.svg"});
  write_json(joinp(inv.out_dir, "simulate_report.json"), rep);
  return 0;
}

int cmd_measure(const Experiment& ex, const Invocation& inv) {
  const Grid1D& g = ex.grid();
  ScalarField b = ex.profile("bottom", g);
  WaveState init{0.0, profile_or(ex, "surface", g, 0.0), profile_or(ex, "psi", g, 0.0)};
  SimConfig cfg = ex.sim_config();
  Trajectory traj = simulate(init, b, cfg);

  const double t0 = ex.config().number_or("time", "t0", cfg.t_end);
  const Grid1D window = ex.window();
  Measurement m = measure(traj, t0, b, window, cfg);

  write_field_csv(joinp(inv.out_dir, "zeta.csv"), m.tuple.zeta);
  write_field_csv(joinp(inv.out_dir, "psi.csv"), m.tuple.psi);
  write_field_csv(joinp(inv.out_dir, "dtzeta.csv"), m.tuple.dt_zeta);
  SigmaMap map{restrict_to_window(b, window), m.tuple.zeta, m.n_sigma};
  write_trace_csv(joinp(inv.out_dir, "theta.csv"), map, m.theta);

  MeasurementFiles files;
  files.t0 = m.tuple.t0;
  files.b_left = m.tuple.b_left;
  files.b_right = m.tuple.b_right;
  files.zeta = "zeta.csv";
  files.psi = "psi.csv";
  files.dtzeta = "dtzeta.csv";
  files.theta = "theta.csv";
  write_measurement_manifest(joinp(inv.out_dir, "measurement.json"), files);

  json rep;
  rep["command"] = "measure";
  rep["grid"] = grid_json(g);
  rep["window"] = grid_json(window);
  rep["t0"] = m.tuple.t0;
  rep["n_sigma"] = m.n_sigma;
  rep["rng"] = rng_json(inv.seed, "unused");
  rep["outputs"] =
      json::array({"measurement.json", "zeta.csv", "psi.csv", "dtzeta.csv", "theta.csv"});
  write_json(joinp(inv.out_dir, "measure_report.json"), rep);
  return 0;
}

int cmd_solve(const Experiment& ex, const Invocation& inv) {
  const Grid1D& g = ex.grid();
  ScalarField b = ex.profile("bottom", g);
  ScalarField z = profile_or(ex, "surface", g, 0.0);
  ScalarField psi = profile_or(ex, "psi", g, 0.0);
  FluidDomainSpec dom = build_domain(b, z, ex.depth_floor());
  SolverDiagnostics diag;
  PotentialField phi = solve_potential_periodic(dom, psi, ex.n_sigma(), ex.solver(), &diag);

  write_potential_csv(joinp(inv.out_dir, "potential.csv"), phi);
  write_field_csv(joinp(inv.out_dir, "dno.csv"), dno(phi));

  json rep;
  rep["command"] = "solve";
  rep["grid"] = grid_json(g);
  rep["n_sigma"] = ex.n_sigma();
  rep["solver"] = {{"method", diag.method},
                   {"residual", diag.residual},
                   {"iterations", diag.iterations}};
  rep["energy"] = energy(phi);
  rep["rng"] = rng_json(inv.seed, "unused");
  rep["outputs"] = json::array({"potential.csv", "dno.csv"});
  write_json(joinp(inv.out_dir, "solve_report.json"), rep);
  return 0;
}

void write_certificate_artifacts(const CertificateReport& rep, const std::string& out_dir,
                                 const std::string& stem) {
  write_text_atomic(joinp(out_dir, stem + ".json"), render_report_json(rep));

  const std::vector<std::pair<std::string, double>> terms = {
      {"lhs_energy", rep.terms.lhs_energy},
      {"rhs_boundary", rep.terms.rhs_boundary},
      {"surface_value_term", rep.terms.surface_value_term},
      {"surface_normal_term", rep.terms.surface_normal_term},
      {"j1", rep.terms.j1},
      {"j2", rep.terms.j2},
      {"j3", rep.terms.j3},
      {"tbot", rep.terms.tbot},
      {"tlog", rep.terms.tlog.value},
      {"tlog1", rep.terms.tlog1.value},
      {"g1", rep.terms.g1},
      {"g2", rep.terms.g2},
      {"g3", rep.terms.g3},
      {"g4", rep.terms.g4},
      {"g5", rep.terms.g5},
      {"final_rhs", rep.terms.final_rhs},
      {"lhs_bound", rep.lhs_bound}};
  std::ostringstream csv;
  csv.precision(17);
  csv << "term,value\n";
  for (const auto& [name, value] : terms) csv << name << "," << value << "\n";
  write_text_atomic(joinp(out_dir, stem + "_terms.csv"), csv.str());

  std::vector<std::string> labels;
  std::vector<double> magnitudes;
  for (const auto& [name, value] : terms) {
    if (name == "final_rhs" || name == "lhs_bound") continue;
    labels.push_back(name);
    magnitudes.push_back(std::isfinite(value) ? std::abs(value) : 0.0);
  }
  PlotOptions po;
  po.title = "certificate terms (" + rep.verdict + ")";
  po.y_label = "magnitude";
  write_svg(joinp(out_dir, stem + "_terms.svg"), render_bar_chart(labels, magnitudes, po));
}

int cmd_certify(const Experiment& ex, const Invocation& inv) {
  PairConfiguration pair = config_pair(ex, 1.0);
  CertificateReport rep = stability_report(pair, ex.constants());
  write_certificate_artifacts(rep, inv.out_dir, "certificate");
  std::cout << "verdict " << rep.verdict << "\n";
  return rep.verdict == "NON_INFORMATIVE" ? 5 : 0;
}

int cmd_sweep(const Experiment& ex, const Invocation& inv) {
  const std::vector<double> eps =
      ex.config().number_list_or("certificate", "epsilons", {1.0, 0.5, 0.25, 0.125, 0.0625});
  if (eps.empty()) throw ConfigError("certificate.epsilons must not be empty");

  std::ostringstream csv;
  csv.precision(17);
  csv << "epsilon,l1_distance,final_rhs,verdict\n";
  PlotSeries rhs_series{"final_rhs", {}, {}, ""};
  PlotSeries l1_series{"l1_distance", {}, {}, ""};
  json rows = json::array();
  for (double e : eps) {
    double l1 = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    std::string verdict;
    try {
      PairConfiguration pair = config_pair(ex, e);
      CertificateReport rep = stability_report(pair, ex.constants());
      l1 = rep.l1_diff;
      rhs = rep.terms.final_rhs;
      verdict = rep.verdict;
    } catch (const IdenticalPair&) {
      verdict = "IDENTICAL";
    }
    csv << e << "," << l1 << "," << rhs << "," << verdict << "\n";
    rows.push_back(json{{"epsilon", e}, {"l1_distance", l1}, {"final_rhs", rhs},
                        {"verdict", verdict}});
    if (std::isfinite(rhs)) {
      rhs_series.x.push_back(e);
      rhs_series.y.push_back(rhs);
      l1_series.x.push_back(e);
      l1_series.y.push_back(l1);
    }
    std::cout << "epsilon " << e << " verdict " << verdict << " rhs " << rhs << "\n";
  }
  write_text_atomic(joinp(inv.out_dir, "sweep.csv"), csv.str());

  PlotOptions po;
  po.title = "stability bound against the pair difference";
  po.x_label = "epsilon";
  po.y_label = "value";
  write_svg(joinp(inv.out_dir, "sweep.svg"), render_line_plot({rhs_series, l1_series}, po));

  json rep;
  rep["command"] = "sweep";
  rep["rows"] = rows;
  rep["constants"] = {{"big_c", ex.constants().big_c},
                      {"small_c", ex.constants().small_c},
                      {"s", ex.constants().s}};
  rep["rng"] = rng_json(inv.seed, "unused");
  rep["outputs"] = json::array({"sweep.csv", "sweep.svg"});
  write_json(joinp(inv.out_dir, "sweep_report.json"), rep);
  return 0;
}

// Read a measurement manifest plus the CSVs it points to.
void load_measurement(const std::string& manifest_path, MeasurementTuple& m, LateralTrace& theta) {
  MeasurementFiles files = read_measurement_manifest(manifest_path);
  const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  auto resolve = [&](const std::string& rel) { return (base / rel).string(); };
  m.t0 = files.t0;
  m.b_left = files.b_left;
  m.b_right = files.b_right;
  m.zeta = read_field_csv(resolve(files.zeta));
  m.psi = read_field_csv(resolve(files.psi));
  m.dt_zeta = read_field_csv(resolve(files.dtzeta));
  theta = read_trace_csv(resolve(files.theta));
}

int cmd_invert(const Experiment& ex, const Invocation& inv) {
  MeasurementTuple m;
  LateralTrace theta;
  const Grid1D window = ex.window();
  bool synthesized = false;
  if (!inv.measurement_path.empty() && std::filesystem::exists(inv.measurement_path)) {
    load_measurement(inv.measurement_path, m, theta);
  } else if (!inv.measurement_path.empty()) {
    throw IoError("measurement manifest not found: " + inv.measurement_path);
  } else {
    // No measurement supplied: generate one from the configured profiles.
    const Grid1D& g = ex.grid();
    ScalarField b = ex.profile("bottom", g);
    WaveState init{0.0, profile_or(ex, "surface", g, 0.0), profile_or(ex, "psi", g, 0.0)};
    SimConfig cfg = ex.sim_config();
    Trajectory traj = simulate(init, b, cfg);
    const double t0 = ex.config().number_or("time", "t0", cfg.t_end);
    Measurement meas = measure(traj, t0, b, window, cfg);
    m = meas.tuple;
    theta = meas.theta;
    synthesized = true;
  }

  InversionOptions opts = ex.inversion_options();
  const Grid1D data_grid = m.zeta.grid();

  ScalarField b_init = ex.has_profile("b_init")
                           ? ex.profile("b_init", data_grid)
                           : ScalarField(data_grid, [&](double x) {
                               const double t = (x - data_grid.a1) / data_grid.length();
                               return m.b_left + t * (m.b_right - m.b_left);
                             });

  // Identifiability probe: the misfit cannot separate bottoms under still
  // water, so a flat landscape across random candidates is flagged.
  InversionOptions probe = opts;
  probe.alpha_reg = 0.0;
  Rng rng(inv.seed, "invert-identifiability");
  bool non_identifiable = false;
  try {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int t = 0; t < 3; ++t) {
      const double a = rng.uniform(-0.05, 0.05), c = rng.uniform(0.3, 0.7);
      ScalarField cand = b_init;
      for (int i = 0; i < cand.size(); ++i) {
        const double x = data_grid.x(i);
        cand[i] = std::min(cand[i] + a * std::exp(-40.0 * (x - c) * (x - c)),
                           m.zeta[i] - opts.depth_floor);
      }
      const double v = misfit(cand, m, theta, probe);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    non_identifiable = (hi - lo) <= 1e-14 * std::max(1.0, hi);
  } catch (const Error&) {
    // The probe is advisory; the inversion below raises the contract error.
  }

  InversionResult res = invert(m, theta, b_init, opts);

  write_field_csv(joinp(inv.out_dir, "b_est.csv"), res.b_est);

  PlotSeries hist{"misfit", {}, {}, ""};
  for (size_t i = 0; i < res.misfit_history.size(); ++i) {
    hist.x.push_back(static_cast<double>(i));
    hist.y.push_back(res.misfit_history[i]);
  }
  PlotOptions po;
  po.title = "inversion convergence";
  po.x_label = "accepted step";
  po.y_label = "misfit";
  po.log_y = true;
  write_svg(joinp(inv.out_dir, "convergence.svg"), render_line_plot({hist}, po));

  json rep;
  rep["command"] = "invert";
  rep["converged"] = res.converged;
  rep["iterations"] = res.iterations;
  rep["stop_reason"] = res.stop_reason;
  rep["misfit_history"] = res.misfit_history;
  rep["non_identifiable"] = non_identifiable;
  rep["synthesized_measurement"] = synthesized;
  rep["window"] = grid_json(data_grid);
  if (ex.has_profile("bottom")) {
    ScalarField truth = ex.profile("bottom", ex.grid());
    const double l1 = l1_error(res.b_est, restrict_to_window(truth, data_grid));
    rep["l1_error"] = l1;
    res.l1_error_vs_truth = l1;
  }
  rep["options"] = {{"alpha_reg", opts.alpha_reg}, {"max_iters", opts.max_iters},
                    {"grad_tol", opts.grad_tol},   {"depth_floor", opts.depth_floor},
                    {"n_sigma", opts.n_sigma},     {"memory", opts.memory}};
  rep["rng"] = rng_json(inv.seed, "invert-identifiability");
  rep["outputs"] = json::array({"b_est.csv", "convergence.svg"});
  write_json(joinp(inv.out_dir, "inversion.json"), rep);

  std::cout << "stop " << res.stop_reason << " after " << res.iterations << " iterations"
            << (non_identifiable ? " (non-identifiable data)" : "") << "\n";
  return 0;
}

int cmd_verify(const Experiment& ex, const Invocation& inv) {
  CheckOptions opts;
  opts.seed = inv.seed;
  opts.n = ex.window().n;
  opts.n_sigma = ex.n_sigma();
  opts.solver = ex.solver();
  if (opts.n < 17)
    std::cout << "warning: grid has only " << opts.n
              << " nodes; checks run but their bounds expect finer resolution\n";

  std::vector<CheckResult> results = verify_suite(opts);
  bool all_pass = true;
  json rows = json::array();
  for (const CheckResult& r : results) {
    std::cout << format_check_line(r) << "\n";
    all_pass = all_pass && r.pass;
    rows.push_back(json{{"name", r.name},
                        {"pass", r.pass},
                        {"observed", r.observed},
                        {"bound", r.bound},
                        {"detail", r.detail}});
  }
  json rep;
  rep["command"] = "verify";
  rep["all_pass"] = all_pass;
  rep["checks"] = rows;
  rep["rng"] = rng_json(opts.seed, "verify");
  write_json(joinp(inv.out_dir, "verify_report.json"), rep);
  std::cout << (all_pass ? "all checks passed" : "verification failed") << "\n";
  return all_pass ? 0 : 1;
}

int dispatch(const std::string& cmd, const Invocation& inv) {
  std::filesystem::create_directories(inv.out_dir);
  Experiment ex(ExperimentConfig::parse_file(inv.config_path));
  if (cmd == "simulate") return cmd_simulate(ex, inv);
  if (cmd == "measure") return cmd_measure(ex, inv);
  if (cmd == "solve") return cmd_solve(ex, inv);
  if (cmd == "certify") return cmd_certify(ex, inv);
  if (cmd == "sweep") return cmd_sweep(ex, inv);
  if (cmd == "invert") return cmd_invert(ex, inv);
  if (cmd == "verify") return cmd_verify(ex, inv);
  throw ConfigError("unknown command " + cmd);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"water-wave bathymetry: simulation, stability certificates, and recovery"};
  app.fallthrough();
  Invocation inv;
  app.add_option("--config", inv.config_path, "experiment config file")->required();
  app.add_option("--out", inv.out_dir, "output directory (created if missing)");
  app.add_option("--seed", inv.seed, "seed for randomized checks");
  app.add_option("--threads", inv.threads, "worker thread cap");

  const std::vector<std::string> names = {"simulate", "measure", "solve", "certify",
                                          "invert",   "verify",  "sweep"};
  const std::vector<std::string> descs = {
      "run the surface evolution and write the trajectory",
      "simulate, then export the boundary data tuple over the window",
      "one potential solve from the configured profiles",
      "stability certificate for the configured pair",
      "recover the bottom from a measurement",
      "run the built-in oracle suite",
      "certificate sweep over the configured epsilon ladder"};
  for (size_t i = 0; i < names.size(); ++i) app.add_subcommand(names[i], descs[i]);
  app.require_subcommand(1);
  app.get_subcommand("invert")
      ->add_option("--measurement", inv.measurement_path,
                   "measurement manifest (default: synthesize from profiles)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), inv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const IdenticalPair& e) {
    std::cerr << "identical pair: " << e.what() << "\n";
    return 4;
  } catch (const SmallnessViolated& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 5;
  } catch (const PairIncompatible& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 5;
  } catch (const PointTooNearBoundary& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 5;
  } catch (const ZeroEnergy& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 5;
  } catch (const InfeasibleInit& e) {
    std::cerr << "infeasible start: " << e.what() << "\n";
    return 6;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("seabed");
  for (const std::string& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace seabed::cli
