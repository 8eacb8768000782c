#include "seabed_cli/experiment.hpp"

#include <cmath>

#include "seabed/errors.hpp"
#include "seabed/expr.hpp"

namespace seabed::cli {

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
  grid_ = Grid1D{cfg_.number("grid", "a1"), cfg_.number("grid", "a2"), cfg_.integer("grid", "n")};
  n_sigma_ = cfg_.integer_or("grid", "n_sigma", 33);
  if (n_sigma_ < 4) throw ConfigError("grid.n_sigma must be at least 4");
  gravity_ = cfg_.number_or("physics", "gravity", 9.81);
  depth_floor_ = cfg_.number_or("physics", "depth_floor", 0.1);
  if (!(depth_floor_ > 0.0)) throw ConfigError("physics.depth_floor must be positive");
  const std::string method = cfg_.get_or("physics", "solver_method", "direct");
  if (method == "direct") {
    solver_.method = SolverOptions::Method::direct;
  } else if (method == "bicgstab") {
    solver_.method = SolverOptions::Method::bicgstab;
  } else {
    throw ConfigError("physics.solver_method must be direct or bicgstab, got '" + method + "'");
  }
  solver_.tol = cfg_.number_or("physics", "solver_tol", 1e-10);
  solver_.max_iters = cfg_.integer_or("physics", "solver_max_iters", 4000);
}

Grid1D Experiment::window() const {
  if (!cfg_.has("window", "a1") && !cfg_.has("window", "a2")) return grid_;
  const double a1 = cfg_.number("window", "a1");
  const double a2 = cfg_.number("window", "a2");
  // Window nodes must be mother nodes: infer the count from the spacing.
  const double h = grid_.spacing();
  const double len = a2 - a1;
  if (!(len > 0.0)) throw ConfigError("window.a2 must exceed window.a1");
  const int cells = static_cast<int>(std::llround(len / h));
  Grid1D w{a1, a2, cells + 1};
  window_offset(grid_, w);  // validates alignment
  return w;
}

bool Experiment::has_profile(const std::string& key) const { return cfg_.has("profiles", key); }

ScalarField Experiment::profile(const std::string& key, const Grid1D& g) const {
  const std::string text = cfg_.get("profiles", key);
  Expression e = Expression::parse(text);
  ScalarField f(g);
  for (int i = 0; i < g.n; ++i) {
    const double v = e(g.x(i));
    if (!std::isfinite(v))
      throw ConfigError("profiles." + key + " evaluates to a non-finite value at X = " +
                        std::to_string(g.x(i)));
    f[i] = v;
  }
  return f;
}

SimConfig Experiment::sim_config() const {
  SimConfig sc;
  sc.g = gravity_;
  sc.dt = cfg_.number_or("time", "dt", 1e-2);
  sc.t_end = cfg_.number_or("time", "t_end", 1.0);
  sc.depth_floor = depth_floor_;
  sc.n_sigma = n_sigma_;
  sc.solver = solver_;
  sc.conserve_mean = cfg_.flag_or("physics", "conserve_mean", true);
  if (!(sc.dt > 0.0)) throw ConfigError("time.dt must be positive");
  return sc;
}

ConfigConstants Experiment::constants() const {
  ConfigConstants cc;
  cc.big_c = cfg_.number_or("certificate", "c_big", cc.big_c);
  cc.small_c = cfg_.number_or("certificate", "c_small", cc.small_c);
  cc.s = cfg_.number_or("certificate", "s", cc.s);
  validate_constants(cc);
  return cc;
}

InversionOptions Experiment::inversion_options() const {
  InversionOptions io;
  io.alpha_reg = cfg_.number_or("inversion", "alpha", io.alpha_reg);
  io.max_iters = cfg_.integer_or("inversion", "max_iters", io.max_iters);
  io.grad_tol = cfg_.number_or("inversion", "grad_tol", io.grad_tol);
  io.fd_step = cfg_.number_or("inversion", "fd_step", io.fd_step);
  io.memory = cfg_.integer_or("inversion", "lbfgs_memory", io.memory);
  io.depth_floor = depth_floor_;
  io.n_sigma = n_sigma_;
  io.solver = solver_;
  return io;
}

WindowSide window_side(const Grid1D& mother, const Grid1D& window, const ScalarField& bottom,
                       const ScalarField& surface, const ScalarField& psi, double h0, int n_sigma,
                       const SolverOptions& solver) {
  FluidDomainSpec md = build_domain(bottom, surface, h0);
  PotentialField phi = solve_potential_periodic(md, psi, n_sigma, solver);
  const int i0 = window_offset(mother, window);
  const int i1 = i0 + window.n - 1;
  WindowSide side;
  side.theta.left.resize(static_cast<size_t>(n_sigma));
  side.theta.right.resize(static_cast<size_t>(n_sigma));
  for (int j = 0; j < n_sigma; ++j) {
    side.theta.left[static_cast<size_t>(j)] = phi.u(i0, j);
    side.theta.right[static_cast<size_t>(j)] = phi.u(i1, j);
  }
  side.domain = build_domain(restrict_to_window(bottom, window),
                             restrict_to_window(surface, window), h0);
  side.psi = restrict_to_window(psi, window);
  return side;
}

PairConfiguration config_pair(const Experiment& ex, double eps) {
  const Grid1D& mother = ex.grid();
  const Grid1D window = ex.window();
  const ScalarField b = ex.profile("bottom", mother);
  const ScalarField z = ex.profile("surface", mother);
  const ScalarField p = ex.profile("psi", mother);
  ScalarField b0 = ex.has_profile("bottom0") ? ex.profile("bottom0", mother) : b;
  ScalarField z0 = ex.has_profile("surface0") ? ex.profile("surface0", mother) : z;
  ScalarField p0 = ex.has_profile("psi0") ? ex.profile("psi0", mother) : p;
  b0 = b + eps * (b0 - b);
  z0 = z + eps * (z0 - z);
  p0 = p + eps * (p0 - p);

  const double h0 = ex.depth_floor();
  WindowSide s = window_side(mother, window, b, z, p, h0, ex.n_sigma(), ex.solver());
  WindowSide s0 = window_side(mother, window, b0, z0, p0, h0, ex.n_sigma(), ex.solver());
  PairOptions opts;
  opts.n_sigma = ex.n_sigma();
  opts.solver = ex.solver();
  opts.decomposition.refine = ex.config().integer_or("certificate", "raster_refine", 8);
  return make_pair(s.domain, s.psi, s.theta, s0.domain, s0.psi, s0.theta, opts);
}

}  // namespace seabed::cli
