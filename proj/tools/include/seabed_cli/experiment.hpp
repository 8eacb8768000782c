#pragma once

#include <cstdint>
#include <string>

#include "seabed/certificate.hpp"
#include "seabed/config.hpp"
#include "seabed/field.hpp"
#include "seabed/geometry.hpp"
#include "seabed/inversion.hpp"
#include "seabed/waves.hpp"

namespace seabed::cli {

// Typed view of an ExperimentConfig: the mother grid, the observation window,
// physics and solver knobs, and the profile expressions sampled on demand.
class Experiment {
public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const Grid1D& grid() const { return grid_; }
  Grid1D window() const;  // [window] section, defaulting to the whole grid
  int n_sigma() const { return n_sigma_; }
  double gravity() const { return gravity_; }
  double depth_floor() const { return depth_floor_; }
  SolverOptions solver() const { return solver_; }

  bool has_profile(const std::string& key) const;
  // Samples the [profiles] expression on the given grid; every value must be
  // finite.
  ScalarField profile(const std::string& key, const Grid1D& g) const;

  SimConfig sim_config() const;
  ConfigConstants constants() const;
  InversionOptions inversion_options() const;

private:
  ExperimentConfig cfg_;
  Grid1D grid_;
  int n_sigma_ = 33;
  double gravity_ = 9.81;
  double depth_floor_ = 0.1;
  SolverOptions solver_;
};

// Window data for one side of a comparison pair: the wall traces come from a
// periodic solve over the full mother grid, restricted to the window columns.
struct WindowSide {
  FluidDomainSpec domain;
  ScalarField psi;
  LateralTrace theta;
};

WindowSide window_side(const Grid1D& mother, const Grid1D& window, const ScalarField& bottom,
                       const ScalarField& surface, const ScalarField& psi, double h0, int n_sigma,
                       const SolverOptions& solver);

// Pair of window configurations from the [profiles] expressions. eps scales
// the difference between the reference profiles and the primary ones:
// f0_eps = f + eps * (f0 - f).
PairConfiguration config_pair(const Experiment& ex, double eps);

}  // namespace seabed::cli
