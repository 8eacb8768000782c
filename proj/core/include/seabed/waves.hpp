#pragma once

#include <utility>
#include <vector>

#include "seabed/elliptic.hpp"
#include "seabed/field.hpp"
#include "seabed/geometry.hpp"

namespace seabed {

// Free-surface state at one instant: elevation and the surface potential
// trace, both on the mother grid.
struct WaveState {
  double t = 0.0;
  ScalarField zeta;
  ScalarField psi;
};

struct SimConfig {
  double g = 9.81;
  double dt = 1e-2;
  double t_end = 1.0;
  double depth_floor = 0.1;  // abort when zeta - b dips under this
  int n_sigma = 33;
  LateralPolicy lateral = LateralPolicy::periodic;
  double mother_factor = 1.0;  // window length multiple covered by this grid
  SolverOptions solver;
  // The continuous flow conserves the surface mean exactly; projecting the
  // discrete rate keeps the invariant at roundoff instead of O(spacing^2).
  bool conserve_mean = true;
};

// Time derivatives (dzeta/dt, dpsi/dt) of the surface system.
std::pair<ScalarField, ScalarField> rhs(const WaveState& s, const ScalarField& b,
                                        const SimConfig& cfg);

WaveState step_rk4(const WaveState& s, const ScalarField& b, const SimConfig& cfg);

struct Trajectory {
  std::vector<WaveState> states;  // includes the initial state
  double dt = 0.0;
};

Trajectory simulate(const WaveState& init, const ScalarField& b, const SimConfig& cfg);

// Boundary data gathered at one instant over an observation window.
struct MeasurementTuple {
  double t0 = 0.0;
  double b_left = 0.0;   // bottom heights under the window edges
  double b_right = 0.0;
  ScalarField zeta;
  ScalarField dt_zeta;
  ScalarField psi;
};

struct Measurement {
  MeasurementTuple tuple;
  LateralTrace theta;  // wall potential from the mother solve
  int n_sigma = 0;
};

// Restrict the trajectory state nearest to t0 onto the window (whose nodes
// must be a subset of the mother nodes) and export the wall traces.
Measurement measure(const Trajectory& traj, double t0, const ScalarField& b,
                    const Grid1D& window, const SimConfig& cfg);

// Node index of the window start in the mother grid; throws when the window
// nodes do not line up with mother nodes.
int window_offset(const Grid1D& mother, const Grid1D& window);

ScalarField restrict_to_window(const ScalarField& f, const Grid1D& window);

}  // namespace seabed
