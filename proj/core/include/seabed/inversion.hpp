#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seabed/elliptic.hpp"
#include "seabed/field.hpp"
#include "seabed/waves.hpp"

namespace seabed {

struct InversionOptions {
  double alpha_reg = 1e-8;   // penalty weight on the bottom curvature
  int max_iters = 200;
  double grad_tol = 1e-12;   // stop when the gradient sup-norm drops below
  double step_init = 1.0;    // first trial step of the first iteration
  double fd_step = 1e-6;     // step for the finite-difference gradient oracle
  double depth_floor = 0.1;  // minimum water column under the measured surface
  int n_sigma = 33;          // vertical layers of the candidate solves
  int memory = 8;            // limited-memory curvature pairs
  SolverOptions solver;
};

struct InversionResult {
  ScalarField b_est;
  std::vector<double> misfit_history;  // initial value plus one entry per accepted step
  std::optional<double> l1_error_vs_truth;
  bool converged = false;
  int iterations = 0;
  std::string stop_reason;  // "converged", "max_iters", "line_search_failure"
};

// Kinematic data misfit: half the squared L2 distance between the surface
// flux produced by the candidate bottom and the measured surface velocity,
// plus half the weighted squared curvature of the candidate.
double misfit(const ScalarField& b_candidate, const MeasurementTuple& m, const LateralTrace& theta,
              const InversionOptions& opts);

// Gradient of the misfit with respect to the bottom nodes, by the discrete
// adjoint of the strip solve: one extra solve with the transposed operator,
// plus per-node differencing of the assembled stencils applied to the fixed
// solution. Endpoint nodes are pinned by the measured values and carry zero
// gradient.
ScalarField gradient(const ScalarField& b_candidate, const MeasurementTuple& m,
                     const LateralTrace& theta, const InversionOptions& opts);

// Central-difference gradient over the interior nodes: the slow oracle the
// adjoint gradient is checked against. Costs two solves per node.
ScalarField fd_gradient(const ScalarField& b_candidate, const MeasurementTuple& m,
                        const LateralTrace& theta, const InversionOptions& opts);

// Projected limited-memory quasi-Newton descent from b_init. Every iterate
// keeps the water column at least depth_floor thick and the endpoints pinned
// to the measured wall values; the recorded misfits never increase.
InversionResult invert(const MeasurementTuple& m, const LateralTrace& theta,
                       const ScalarField& b_init, const InversionOptions& opts);

// Trapezoid quadrature of |b1 - b2| over the window.
double l1_error(const ScalarField& b1, const ScalarField& b2);

}  // namespace seabed
