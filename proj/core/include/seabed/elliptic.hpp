#pragma once

#include <Eigen/SparseCore>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "seabed/field.hpp"
#include "seabed/geometry.hpp"

namespace seabed {

enum class LateralPolicy { dirichlet, periodic };

// Dirichlet data on the two wall segments, sampled on the sigma layers of
// the solve (index 0 at the bottom, n_sigma-1 at the surface).
struct LateralTrace {
  std::vector<double> left;
  std::vector<double> right;
};

// Terrain-following vertical map y(X, sigma) = b(X) + sigma * (zeta(X) - b(X))
// on a tensor grid: the window nodes in X, n_sigma uniform layers in sigma.
struct SigmaMap {
  ScalarField bottom;
  ScalarField surface;
  int n_sigma = 2;

  const Grid1D& grid() const { return bottom.grid(); }
  double dsigma() const { return 1.0 / (n_sigma - 1); }
  double sigma(int j) const { return j * dsigma(); }
  double depth(int i) const { return surface[i] - bottom[i]; }
  double y(int i, int j) const { return bottom[i] + sigma(j) * depth(i); }
};

struct SolverOptions {
  enum class Method { direct, bicgstab };
  Method method = Method::direct;
  double tol = 1e-10;   // required relative residual
  int max_iters = 4000; // iterative cap
};

struct SolverDiagnostics {
  double residual = 0.0;
  int iterations = 0;
  int nx = 0;
  int n_sigma = 0;
  std::string method;
};

// Discrete velocity potential on a SigmaMap. Carries lazily built physical
// derivative grids and bilinear interpolation in (X, sigma).
class PotentialField {
public:
  PotentialField() = default;
  PotentialField(SigmaMap map, std::vector<double> values, LateralPolicy policy);

  static PotentialField from_function(SigmaMap map,
                                      const std::function<double(double, double)>& f,
                                      LateralPolicy policy = LateralPolicy::dirichlet);

  const SigmaMap& map() const { return map_; }
  LateralPolicy policy() const { return policy_; }
  int nx() const { return map_.grid().n; }
  int ns() const { return map_.n_sigma; }
  double u(int i, int j) const { return v_[static_cast<size_t>(j) * nx() + i]; }
  const std::vector<double>& values() const { return v_; }

  // Interpolated point evaluations of the potential and its physical
  // derivatives; (x, y) must lie inside the strip up to a small slack.
  double value_at(double x, double y) const;
  double dx_at(double x, double y) const;
  double dy_at(double x, double y) const;
  double dxx_at(double x, double y) const;
  double dxy_at(double x, double y) const;
  double dyy_at(double x, double y) const;

  // Physical derivative grids on the (X, sigma) nodes.
  const std::vector<double>& grid_dx() const;
  const std::vector<double>& grid_dy() const;
  const std::vector<double>& grid_dxx() const;
  const std::vector<double>& grid_dxy() const;
  const std::vector<double>& grid_dyy() const;

  // Sobolev norm with all derivatives through second order over the full
  // strip.
  double h2_norm() const;

private:
  struct Cache;
  double interp(const std::vector<double>& g, double x, double y) const;
  void locate(double x, double y, int& i, double& tx, int& j, double& ts) const;

  SigmaMap map_;
  std::vector<double> v_;
  LateralPolicy policy_ = LateralPolicy::dirichlet;
  mutable std::shared_ptr<Cache> cache_;  // lazy derivative grids
};

// Laplace solve on the strip: Dirichlet psi on the surface, zero conormal
// flux on the bottom, walls per policy (Dirichlet theta, or periodic with
// the seam column duplicating the first).
PotentialField solve_potential(const FluidDomainSpec& dom, const ScalarField& psi,
                               const LateralTrace& theta, int n_sigma,
                               const SolverOptions& opts = {},
                               SolverDiagnostics* diag = nullptr);

PotentialField solve_potential_periodic(const FluidDomainSpec& dom, const ScalarField& psi,
                                        int n_sigma, const SolverOptions& opts = {},
                                        SolverDiagnostics* diag = nullptr);

// Low-level access to the wall-Dirichlet discretization, for adjoint-based
// gradients. Unknowns are ordered layer by layer: index j * n + i for column
// i and sigma layer j. The assembled matrix and right-hand side reproduce
// the system solved by solve_potential exactly.
struct AssembledSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
};
AssembledSystem assemble_system(const FluidDomainSpec& dom, const ScalarField& psi,
                                const LateralTrace& theta, int n_sigma);

// Matrix-free application A(dom) u - rhs on the same discretization, built
// from the identical stencils; cheap enough to difference per bottom node.
Eigen::VectorXd apply_operator(const FluidDomainSpec& dom, const ScalarField& psi,
                               const LateralTrace& theta, int n_sigma,
                               const Eigen::VectorXd& u);

// Residual f - A u (transpose: f - A^T u) accumulated in extended precision.
// A double-precision product rounds at eps * |A| |u|, which on thin
// anisotropic strips exceeds the solver tolerance; the extra digits keep the
// residual check measurable and let refinement actually converge.
Eigen::VectorXd extended_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& f, bool transpose = false);

// Surface extraction sqrt(1 + zeta'^2) * dn(phi) at the top layer.
ScalarField dno(const PotentialField& phi);

// Traces along a surface curve: the potential value, the two components of
// its gradient, and the unit normal derivative.
struct SurfaceTraces {
  ScalarField value;
  ScalarField grad_x;
  ScalarField grad_y;
  ScalarField normal;  // unit outward normal derivative on the curve
};

// Traces on the potential's own surface, read from the top layers.
SurfaceTraces surface_traces(const PotentialField& phi);

// Algebraic reconstruction of the surface traces from boundary data alone:
// psi, the surface, and the unit normal derivative on it.
SurfaceTraces traces_from_measurements(const ScalarField& psi, const ScalarField& zeta,
                                       const ScalarField& normal_deriv, bool periodic = false);

// Dirichlet energy over the full strip.
double energy(const PotentialField& phi);
// Dirichlet energy over {(X, y) : lo(X) < y < hi(X)}, which must sit inside
// the solved strip.
double energy(const PotentialField& phi, const ScalarField& lo, const ScalarField& hi);

// \int f g along the graph of `curve` with the arc-length metric.
double graph_integral(const ScalarField& curve, const ScalarField& f, const ScalarField& g);
double arc_length(const ScalarField& curve);

// \int f g over a vertical wall segment sampled uniformly in y.
double wall_integral(double y0, double y1, const std::vector<double>& f,
                     const std::vector<double>& g);

}  // namespace seabed
