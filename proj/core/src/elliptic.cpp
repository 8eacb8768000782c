#include "seabed/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <string>

#include "seabed/errors.hpp"

namespace seabed {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

std::vector<double> first_derivative(const std::vector<double>& f, double h, bool periodic) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(static_cast<size_t>(n));
  if (periodic) {
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      d[static_cast<size_t>(i)] =
          (f[static_cast<size_t>(ip)] - f[static_cast<size_t>(im)]) / (2.0 * h);
    }
    return d;
  }
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i)
    d[static_cast<size_t>(i)] =
        (f[static_cast<size_t>(i) + 1] - f[static_cast<size_t>(i) - 1]) / (2.0 * h);
  d[static_cast<size_t>(n) - 1] =
      (3.0 * f[static_cast<size_t>(n) - 1] - 4.0 * f[static_cast<size_t>(n) - 2] +
       f[static_cast<size_t>(n) - 3]) /
      (2.0 * h);
  return d;
}

std::vector<double> second_derivative(const std::vector<double>& f, double h, bool periodic) {
  const int n = static_cast<int>(f.size());
  const double h2 = h * h;
  std::vector<double> d(static_cast<size_t>(n));
  if (periodic) {
    for (int i = 0; i < n; ++i) {
      const int ip = (i + 1) % n, im = (i + n - 1) % n;
      d[static_cast<size_t>(i)] = (f[static_cast<size_t>(ip)] - 2.0 * f[static_cast<size_t>(i)] +
                                   f[static_cast<size_t>(im)]) /
                                  h2;
    }
    return d;
  }
  for (int i = 1; i + 1 < n; ++i)
    d[static_cast<size_t>(i)] = (f[static_cast<size_t>(i) + 1] - 2.0 * f[static_cast<size_t>(i)] +
                                 f[static_cast<size_t>(i) - 1]) /
                                h2;
  if (n >= 5) {
    d[0] = (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4]) / (12.0 * h2);
    d[static_cast<size_t>(n) - 1] = (35.0 * f[static_cast<size_t>(n) - 1] -
                                     104.0 * f[static_cast<size_t>(n) - 2] +
                                     114.0 * f[static_cast<size_t>(n) - 3] -
                                     56.0 * f[static_cast<size_t>(n) - 4] +
                                     11.0 * f[static_cast<size_t>(n) - 5]) /
                                    (12.0 * h2);
  } else {
    d[0] = d[1];
    d[static_cast<size_t>(n) - 1] = d[static_cast<size_t>(n) - 2];
  }
  return d;
}

// Column-wise profile data for the transformed Laplacian.
struct StripGeometry {
  int m = 0;  // independent columns
  double hx = 0.0, hs = 0.0;
  int ns = 0;
  bool periodic = false;
  std::vector<double> h, bp, hp, bpp, hpp;

  double alpha(int i, double sigma) const {
    return -(bp[static_cast<size_t>(i)] + sigma * hp[static_cast<size_t>(i)]) /
           h[static_cast<size_t>(i)];
  }
  double alpha_x(int i, double sigma) const {
    return -(bpp[static_cast<size_t>(i)] + sigma * hpp[static_cast<size_t>(i)]) /
               h[static_cast<size_t>(i)] +
           (bp[static_cast<size_t>(i)] + sigma * hp[static_cast<size_t>(i)]) *
               hp[static_cast<size_t>(i)] /
               (h[static_cast<size_t>(i)] * h[static_cast<size_t>(i)]);
  }
  double alpha_sigma(int i) const {
    return -hp[static_cast<size_t>(i)] / h[static_cast<size_t>(i)];
  }
  double beta(int i) const { return 1.0 / h[static_cast<size_t>(i)]; }
};

StripGeometry make_geometry(const FluidDomainSpec& dom, int n_sigma, bool periodic) {
  const Grid1D g = dom.grid();
  StripGeometry sg;
  sg.periodic = periodic;
  sg.m = periodic ? g.n - 1 : g.n;
  sg.ns = n_sigma;
  sg.hx = g.spacing();
  sg.hs = 1.0 / (n_sigma - 1);
  std::vector<double> b(static_cast<size_t>(sg.m)), h(static_cast<size_t>(sg.m));
  for (int i = 0; i < sg.m; ++i) {
    b[static_cast<size_t>(i)] = dom.bottom[i];
    h[static_cast<size_t>(i)] = dom.surface[i] - dom.bottom[i];
  }
  sg.h = h;
  sg.bp = first_derivative(b, sg.hx, periodic);
  sg.hp = first_derivative(h, sg.hx, periodic);
  sg.bpp = second_derivative(b, sg.hx, periodic);
  sg.hpp = second_derivative(h, sg.hx, periodic);
  return sg;
}

void check_periodic_seam(const ScalarField& f, const char* what) {
  const double scale = std::max(1.0, f.linf());
  if (std::abs(f[0] - f[f.size() - 1]) > 1e-9 * scale)
    throw PairIncompatible(std::string("periodic solve: ") + what +
                           " differs at the seam nodes");
}

// Full stencil assembly shared by the solver, the assembled-system access,
// and the matrix-free application. Any change here changes all three.
void build_triplets(const StripGeometry& sg, const ScalarField& psi, const LateralTrace* theta,
                    std::vector<Triplet>& trip, Eigen::VectorXd& f) {
  const bool periodic = sg.periodic;
  const int m = sg.m, ns = sg.ns;
  const double hx = sg.hx, hs = sg.hs;
  const int N = m * ns;
  auto id = [m](int i, int j) { return j * m + i; };

  trip.clear();
  trip.reserve(static_cast<size_t>(N) * 9);
  f = Eigen::VectorXd::Zero(N);

  const int top = ns - 1;
  for (int i = 0; i < m; ++i) {
    trip.emplace_back(id(i, top), id(i, top), 1.0);
    f[id(i, top)] = psi[i];
  }
  if (!periodic) {
    for (int j = 0; j < top; ++j) {
      trip.emplace_back(id(0, j), id(0, j), 1.0);
      f[id(0, j)] = theta->left[static_cast<size_t>(j)];
      trip.emplace_back(id(m - 1, j), id(m - 1, j), 1.0);
      f[id(m - 1, j)] = theta->right[static_cast<size_t>(j)];
    }
  }

  const int i_lo = periodic ? 0 : 1;
  const int i_hi = periodic ? m - 1 : m - 2;

  // Bottom conormal condition: u_sigma = h b' u_X / (1 + b'^2) at sigma = 0,
  // one-sided in sigma and centered in X.
  for (int i = i_lo; i <= i_hi; ++i) {
    const int ip = periodic ? (i + 1) % m : i + 1;
    const int im = periodic ? (i + m - 1) % m : i - 1;
    const double bp = sg.bp[static_cast<size_t>(i)];
    const double c = sg.h[static_cast<size_t>(i)] * bp / (1.0 + bp * bp);
    const int r = id(i, 0);
    trip.emplace_back(r, id(i, 0), -3.0 / (2.0 * hs));
    trip.emplace_back(r, id(i, 1), 4.0 / (2.0 * hs));
    trip.emplace_back(r, id(i, 2), -1.0 / (2.0 * hs));
    trip.emplace_back(r, id(ip, 0), -c / (2.0 * hx));
    trip.emplace_back(r, id(im, 0), c / (2.0 * hx));
  }

  // Transformed Laplacian:
  //   u_XX + 2 a u_Xs + (a^2 + b^2) u_ss + (a_X + a a_s) u_s = 0.
  for (int j = 1; j < top; ++j) {
    const double sigma = j * hs;
    for (int i = i_lo; i <= i_hi; ++i) {
      const int ip = periodic ? (i + 1) % m : i + 1;
      const int im = periodic ? (i + m - 1) % m : i - 1;
      const double a = sg.alpha(i, sigma);
      const double bt = sg.beta(i);
      const double drift = sg.alpha_x(i, sigma) + a * sg.alpha_sigma(i);
      const double cxx = 1.0 / (hx * hx);
      const double css = (a * a + bt * bt) / (hs * hs);
      const double cxs = a / (2.0 * hx * hs);
      const double cs = drift / (2.0 * hs);
      const int r = id(i, j);
      trip.emplace_back(r, id(i, j), -2.0 * cxx - 2.0 * css);
      trip.emplace_back(r, id(ip, j), cxx);
      trip.emplace_back(r, id(im, j), cxx);
      trip.emplace_back(r, id(i, j + 1), css + cs);
      trip.emplace_back(r, id(i, j - 1), css - cs);
      trip.emplace_back(r, id(ip, j + 1), cxs);
      trip.emplace_back(r, id(im, j - 1), cxs);
      trip.emplace_back(r, id(ip, j - 1), -cxs);
      trip.emplace_back(r, id(im, j + 1), -cxs);
    }
  }
}

void check_dirichlet_inputs(const FluidDomainSpec& dom, const ScalarField& psi,
                            const LateralTrace* theta, int n_sigma, bool periodic) {
  require_same_grid(dom.grid(), psi.grid(), "solve_potential");
  if (n_sigma < 4) throw ConfigError("solve_potential: need at least 4 sigma layers");
  if (periodic) {
    check_periodic_seam(dom.bottom, "bottom");
    check_periodic_seam(dom.surface, "surface");
    check_periodic_seam(psi, "psi");
  } else {
    if (theta == nullptr || static_cast<int>(theta->left.size()) != n_sigma ||
        static_cast<int>(theta->right.size()) != n_sigma)
      throw ConfigError("solve_potential: wall trace must be sampled on the sigma layers");
  }
}

PotentialField solve_strip(const FluidDomainSpec& dom, const ScalarField& psi,
                           const LateralTrace* theta, int n_sigma, LateralPolicy policy,
                           const SolverOptions& opts, SolverDiagnostics* diag) {
  const bool periodic = policy == LateralPolicy::periodic;
  check_dirichlet_inputs(dom, psi, theta, n_sigma, periodic);
  const Grid1D g = dom.grid();

  const StripGeometry sg = make_geometry(dom, n_sigma, periodic);
  const int m = sg.m, ns = sg.ns;
  const int N = m * ns;
  auto id = [m](int i, int j) { return j * m + i; };

  std::vector<Triplet> trip;
  Eigen::VectorXd f;
  build_triplets(sg, psi, theta, trip, f);

  SpMat A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::VectorXd u;
  int iterations = 1;
  std::string method;
  if (opts.method == SolverOptions::Method::direct) {
    method = "direct";
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
      throw SolverDivergence("solve_potential: factorization failed");
    u = lu.solve(f);
    // Refinement recovers the digits the factorization loses on the
    // anisotropic sigma coupling of thin columns.
    const double fn0 = std::max(f.norm(), 1e-300);
    for (int pass = 0; pass < 3; ++pass) {
      const Eigen::VectorXd r = extended_residual(A, u, f);
      if (r.norm() / fn0 <= 0.5 * opts.tol) break;
      u += lu.solve(r);
    }
  } else {
    method = "bicgstab";
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(opts.tol);
    it.setMaxIterations(opts.max_iters);
    it.compute(A);
    u = it.solve(f);
    iterations = static_cast<int>(it.iterations());
  }

  const double fn = f.norm();
  const double rn = extended_residual(A, u, f).norm();
  const double rel = fn > 0.0 ? rn / fn : rn;
  if (diag != nullptr) {
    diag->residual = rel;
    diag->iterations = iterations;
    diag->nx = g.n;
    diag->n_sigma = ns;
    diag->method = method;
  }
  if (!(rel <= opts.tol) || !std::isfinite(rel))
    throw SolverDivergence("solve_potential: relative residual " + std::to_string(rel) +
                           " above tolerance " + std::to_string(opts.tol));

  // Expand to the full node grid (periodic seam column duplicates column 0).
  std::vector<double> out(static_cast<size_t>(g.n) * ns);
  for (int j = 0; j < ns; ++j)
    for (int i = 0; i < g.n; ++i)
      out[static_cast<size_t>(j) * g.n + i] = u[id(periodic ? i % m : i, j)];

  // Stamp the boundary data exactly: factorization roundoff otherwise leaves
  // O(kappa * eps) residue on rows whose values are prescribed, and the surface
  // trace algebra downstream relies on the top layer matching psi bit for bit.
  for (int i = 0; i < g.n; ++i) out[static_cast<size_t>(ns - 1) * g.n + i] = psi[i];
  if (!periodic && theta != nullptr) {
    for (int j = 0; j + 1 < ns; ++j) {
      out[static_cast<size_t>(j) * g.n] = theta->left[j];
      out[static_cast<size_t>(j) * g.n + g.n - 1] = theta->right[j];
    }
  }

  SigmaMap map{dom.bottom, dom.surface, n_sigma};
  return PotentialField(std::move(map), std::move(out), policy);
}

}  // namespace

PotentialField solve_potential(const FluidDomainSpec& dom, const ScalarField& psi,
                               const LateralTrace& theta, int n_sigma, const SolverOptions& opts,
                               SolverDiagnostics* diag) {
  return solve_strip(dom, psi, &theta, n_sigma, LateralPolicy::dirichlet, opts, diag);
}

PotentialField solve_potential_periodic(const FluidDomainSpec& dom, const ScalarField& psi,
                                        int n_sigma, const SolverOptions& opts,
                                        SolverDiagnostics* diag) {
  return solve_strip(dom, psi, nullptr, n_sigma, LateralPolicy::periodic, opts, diag);
}

AssembledSystem assemble_system(const FluidDomainSpec& dom, const ScalarField& psi,
                                const LateralTrace& theta, int n_sigma) {
  check_dirichlet_inputs(dom, psi, &theta, n_sigma, false);
  const StripGeometry sg = make_geometry(dom, n_sigma, false);
  std::vector<Triplet> trip;
  AssembledSystem sys;
  build_triplets(sg, psi, &theta, trip, sys.rhs);
  const int N = sg.m * sg.ns;
  sys.matrix.resize(N, N);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  sys.matrix.makeCompressed();
  return sys;
}

Eigen::VectorXd apply_operator(const FluidDomainSpec& dom, const ScalarField& psi,
                               const LateralTrace& theta, int n_sigma,
                               const Eigen::VectorXd& u) {
  check_dirichlet_inputs(dom, psi, &theta, n_sigma, false);
  const StripGeometry sg = make_geometry(dom, n_sigma, false);
  const int N = sg.m * sg.ns;
  if (u.size() != N) throw GridMismatch("apply_operator: vector size does not match the grid");
  std::vector<Triplet> trip;
  Eigen::VectorXd f;
  build_triplets(sg, psi, &theta, trip, f);
  Eigen::VectorXd out = -f;
  for (const Triplet& t : trip) out[t.row()] += t.value() * u[t.col()];
  return out;
}

Eigen::VectorXd extended_residual(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& f, bool transpose) {
  std::vector<long double> acc(static_cast<size_t>(f.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) acc[static_cast<size_t>(i)] = f[i];
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      const Eigen::Index row = transpose ? it.col() : it.row();
      const Eigen::Index col = transpose ? it.row() : it.col();
      acc[static_cast<size_t>(row)] -=
          static_cast<long double>(it.value()) * static_cast<long double>(u[col]);
    }
  Eigen::VectorXd r(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) r[i] = static_cast<double>(acc[static_cast<size_t>(i)]);
  return r;
}

// ---------------------------------------------------------------------------
// PotentialField

struct PotentialField::Cache {
  std::vector<double> dx, dy, dxx, dxy, dyy;
};

PotentialField::PotentialField(SigmaMap map, std::vector<double> values, LateralPolicy policy)
    : map_(std::move(map)), v_(std::move(values)), policy_(policy) {
  if (static_cast<int>(v_.size()) != map_.grid().n * map_.n_sigma)
    throw GridMismatch("PotentialField: value count does not match the sigma grid");
}

PotentialField PotentialField::from_function(SigmaMap map,
                                             const std::function<double(double, double)>& f,
                                             LateralPolicy policy) {
  const int nx = map.grid().n, ns = map.n_sigma;
  std::vector<double> v(static_cast<size_t>(nx) * ns);
  for (int j = 0; j < ns; ++j)
    for (int i = 0; i < nx; ++i)
      v[static_cast<size_t>(j) * nx + i] = f(map.grid().x(i), map.y(i, j));
  return PotentialField(std::move(map), std::move(v), policy);
}

namespace {

// sigma-direction first derivative of a layered grid, one-sided at the ends.
void dsigma_grid(const std::vector<double>& u, int nx, int ns, double hs,
                 std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  for (int i = 0; i < nx; ++i) {
    auto at = [&](int j) { return u[static_cast<size_t>(j) * nx + i]; };
    out[static_cast<size_t>(0) * nx + i] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * hs);
    for (int j = 1; j + 1 < ns; ++j)
      out[static_cast<size_t>(j) * nx + i] = (at(j + 1) - at(j - 1)) / (2.0 * hs);
    out[static_cast<size_t>(ns - 1) * nx + i] =
        (3.0 * at(ns - 1) - 4.0 * at(ns - 2) + at(ns - 3)) / (2.0 * hs);
  }
}

void dsigma2_grid(const std::vector<double>& u, int nx, int ns, double hs,
                  std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  const double h2 = hs * hs;
  for (int i = 0; i < nx; ++i) {
    auto at = [&](int j) { return u[static_cast<size_t>(j) * nx + i]; };
    for (int j = 1; j + 1 < ns; ++j)
      out[static_cast<size_t>(j) * nx + i] = (at(j + 1) - 2.0 * at(j) + at(j - 1)) / h2;
    if (ns >= 5) {
      out[i] = (35.0 * at(0) - 104.0 * at(1) + 114.0 * at(2) - 56.0 * at(3) + 11.0 * at(4)) /
               (12.0 * h2);
      out[static_cast<size_t>(ns - 1) * nx + i] =
          (35.0 * at(ns - 1) - 104.0 * at(ns - 2) + 114.0 * at(ns - 3) - 56.0 * at(ns - 4) +
           11.0 * at(ns - 5)) /
          (12.0 * h2);
    } else {
      out[i] = out[static_cast<size_t>(1) * nx + i];
      out[static_cast<size_t>(ns - 1) * nx + i] = out[static_cast<size_t>(ns - 2) * nx + i];
    }
  }
}

// X-direction derivative layer by layer; periodic grids wrap over the
// independent columns and copy the seam.
void dx_grid(const std::vector<double>& u, int nx, int ns, double hx, bool periodic,
             std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  const int m = periodic ? nx - 1 : nx;
  std::vector<double> layer(static_cast<size_t>(m));
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < m; ++i) layer[static_cast<size_t>(i)] = u[static_cast<size_t>(j) * nx + i];
    std::vector<double> d = first_derivative(layer, hx, periodic);
    for (int i = 0; i < m; ++i) out[static_cast<size_t>(j) * nx + i] = d[static_cast<size_t>(i)];
    if (periodic) out[static_cast<size_t>(j) * nx + nx - 1] = d[0];
  }
}

void dx2_grid(const std::vector<double>& u, int nx, int ns, double hx, bool periodic,
              std::vector<double>& out) {
  out.assign(u.size(), 0.0);
  const int m = periodic ? nx - 1 : nx;
  std::vector<double> layer(static_cast<size_t>(m));
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < m; ++i) layer[static_cast<size_t>(i)] = u[static_cast<size_t>(j) * nx + i];
    std::vector<double> d = second_derivative(layer, hx, periodic);
    for (int i = 0; i < m; ++i) out[static_cast<size_t>(j) * nx + i] = d[static_cast<size_t>(i)];
    if (periodic) out[static_cast<size_t>(j) * nx + nx - 1] = d[0];
  }
}

}  // namespace

const std::vector<double>& PotentialField::grid_dx() const {
  if (cache_ && !cache_->dx.empty()) return cache_->dx;
  if (!cache_) cache_ = std::make_shared<Cache>();
  auto& c = cache_;
  const int nx = this->nx(), ns = this->ns();
  const bool periodic = policy_ == LateralPolicy::periodic;
  const double hx = map_.grid().spacing(), hs = map_.dsigma();
  const StripGeometry sg = make_geometry(FluidDomainSpec{map_.bottom, map_.surface, 1.0, 0, 0},
                                         ns, periodic);
  std::vector<double> ux, us;
  dx_grid(v_, nx, ns, hx, periodic, ux);
  dsigma_grid(v_, nx, ns, hs, us);
  c->dx.assign(v_.size(), 0.0);
  c->dy.assign(v_.size(), 0.0);
  for (int j = 0; j < ns; ++j) {
    const double sigma = j * hs;
    for (int i = 0; i < nx; ++i) {
      const int ic = periodic ? i % sg.m : i;
      const size_t k = static_cast<size_t>(j) * nx + i;
      c->dx[k] = ux[k] + sg.alpha(ic, sigma) * us[k];
      c->dy[k] = sg.beta(ic) * us[k];
    }
  }
  return c->dx;
}

const std::vector<double>& PotentialField::grid_dy() const {
  grid_dx();
  return cache_->dy;
}

const std::vector<double>& PotentialField::grid_dxx() const {
  if (cache_ && !cache_->dxx.empty()) return cache_->dxx;
  grid_dx();
  auto& c = cache_;
  const int nx = this->nx(), ns = this->ns();
  const bool periodic = policy_ == LateralPolicy::periodic;
  const double hx = map_.grid().spacing(), hs = map_.dsigma();
  const StripGeometry sg = make_geometry(FluidDomainSpec{map_.bottom, map_.surface, 1.0, 0, 0},
                                         ns, periodic);
  std::vector<double> ux, us, uxx, uss, uxs;
  dx_grid(v_, nx, ns, hx, periodic, ux);
  dsigma_grid(v_, nx, ns, hs, us);
  dx2_grid(v_, nx, ns, hx, periodic, uxx);
  dsigma2_grid(v_, nx, ns, hs, uss);
  dsigma_grid(ux, nx, ns, hs, uxs);
  c->dxx.assign(v_.size(), 0.0);
  c->dxy.assign(v_.size(), 0.0);
  c->dyy.assign(v_.size(), 0.0);
  for (int j = 0; j < ns; ++j) {
    const double sigma = j * hs;
    for (int i = 0; i < nx; ++i) {
      const int ic = periodic ? i % sg.m : i;
      const size_t k = static_cast<size_t>(j) * nx + i;
      const double a = sg.alpha(ic, sigma);
      const double bt = sg.beta(ic);
      const double bx = -sg.hp[static_cast<size_t>(ic)] * bt * bt;  // d(1/h)/dX
      c->dxx[k] = uxx[k] + 2.0 * a * uxs[k] + a * a * uss[k] +
                  (sg.alpha_x(ic, sigma) + a * sg.alpha_sigma(ic)) * us[k];
      c->dxy[k] = bt * (uxs[k] + a * uss[k]) + bx * us[k];
      c->dyy[k] = bt * bt * uss[k];
    }
  }
  return c->dxx;
}

const std::vector<double>& PotentialField::grid_dxy() const {
  grid_dxx();
  return cache_->dxy;
}

const std::vector<double>& PotentialField::grid_dyy() const {
  grid_dxx();
  return cache_->dyy;
}

void PotentialField::locate(double x, double y, int& i, double& tx, int& j, double& ts) const {
  const Grid1D g = map_.grid();
  const double slack_x = 1e-9 * std::max(1.0, std::abs(g.length()));
  if (x < g.a1 - slack_x || x > g.a2 + slack_x)
    throw CurveOutsideDomain("PotentialField: x = " + std::to_string(x) + " outside window");
  const double t = std::clamp((x - g.a1) / g.spacing(), 0.0, static_cast<double>(g.n - 1));
  i = std::min(static_cast<int>(t), g.n - 2);
  tx = t - i;
  const double b = map_.bottom[i] * (1.0 - tx) + map_.bottom[i + 1] * tx;
  const double h = map_.depth(i) * (1.0 - tx) + map_.depth(i + 1) * tx;
  double sigma = (y - b) / h;
  const double slack_s = 1e-7;
  if (sigma < -slack_s || sigma > 1.0 + slack_s)
    throw CurveOutsideDomain("PotentialField: point (" + std::to_string(x) + ", " +
                             std::to_string(y) + ") outside the strip");
  sigma = std::clamp(sigma, 0.0, 1.0);
  const double u = sigma * (map_.n_sigma - 1);
  j = std::min(static_cast<int>(u), map_.n_sigma - 2);
  ts = u - j;
}

double PotentialField::interp(const std::vector<double>& gdat, double x, double y) const {
  int i, j;
  double tx, ts;
  locate(x, y, i, tx, j, ts);
  const int nx = this->nx();
  auto at = [&](int ii, int jj) { return gdat[static_cast<size_t>(jj) * nx + ii]; };
  return (1.0 - ts) * ((1.0 - tx) * at(i, j) + tx * at(i + 1, j)) +
         ts * ((1.0 - tx) * at(i, j + 1) + tx * at(i + 1, j + 1));
}

double PotentialField::value_at(double x, double y) const { return interp(v_, x, y); }
double PotentialField::dx_at(double x, double y) const { return interp(grid_dx(), x, y); }
double PotentialField::dy_at(double x, double y) const { return interp(grid_dy(), x, y); }
double PotentialField::dxx_at(double x, double y) const { return interp(grid_dxx(), x, y); }
double PotentialField::dxy_at(double x, double y) const { return interp(grid_dxy(), x, y); }
double PotentialField::dyy_at(double x, double y) const { return interp(grid_dyy(), x, y); }

double PotentialField::h2_norm() const {
  const int nx = this->nx(), ns = this->ns();
  const auto& gx = grid_dx();
  const auto& gy = grid_dy();
  const auto& gxx = grid_dxx();
  const auto& gxy = grid_dxy();
  const auto& gyy = grid_dyy();
  const double hs = map_.dsigma();
  double total = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double wx = map_.bottom.weight(i);
    const double jac = map_.depth(i);
    double col = 0.0;
    for (int j = 0; j < ns; ++j) {
      const size_t k = static_cast<size_t>(j) * nx + i;
      const double ws = (j == 0 || j == ns - 1) ? 0.5 * hs : hs;
      const double q = v_[k] * v_[k] + gx[k] * gx[k] + gy[k] * gy[k] + gxx[k] * gxx[k] +
                       2.0 * gxy[k] * gxy[k] + gyy[k] * gyy[k];
      col += ws * q;
    }
    total += wx * jac * col;
  }
  return std::sqrt(total);
}

// ---------------------------------------------------------------------------
// Extraction and quadrature

namespace {

// One-sided sigma slope at the top layer. Third order when four layers exist:
// the second-order stencil's h^2 k^3 / 3 error dominates the flux budget for
// wavenumbers around 2 pi, the cubic one keeps it below the quadrature error.
double top_layer_slope(const PotentialField& phi, int i) {
  const int ns = phi.ns();
  const double hs = phi.map().dsigma();
  auto u = [&](int j) { return phi.u(i, j); };
  if (ns >= 4)
    return (11.0 * u(ns - 1) - 18.0 * u(ns - 2) + 9.0 * u(ns - 3) - 2.0 * u(ns - 4)) / (6.0 * hs);
  if (ns == 3) return (3.0 * u(2) - 4.0 * u(1) + u(0)) / (2.0 * hs);
  return (u(1) - u(0)) / hs;
}

}  // namespace

ScalarField dno(const PotentialField& phi) {
  const SigmaMap& m = phi.map();
  const bool periodic = phi.policy() == LateralPolicy::periodic;
  const int nx = phi.nx(), ns = phi.ns();
  ScalarField psi(m.grid());
  for (int i = 0; i < nx; ++i) psi[i] = phi.u(i, ns - 1);
  const ScalarField psix = periodic ? psi.derivative_periodic() : psi.derivative();
  const ScalarField zx = periodic ? m.surface.derivative_periodic() : m.surface.derivative();
  ScalarField out(m.grid());
  for (int i = 0; i < nx; ++i) {
    const double us = top_layer_slope(phi, i);
    out[i] = -zx[i] * psix[i] + (1.0 + zx[i] * zx[i]) / m.depth(i) * us;
  }
  return out;
}

SurfaceTraces surface_traces(const PotentialField& phi) {
  const SigmaMap& m = phi.map();
  const bool periodic = phi.policy() == LateralPolicy::periodic;
  const int nx = phi.nx(), ns = phi.ns();
  SurfaceTraces t{ScalarField(m.grid()), ScalarField(m.grid()), ScalarField(m.grid()),
                  ScalarField(m.grid())};
  for (int i = 0; i < nx; ++i) t.value[i] = phi.u(i, ns - 1);
  const ScalarField psix = periodic ? t.value.derivative_periodic() : t.value.derivative();
  const ScalarField zx = periodic ? m.surface.derivative_periodic() : m.surface.derivative();
  for (int i = 0; i < nx; ++i) {
    const double us = top_layer_slope(phi, i);
    t.grad_y[i] = us / m.depth(i);
    t.grad_x[i] = psix[i] - zx[i] * t.grad_y[i];
    t.normal[i] = (-zx[i] * t.grad_x[i] + t.grad_y[i]) / std::sqrt(1.0 + zx[i] * zx[i]);
  }
  return t;
}

SurfaceTraces traces_from_measurements(const ScalarField& psi, const ScalarField& zeta,
                                       const ScalarField& normal_deriv, bool periodic) {
  require_same_grid(psi.grid(), zeta.grid(), "traces_from_measurements");
  require_same_grid(psi.grid(), normal_deriv.grid(), "traces_from_measurements");
  const ScalarField psix = periodic ? psi.derivative_periodic() : psi.derivative();
  const ScalarField zx = periodic ? zeta.derivative_periodic() : zeta.derivative();
  SurfaceTraces t{psi, ScalarField(psi.grid()), ScalarField(psi.grid()), normal_deriv};
  for (int i = 0; i < psi.size(); ++i) {
    const double m2 = 1.0 + zx[i] * zx[i];
    t.grad_y[i] = (std::sqrt(m2) * normal_deriv[i] + zx[i] * psix[i]) / m2;
    t.grad_x[i] = psix[i] - t.grad_y[i] * zx[i];
  }
  return t;
}

double energy(const PotentialField& phi) {
  return energy(phi, phi.map().bottom, phi.map().surface);
}

double energy(const PotentialField& phi, const ScalarField& lo, const ScalarField& hi) {
  const SigmaMap& m = phi.map();
  require_same_grid(m.grid(), lo.grid(), "energy");
  require_same_grid(m.grid(), hi.grid(), "energy");
  const int nx = phi.nx(), ns = phi.ns();
  const auto& gx = phi.grid_dx();
  const auto& gy = phi.grid_dy();
  const double hs = m.dsigma();
  double total = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double depth = m.depth(i);
    const double slack = 1e-9 * std::max(1.0, std::abs(depth));
    double s0 = (lo[i] - m.bottom[i]) / depth;
    double s1 = (hi[i] - m.bottom[i]) / depth;
    if (s0 < -slack || s1 > 1.0 + slack)
      throw RegionOutsideDomain("energy: region column leaves the strip at X = " +
                                std::to_string(m.grid().x(i)));
    s0 = std::clamp(s0, 0.0, 1.0);
    s1 = std::clamp(s1, 0.0, 1.0);
    if (s1 <= s0) continue;
    auto e_at = [&](int j) {
      const size_t k = static_cast<size_t>(j) * nx + i;
      return gx[k] * gx[k] + gy[k] * gy[k];
    };
    // Trapezoid of the piecewise-linear interpolant of e over [s0, s1].
    auto e_interp = [&](double s) {
      const double u = s * (ns - 1);
      const int j = std::min(static_cast<int>(u), ns - 2);
      const double t = u - j;
      return (1.0 - t) * e_at(j) + t * e_at(j + 1);
    };
    // Simpson over whole-layer runs (3/8 head when the run is odd), trapezoid
    // of the linear interpolant on the fractional caps.
    auto node_run = [&](int a, int b) {
      int c = b - a;
      if (c <= 0) return 0.0;
      if (c == 1) return 0.5 * (e_at(a) + e_at(a + 1)) * hs;
      double s = 0.0;
      if (c % 2 == 1) {
        s += 3.0 * hs / 8.0 * (e_at(a) + 3.0 * e_at(a + 1) + 3.0 * e_at(a + 2) + e_at(a + 3));
        a += 3;
      }
      for (int j = a; j < b; j += 2) s += hs / 3.0 * (e_at(j) + 4.0 * e_at(j + 1) + e_at(j + 2));
      return s;
    };
    double col = 0.0;
    const int j0 = static_cast<int>(std::ceil(s0 * (ns - 1) - 1e-12));
    const int j1 = static_cast<int>(std::floor(s1 * (ns - 1) + 1e-12));
    if (j0 > j1) {
      col = 0.5 * (e_interp(s0) + e_interp(s1)) * (s1 - s0);
    } else {
      const double sa = j0 * hs, sb = j1 * hs;
      if (s0 < sa) col += 0.5 * (e_interp(s0) + e_at(j0)) * (sa - s0);
      col += node_run(j0, j1);
      if (s1 > sb) col += 0.5 * (e_at(j1) + e_interp(s1)) * (s1 - sb);
    }
    total += lo.weight(i) * depth * col;
  }
  return total;
}

double graph_integral(const ScalarField& curve, const ScalarField& f, const ScalarField& g) {
  require_same_grid(curve.grid(), f.grid(), "graph_integral");
  require_same_grid(curve.grid(), g.grid(), "graph_integral");
  const ScalarField cx = curve.derivative();
  double s = 0.0;
  for (int i = 0; i < curve.size(); ++i)
    s += curve.weight(i) * f[i] * g[i] * std::sqrt(1.0 + cx[i] * cx[i]);
  return s;
}

double arc_length(const ScalarField& curve) {
  ScalarField ones(curve.grid(), 1.0);
  return graph_integral(curve, ones, ones);
}

double wall_integral(double y0, double y1, const std::vector<double>& f,
                     const std::vector<double>& g) {
  if (f.size() != g.size() || f.size() < 2)
    throw GridMismatch("wall_integral: sample arrays must match and have >= 2 entries");
  if (y1 <= y0) return 0.0;
  const double dy = (y1 - y0) / (static_cast<double>(f.size()) - 1.0);
  double s = 0.0;
  for (size_t k = 0; k < f.size(); ++k) {
    const double w = (k == 0 || k + 1 == f.size()) ? 0.5 * dy : dy;
    s += w * f[k] * g[k];
  }
  return s;
}

}  // namespace seabed
