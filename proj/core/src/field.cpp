#include "seabed/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "seabed/errors.hpp"

namespace seabed {

Grid1D::Grid1D(double a1_, double a2_, int n_) : a1(a1_), a2(a2_), n(n_) {
  if (!(a1 < a2)) throw ConfigError("grid interval is empty: a1 must be below a2");
  if (n < 2) throw ConfigError("grid needs at least 2 nodes");
}

ScalarField::ScalarField(Grid1D g, double fill) : grid_(g), v_(static_cast<size_t>(g.n), fill) {
  if (g.n < 2) throw GridMismatch("ScalarField: grid needs at least 2 nodes");
}

ScalarField::ScalarField(Grid1D g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
  if (static_cast<int>(v_.size()) != g.n)
    throw GridMismatch("ScalarField: value count does not match grid node count");
  if (g.n < 2) throw GridMismatch("ScalarField: grid needs at least 2 nodes");
}

ScalarField::ScalarField(Grid1D g, const std::function<double(double)>& f)
    : ScalarField(sample(g, f)) {}

ScalarField ScalarField::sample(Grid1D g, const std::function<double(double)>& f) {
  ScalarField out(g);
  for (int i = 0; i < g.n; ++i) out[i] = f(g.x(i));
  return out;
}

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* where) {
  if (!(a == b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* where) {
  require_same_grid(a.grid(), b.grid(), where);
}

ScalarField operator*(ScalarField a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "operator*");
  for (int i = 0; i < a.size(); ++i) a[i] *= b[i];
  return a;
}

double ScalarField::weight(int i) const {
  const double h = grid_.spacing();
  return (i == 0 || i == grid_.n - 1) ? 0.5 * h : h;
}

double ScalarField::linf() const {
  double m = 0.0;
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

double ScalarField::trapz() const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) s += weight(i) * v_[static_cast<size_t>(i)];
  return s;
}

double ScalarField::l2() const {
  double s = 0.0;
  for (int i = 0; i < size(); ++i) {
    const double x = v_[static_cast<size_t>(i)];
    s += weight(i) * x * x;
  }
  return std::sqrt(s);
}

double ScalarField::mean() const { return trapz() / grid_.length(); }

double ScalarField::min() const { return *std::min_element(v_.begin(), v_.end()); }
double ScalarField::max() const { return *std::max_element(v_.begin(), v_.end()); }

ScalarField ScalarField::derivative() const {
  const int n = size();
  const double h = grid_.spacing();
  ScalarField out(grid_);
  if (n == 2) {
    const double d = (v_[1] - v_[0]) / h;
    out[0] = out[1] = d;
    return out;
  }
  out[0] = (-3.0 * v_[0] + 4.0 * v_[1] - v_[2]) / (2.0 * h);
  for (int i = 1; i + 1 < n; ++i)
    out[i] = (v_[static_cast<size_t>(i) + 1] - v_[static_cast<size_t>(i) - 1]) / (2.0 * h);
  out[n - 1] = (3.0 * v_[static_cast<size_t>(n) - 1] - 4.0 * v_[static_cast<size_t>(n) - 2] +
                v_[static_cast<size_t>(n) - 3]) /
               (2.0 * h);
  return out;
}

ScalarField ScalarField::derivative_periodic() const {
  // Node n-1 aliases node 0; the independent columns are 0..n-2.
  const int n = size();
  const int m = n - 1;
  const double h = grid_.spacing();
  ScalarField out(grid_);
  for (int i = 0; i < m; ++i) {
    const int ip = (i + 1) % m;
    const int im = (i + m - 1) % m;
    out[i] = (v_[static_cast<size_t>(ip)] - v_[static_cast<size_t>(im)]) / (2.0 * h);
  }
  out[n - 1] = out[0];
  return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator+=");
  for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_, "operator-=");
  for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : v_) x *= s;
  return *this;
}

ScalarField pointwise_min(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_min");
  ScalarField out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = std::min(a[i], b[i]);
  return out;
}

ScalarField pointwise_max(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise_max");
  ScalarField out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

ScalarField pointwise_abs(const ScalarField& a) {
  ScalarField out(a.grid());
  for (int i = 0; i < a.size(); ++i) out[i] = std::abs(a[i]);
  return out;
}

double trapz_product(const ScalarField& f, const ScalarField& g) {
  require_same_grid(f.grid(), g.grid(), "trapz_product");
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i) s += f.weight(i) * f[i] * g[i];
  return s;
}

double masked_l2_sq(const ScalarField& f, const std::vector<std::uint8_t>& mask) {
  if (static_cast<int>(mask.size()) != f.size())
    throw GridMismatch("masked_l2_sq: mask size does not match field");
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i)
    if (mask[static_cast<size_t>(i)]) s += f.weight(i) * f[i] * f[i];
  return s;
}

double masked_linf(const ScalarField& f, const std::vector<std::uint8_t>& mask) {
  if (static_cast<int>(mask.size()) != f.size())
    throw GridMismatch("masked_linf: mask size does not match field");
  double m = 0.0;
  for (int i = 0; i < f.size(); ++i)
    if (mask[static_cast<size_t>(i)]) m = std::max(m, std::abs(f[i]));
  return m;
}

}  // namespace seabed
