#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "seabed/errors.hpp"

namespace seabed {

// Uniform 1D node grid on [a1, a2], endpoints included.
struct Grid1D {
  double a1 = 0.0;
  double a2 = 1.0;
  int n = 2;  // node count, >= 2

  Grid1D() = default;
  Grid1D(double a1_, double a2_, int n_);  // validates, throws ConfigError

  double spacing() const { return (a2 - a1) / (n - 1); }
  double length() const { return a2 - a1; }
  double x(int i) const { return a1 + spacing() * i; }
  bool operator==(const Grid1D& o) const { return a1 == o.a1 && a2 == o.a2 && n == o.n; }
};

// Nodal values over a Grid1D. All binary operations demand identical grids.
class ScalarField {
public:
  ScalarField() = default;
  explicit ScalarField(Grid1D g, double fill = 0.0);
  ScalarField(Grid1D g, std::vector<double> values);
  ScalarField(Grid1D g, const std::function<double(double)>& f);

  static ScalarField sample(Grid1D g, const std::function<double(double)>& f);

  const Grid1D& grid() const { return grid_; }
  int size() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[static_cast<size_t>(i)]; }
  double& operator[](int i) { return v_[static_cast<size_t>(i)]; }
  double sample(int i) const { return v_[static_cast<size_t>(i)]; }
  std::span<const double> values() const { return v_; }
  std::vector<double>& raw() { return v_; }

  double linf() const;
  double trapz() const;     // \int v dX
  double l2() const;        // sqrt(\int v^2 dX)
  double mean() const;      // trapz / (a2 - a1)
  double min() const;
  double max() const;

  // Trapezoid node weight of node i (spacing for interior, half at ends).
  double weight(int i) const;

  // Centered first derivative, second-order one-sided at the endpoints.
  ScalarField derivative() const;
  // First derivative assuming periodic extension with period a2-a1 and
  // v[n-1] == v[0] (the seam node duplicates the first).
  ScalarField derivative_periodic() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, const ScalarField& b);  // pointwise

private:
  Grid1D grid_;
  std::vector<double> v_;
};

ScalarField operator*(ScalarField a, const ScalarField& b);

void require_same_grid(const Grid1D& a, const Grid1D& b, const char* where);
void require_same_grid(const ScalarField& a, const ScalarField& b,
                       const char* where = "fields");

ScalarField pointwise_min(const ScalarField& a, const ScalarField& b);
ScalarField pointwise_max(const ScalarField& a, const ScalarField& b);
ScalarField pointwise_abs(const ScalarField& a);

// \int f g dX by the trapezoid rule.
double trapz_product(const ScalarField& f, const ScalarField& g);

// \int_{S} f^2 dX where S is the node set selected by mask (trapezoid node
// weights, so masked L2 squares over S and its complement add up exactly to
// the full-grid square).
double masked_l2_sq(const ScalarField& f, const std::vector<std::uint8_t>& mask);

double masked_linf(const ScalarField& f, const std::vector<std::uint8_t>& mask);

}  // namespace seabed
