#pragma once

#include <functional>
#include <vector>

#include "seabed/field.hpp"

namespace seabed {

// Pixel raster of a bounded planar region. Pixels are squares of side `px`;
// a pixel belongs to the region when its center does. The raster always
// carries a one-pixel ring of complement around the region so erosion sees
// the true boundary.
class RasterRegion {
public:
  RasterRegion(double x0, double y0, double px, int nx, int ny);

  static RasterRegion rectangle(double x0, double x1, double y0, double y1, double px);
  // Region {(x, y) : lo(x) < y < hi(x), x in [xa, xb]} sampled from linearly
  // interpolated profiles. `px` is the pixel size.
  static RasterRegion between_profiles(const ScalarField& lo, const ScalarField& hi, double xa,
                                       double xb, double px);
  static RasterRegion from_indicator(double x0, double x1, double y0, double y1, double px,
                                     const std::function<bool(double, double)>& inside);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double pixel() const { return px_; }
  bool inside(int i, int j) const { return mask_[idx(i, j)]; }
  void set(int i, int j, bool v) { mask_[idx(i, j)] = v ? 1 : 0; }
  double cx(int i) const { return x0_ + (i + 0.5) * px_; }
  double cy(int j) const { return y0_ + (j + 0.5) * px_; }

  double area() const;  // pixel count * px^2

  // Distance from each inside pixel center to the region boundary,
  // approximated as the exact Euclidean distance to the nearest outside
  // pixel center minus half a pixel. Outside pixels get 0.
  const std::vector<double>& boundary_distance() const;

  // Area of the erosion {p in D : dist(p, boundary) > rho}.
  double eroded_area(double rho) const;

  // Largest rho (to half-pixel resolution) whose erosion keeps at least half
  // the area. Zero when even one pixel of erosion empties too much.
  double half_measure_radius() const;

private:
  size_t idx(int i, int j) const { return static_cast<size_t>(j) * nx_ + i; }

  double x0_, y0_, px_;
  int nx_, ny_;
  std::vector<std::uint8_t> mask_;
  mutable std::vector<double> dist_;  // lazy
};

}  // namespace seabed
