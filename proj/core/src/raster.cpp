#include "seabed/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "seabed/errors.hpp"

namespace seabed {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Felzenszwalb-Huttenlocher 1D squared distance transform with finite input.
void dt1d(const std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
          std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<size_t>(k)];
      s = ((f[static_cast<size_t>(q)] + q * q) - (f[static_cast<size_t>(p)] + p * p)) /
          (2.0 * q - 2.0 * p);
      if (k > 0 && s <= z[static_cast<size_t>(k)]) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[static_cast<size_t>(k)] = q;
    z[static_cast<size_t>(k)] = s;
    z[static_cast<size_t>(k) + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<size_t>(k) + 1] < q) ++k;
    const int p = v[static_cast<size_t>(k)];
    d[static_cast<size_t>(q)] = (q - p) * (double)(q - p) + f[static_cast<size_t>(p)];
  }
}

}  // namespace

RasterRegion::RasterRegion(double x0, double y0, double px, int nx, int ny)
    : x0_(x0), y0_(y0), px_(px), nx_(nx), ny_(ny), mask_(static_cast<size_t>(nx) * ny, 0) {
  if (nx < 1 || ny < 1 || !(px > 0.0)) throw RegionOutsideDomain("RasterRegion: empty raster");
}

RasterRegion RasterRegion::rectangle(double x0, double x1, double y0, double y1, double px) {
  return from_indicator(x0, x1, y0, y1, px,
                        [&](double x, double y) { return x > x0 && x < x1 && y > y0 && y < y1; });
}

RasterRegion RasterRegion::from_indicator(double x0, double x1, double y0, double y1, double px,
                                          const std::function<bool(double, double)>& inside) {
  const int nx = static_cast<int>(std::ceil((x1 - x0) / px)) + 2;
  const int ny = static_cast<int>(std::ceil((y1 - y0) / px)) + 2;
  RasterRegion r(x0 - px, y0 - px, px, nx, ny);
  // Outermost ring is forced complement so distances stay finite.
  for (int j = 1; j + 1 < ny; ++j)
    for (int i = 1; i + 1 < nx; ++i)
      if (inside(r.cx(i), r.cy(j))) r.set(i, j, true);
  return r;
}

RasterRegion RasterRegion::between_profiles(const ScalarField& lo, const ScalarField& hi,
                                            double xa, double xb, double px) {
  require_same_grid(lo.grid(), hi.grid(), "between_profiles");
  const Grid1D g = lo.grid();
  double ymin = kInf, ymax = -kInf;
  for (int i = 0; i < g.n; ++i) {
    ymin = std::min(ymin, lo[i]);
    ymax = std::max(ymax, hi[i]);
  }
  if (!(ymax > ymin)) throw DegenerateComponent("between_profiles: region has no height");
  auto interp = [&](const ScalarField& f, double x) {
    const double t = (x - g.a1) / g.spacing();
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, g.n - 2);
    const double s = t - i;
    return f[i] * (1.0 - s) + f[i + 1] * s;
  };
  return from_indicator(xa, xb, ymin, ymax, px, [&](double x, double y) {
    if (x <= xa || x >= xb) return false;
    if (x < g.a1 || x > g.a2) return false;
    return y > interp(lo, x) && y < interp(hi, x);
  });
}

double RasterRegion::area() const {
  size_t c = 0;
  for (auto m : mask_) c += m;
  return static_cast<double>(c) * px_ * px_;
}

const std::vector<double>& RasterRegion::boundary_distance() const {
  if (!dist_.empty()) return dist_;
  // Pass 1: per column, squared pixel distance to the nearest complement
  // pixel in that column (finite thanks to the complement ring).
  std::vector<double> g(mask_.size());
  for (int i = 0; i < nx_; ++i) {
    int last = -ny_ * 4;
    for (int j = 0; j < ny_; ++j) {
      if (!mask_[idx(i, j)]) last = j;
      g[idx(i, j)] = static_cast<double>(j - last);
    }
    last = ny_ * 4;
    for (int j = ny_ - 1; j >= 0; --j) {
      if (!mask_[idx(i, j)]) last = j;
      g[idx(i, j)] = std::min(g[idx(i, j)], static_cast<double>(last - j));
      g[idx(i, j)] *= g[idx(i, j)];
    }
  }
  // Pass 2: per row, combine with horizontal offsets.
  std::vector<double> row(static_cast<size_t>(nx_)), drow(static_cast<size_t>(nx_));
  std::vector<int> v(static_cast<size_t>(nx_) + 1);
  std::vector<double> z(static_cast<size_t>(nx_) + 2);
  dist_.assign(mask_.size(), 0.0);
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) row[static_cast<size_t>(i)] = g[idx(i, j)];
    dt1d(row, drow, v, z);
    for (int i = 0; i < nx_; ++i) {
      if (!mask_[idx(i, j)]) continue;
      // Center-to-center distance overshoots the distance to the boundary by
      // about half a pixel for straight edges.
      dist_[idx(i, j)] = std::max(0.0, std::sqrt(drow[static_cast<size_t>(i)]) * px_ - 0.5 * px_);
    }
  }
  return dist_;
}

double RasterRegion::eroded_area(double rho) const {
  const auto& d = boundary_distance();
  size_t c = 0;
  for (size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k] && d[k] > rho) ++c;
  return static_cast<double>(c) * px_ * px_;
}

double RasterRegion::half_measure_radius() const {
  const double half = 0.5 * area();
  if (half <= 0.0) return 0.0;
  const auto& d = boundary_distance();
  double dmax = 0.0;
  for (size_t k = 0; k < mask_.size(); ++k)
    if (mask_[k]) dmax = std::max(dmax, d[k]);
  if (eroded_area(dmax) >= half) return dmax;
  double lo = 0.0, hi = dmax;
  while (hi - lo > 0.25 * px_) {
    const double mid = 0.5 * (lo + hi);
    if (eroded_area(mid) >= half)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace seabed
