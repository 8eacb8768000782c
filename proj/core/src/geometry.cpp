#include "seabed/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "seabed/errors.hpp"

namespace seabed {

FluidDomainSpec build_domain(ScalarField bottom, ScalarField surface, double h0) {
  require_same_grid(bottom.grid(), surface.grid(), "build_domain");
  if (!(h0 > 0.0)) throw ConfigError("build_domain: depth floor must be positive");
  for (int i = 0; i < bottom.size(); ++i) {
    if (surface[i] - bottom[i] < h0)
      throw DepthViolation("build_domain: depth " + std::to_string(surface[i] - bottom[i]) +
                           " under floor " + std::to_string(h0) + " at X = " +
                           std::to_string(bottom.grid().x(i)));
  }
  FluidDomainSpec d;
  d.h0 = h0;
  const ScalarField db = bottom.derivative();
  const ScalarField ds = surface.derivative();
  d.m0 = std::max(db.linf(), ds.linf());
  d.r0 = std::min(h0, bottom.grid().length()) / 4.0;
  d.bottom = std::move(bottom);
  d.surface = std::move(surface);
  return d;
}

double zero_threshold(const ScalarField& a, const ScalarField& b) {
  return 1e-12 * std::max({1.0, a.linf(), b.linf()});
}

SurfaceSplit split_surface(const ScalarField& zeta, const ScalarField& zeta0) {
  require_same_grid(zeta.grid(), zeta0.grid(), "split_surface");
  SurfaceSplit sp;
  sp.tau = zero_threshold(zeta, zeta0);
  const int n = zeta.size();
  sp.s1.assign(static_cast<size_t>(n), 0);
  sp.s2.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    if (zeta[i] - zeta0[i] > sp.tau)
      sp.s1[static_cast<size_t>(i)] = 1;
    else
      sp.s2[static_cast<size_t>(i)] = 1;
  }
  return sp;
}

double region_area(const ScalarField& lower, const ScalarField& upper) {
  require_same_grid(lower.grid(), upper.grid(), "region_area");
  double s = 0.0;
  for (int i = 0; i < lower.size(); ++i) s += lower.weight(i) * std::max(0.0, upper[i] - lower[i]);
  return s;
}

double boundary_counting_measure(const Grid1D&) { return 2.0; }

RasterRegion component_raster(const ScalarField& b, const ScalarField& b0, const Component& c,
                              int refine) {
  const Grid1D g = b.grid();
  const ScalarField& lo = (c.sign > 0) ? b0 : b;
  const ScalarField& hi = (c.sign > 0) ? b : b0;
  // One extra node each side so the sliver up to the sign crossing counts.
  const double xa = g.x(std::max(0, c.i_begin - 1));
  const double xb = g.x(std::min(g.n - 1, c.i_end + 1));
  const double px = g.spacing() / refine;
  return RasterRegion::between_profiles(lo, hi, xa, xb, px);
}

void fatness_radius(const ScalarField& b, const ScalarField& b0, Component& c, int refine) {
  RasterRegion r = component_raster(b, b0, c, refine);
  if (r.area() <= 0.0)
    throw DegenerateComponent("fatness_radius: component rasterized to nothing");
  c.rho = r.half_measure_radius();
  c.fat = c.rho > 0.5 * r.pixel();
}

RegionDecomposition decompose_interbottom(const ScalarField& b, const ScalarField& b0,
                                          const DecompositionOptions& opts) {
  require_same_grid(b.grid(), b0.grid(), "decompose_interbottom");
  const int n = b.size();
  RegionDecomposition out;
  out.tau = zero_threshold(b, b0);
  const double scale = std::max({1.0, b.linf(), b0.linf()});
  const double h = b.grid().spacing();
  out.area_floor = (opts.area_floor >= 0.0) ? opts.area_floor : h * h * scale;
  out.raster_pixel = h / opts.refine;

  auto sign_of = [&](int i) -> int {
    const double d = b[i] - b0[i];
    if (d > out.tau) return 1;
    if (d < -out.tau) return -1;
    return 0;
  };

  // Maximal same-sign runs; below-threshold nodes glue runs of equal sign.
  std::vector<Component> runs;
  int run_sign = 0, run_begin = -1, run_last = -1;
  for (int i = 0; i < n; ++i) {
    const int s = sign_of(i);
    if (s == 0) continue;
    if (run_sign == 0) {
      run_sign = s;
      run_begin = run_last = i;
    } else if (s == run_sign) {
      run_last = i;
    } else {
      runs.push_back({run_begin, run_last, run_sign, 0.0, 0.0, false});
      run_sign = s;
      run_begin = run_last = i;
    }
  }
  if (run_sign != 0) runs.push_back({run_begin, run_last, run_sign, 0.0, 0.0, false});

  for (Component& c : runs) {
    double area = 0.0;
    for (int i = c.i_begin; i <= c.i_end; ++i)
      area += b.weight(i) * std::max(0.0, c.sign * (b[i] - b0[i]));
    c.area = area;
    if (c.area <= out.area_floor) continue;
    fatness_radius(b, b0, c, opts.refine);
    out.components.push_back(c);
  }
  return out;
}

}  // namespace seabed
