#pragma once

#include <cstdint>
#include <vector>

#include "seabed/field.hpp"
#include "seabed/raster.hpp"

namespace seabed {

// Fluid strip {(X, y) : a1 < X < a2, b(X) < y < zeta(X)} plus the access
// parameters derived from the profiles.
struct FluidDomainSpec {
  ScalarField bottom;
  ScalarField surface;
  double h0 = 0.0;  // depth floor, surface - bottom >= h0 everywhere
  double r0 = 0.0;  // access radius estimate
  double m0 = 0.0;  // max discrete slope of either profile

  const Grid1D& grid() const { return bottom.grid(); }
};

// Validates depth and grids and fills the derived parameters.
FluidDomainSpec build_domain(ScalarField bottom, ScalarField surface, double h0);

// Sign-classification threshold for profile differences.
double zero_threshold(const ScalarField& a, const ScalarField& b);

// Node split of the window by the sign of zeta - zeta0: S1 where the first
// surface is strictly higher, S2 elsewhere (ties included). The masks
// partition the nodes.
struct SurfaceSplit {
  std::vector<std::uint8_t> s1;
  std::vector<std::uint8_t> s2;
  double tau = 0.0;
};
SurfaceSplit split_surface(const ScalarField& zeta, const ScalarField& zeta0);

struct Component {
  int i_begin = 0;  // inclusive node run
  int i_end = 0;
  int sign = 0;      // +1 where b > b0, -1 where b < b0
  double area = 0.0; // trapezoid mass of |b - b0| over the run nodes
  double rho = 0.0;  // half-measure erosion radius of the rasterized region
  bool fat = false;  // rho resolved strictly positive at raster resolution
};

struct RegionDecomposition {
  std::vector<Component> components;
  double tau = 0.0;          // zero threshold used for sign classification
  double area_floor = 0.0;   // components below this mass were dropped
  double raster_pixel = 0.0;
};

struct DecompositionOptions {
  int refine = 8;             // raster pixels per grid cell, >= 8
  double area_floor = -1.0;   // < 0 picks spacing^2 * scale automatically
};

// Maximal same-sign runs of b - b0 beyond the zero threshold, each with its
// rasterized fatness radius. Isolated below-threshold nodes between runs of
// equal sign merge into the surrounding run.
RegionDecomposition decompose_interbottom(const ScalarField& b, const ScalarField& b0,
                                          const DecompositionOptions& opts = {});

// Raster of the planar region between the two bottoms over one component.
RasterRegion component_raster(const ScalarField& b, const ScalarField& b0, const Component& c,
                              int refine);

// rho and fatness for one component (helper used by decompose_interbottom).
void fatness_radius(const ScalarField& b, const ScalarField& b0, Component& c, int refine);

// \int max(0, upper - lower) dX.
double region_area(const ScalarField& lower, const ScalarField& upper);

// Counting measure of the window edge {a1, a2}.
double boundary_counting_measure(const Grid1D& g);

}  // namespace seabed
