#pragma once

#include <string>
#include <vector>

#include "seabed/elliptic.hpp"
#include "seabed/field.hpp"

namespace seabed {

// All writers go through a temp file plus rename so readers never observe a
// half-written artifact.
void write_text_atomic(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// CSV with header "x,value", full double precision.
void write_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_field_csv(const std::string& path);

// CSV with header "x,sigma,y,phi"; one row per node, row-major in sigma.
void write_potential_csv(const std::string& path, const PotentialField& phi);

// CSV with header "sigma,left,right".
void write_trace_csv(const std::string& path, const SigmaMap& map, const LateralTrace& trace);
LateralTrace read_trace_csv(const std::string& path);

struct MeasurementFiles {
  double t0 = 0.0;
  double b_left = 0.0;
  double b_right = 0.0;
  // Paths relative to the manifest location.
  std::string zeta, psi, dtzeta, theta;
};

void write_measurement_manifest(const std::string& path, const MeasurementFiles& m);
MeasurementFiles read_measurement_manifest(const std::string& path);

}  // namespace seabed
