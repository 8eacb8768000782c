#pragma once

#include <string>
#include <utility>
#include <vector>

#include "seabed/elliptic.hpp"
#include "seabed/field.hpp"
#include "seabed/geometry.hpp"

namespace seabed {

// Constants of the log-log trace estimate. They are not computable from the
// estimate's derivation, so they are explicit inputs and every report echoes
// them back.
struct ConfigConstants {
  double big_c = 1.0;
  double small_c = 2.728281828459045;  // e + 0.01
  double s = 0.25;                     // must sit in (0, 1/2)
};

void validate_constants(const ConfigConstants& cc);

// One solved configuration: geometry, boundary data, potential, and the
// derived surface quantities used by the estimates.
struct PairSide {
  FluidDomainSpec domain;
  ScalarField psi;
  LateralTrace theta;
  PotentialField phi;
  SurfaceTraces traces;  // own-surface value, gradient, unit normal derivative
  ScalarField dno;       // sqrt(1 + zeta'^2) * normal derivative on the surface
  double energy = 0.0;   // Dirichlet energy over the full strip
  double h2 = 0.0;       // Sobolev norm through second derivatives
};

// Two solved configurations on one window grid plus the comparison geometry:
// the lower surface envelope, the upper bottom envelope, the surface split by
// sign of zeta - zeta0, and the decomposition of the inter-bottom region.
struct PairConfiguration {
  PairSide a;   // the (b, zeta, psi) side
  PairSide a0;  // the reference (b0, zeta0, psi0) side
  double h0 = 0.0;         // common depth floor
  int n_sigma = 0;
  ScalarField zeta_under;  // min(zeta, zeta0)
  ScalarField b_over;      // max(b, b0)
  SurfaceSplit split;
  RegionDecomposition decomposition;
};

struct PairOptions {
  int n_sigma = 65;
  SolverOptions solver;
  DecompositionOptions decomposition;
};

// Solves both sides and assembles the comparison geometry. Requires one
// common grid and |zeta - zeta0| <= h0/2 everywhere (PairIncompatible).
PairConfiguration make_pair(const FluidDomainSpec& dom, const ScalarField& psi,
                            const LateralTrace& theta, const FluidDomainSpec& dom0,
                            const ScalarField& psi0, const LateralTrace& theta0,
                            const PairOptions& opts = {});

// Both sides of the energy comparison: the two slab energies against the
// seven boundary integrals, with the wall and bottom groups kept separate.
struct EnergyComparison {
  double lhs = 0.0;                  // slab energies between the bottoms
  double rhs = 0.0;                  // sum of all boundary terms
  double surface_value_term = 0.0;   // envelope-surface flux against phi - phi0
  double surface_normal_term = 0.0;  // envelope-surface phi0 against flux difference
  double j1 = 0.0;                   // wall terms between b_over and zeta_under
  double j2 = 0.0;                   // wall terms between each bottom and b_over
  double j3 = 0.0;                   // bottom-envelope exchange term
};

EnergyComparison energy_comparison_sides(const PairConfiguration& pair);

// (||dn phi||_{L2(wall b->bover)} ||phi||_{Linf(wall b->zunder)} + same for
// the 0 side) * (2 * sup over the window edge of (bover - b))^{1/2}.
double tbot(const PairConfiguration& pair);

// Denominator choice for the log-log ratio: the surface trace norms of the
// difference, or sqrt(G4) + sqrt(G5) built from measurements only.
enum class TlogMode { trace_norms, g_norms };

struct TlogResult {
  enum class Status { value, non_informative, smallness_violated };
  Status status = Status::value;
  double value = 0.0;        // defined when status == value
  double ratio = 0.0;        // H2 difference norm over the denominator
  double h2_diff = 0.0;      // ||phi - phi0||_{H2} on the envelope strip
  double denominator = 0.0;
};

// Throws IdenticalPair when the H2 difference sits below the floor, and
// SmallnessViolated when the denominator exceeds h2_diff / (2 small_c).
TlogResult tlog(const PairConfiguration& pair, const ConfigConstants& cc, TlogMode mode);

struct G1Result {
  double g1 = 0.0;
  double ghat1 = 0.0;
  double gtilde1 = 0.0;
  ScalarField z3;  // pointwise coefficient on the window
};

G1Result g1(const PairConfiguration& pair);

struct GTerms {
  double g2 = 0.0, g3 = 0.0, g4 = 0.0, g5 = 0.0;
  double z4_norm = 0.0;  // cross-surface flux of phi, L2 over the higher side
  double z5_norm = 0.0;  // own-surface flux of phi, L2 over the window
  double z6 = 0.0;
  double z7 = 0.0;       // largest surface metric factor
};

GTerms g2_to_g5(const PairConfiguration& pair);

// Margins (bound minus trace-shift norm) of the three vertical-shift
// inequalities on the nodes where zeta exceeds zeta0.
struct ShiftMargins {
  double value = 0.0;
  double grad_x = 0.0;
  double grad_y = 0.0;
  double bound = 0.0;  // shared right-hand side
};

ShiftMargins surface_shift_check(const PairConfiguration& pair);

// Minimum over the sample points of the ball-to-domain Dirichlet energy
// ratio. Points must keep distance > 4 rho from the strip boundary.
double estimate_crho(const PotentialField& phi, double rho,
                     const std::vector<std::pair<double, double>>& points);

// Covering construction over one inter-bottom component.
struct ComponentCovering {
  int i_begin = 0, i_end = 0, sign = 0;
  double rho = 0.0;
  double area = 0.0;
  double eroded_area = 0.0;
  int n_squares = 0;
  double square_side = 0.0;
  double min_square_energy = 0.0;
  double sample_x = 0.0, sample_y = 0.0;
  double crho = 0.0;     // energy ratio of the ball inside the poorest square
  double c_tilde = 0.0;  // 2 * crho / rho^2
  bool used = false;     // fat enough to enter the bound
};

// Per-sign assembly: 1 takes the minimum constant, 2 its square (triggered
// when the constants spread by more than 10^3).
struct SideConstruction {
  int sign = 0;
  int case_label = 0;
  double constant = 0.0;
  int n_used = 0;
};

struct CbotReport {
  std::vector<ComponentCovering> components;
  std::vector<SideConstruction> sides;
  double cbot = 0.0;
  bool defined = false;  // false when no usable component exists
};

CbotReport estimate_cbot(const PairConfiguration& pair);

struct TermBreakdown {
  double lhs_energy = 0.0;
  double rhs_boundary = 0.0;
  double surface_value_term = 0.0;
  double surface_normal_term = 0.0;
  double j1 = 0.0, j2 = 0.0, j3 = 0.0;
  double tbot = 0.0;
  TlogResult tlog;   // trace-norm denominator
  TlogResult tlog1;  // measurement-bound denominator
  double g1 = 0.0, ghat1 = 0.0, gtilde1 = 0.0;
  double g2 = 0.0, g3 = 0.0, g4 = 0.0, g5 = 0.0;
  double z3_norm = 0.0, z4_norm = 0.0, z5_norm = 0.0, z6 = 0.0, z7 = 0.0;
  double cbot_estimate = 0.0;  // NaN when the covering is undefined
  std::vector<double> crho_estimates;
  double final_rhs = 0.0;  // (g2 + g3 + tlog1 + tbot) / min energy
};

struct CertificateReport {
  TermBreakdown terms;
  ConfigConstants constants;
  Grid1D grid;
  int n_sigma = 0;
  double l1_diff = 0.0;
  double energy_a = 0.0;
  double energy_a0 = 0.0;
  double min_energy = 0.0;
  double h2_diff = 0.0;
  double lhs_bound = 0.0;  // cbot * l1_diff, NaN when cbot is undefined
  std::string verdict;     // HOLDS, NON_INFORMATIVE, or VIOLATED
  CbotReport covering;
};

// Full bound assembly. Deterministic and pure; throws IdenticalPair when the
// two potentials coincide up to the floor.
CertificateReport stability_report(const PairConfiguration& pair, const ConfigConstants& cc);

std::string render_report_json(const CertificateReport& report);

}  // namespace seabed
