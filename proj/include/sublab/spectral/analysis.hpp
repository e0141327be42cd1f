#pragma once

#include "sublab/spectral/eigensolver.hpp"

#include <vector>

namespace sublab::spectral {

/// First zero of the Bessel function J0.
inline constexpr double kBesselJ0FirstZero = 2.404825557695773;

/// Dirichlet spectral-gap bracket for the Heisenberg gauge unit ball, built
/// from the lowest Dirichlet eigenvalues of -1/2 Laplacian on the unit
/// interval and unit disk:
///   lower = lambda1_disk,  upper = f(x*) with
///   f(x) = lambda1_disk/sqrt(1-x) + lambda1_interval sqrt(1-x)/(4x).
struct GapBounds {
  double lower = 0.0;
  double upper = 0.0;
  double lambda1_interval = 0.0;  // pi^2/8
  double lambda1_disk = 0.0;      // j01^2/2
  double x_star = 0.0;
};

GapBounds gap_bounds();

/// Minimum of the discrete kernel column exp(-t A) delta_source over interior
/// nodes, by explicit heat steps inside the stability bound.
struct PositivityReport {
  double t = 0.0;
  std::vector<int> sources;
  Eigen::VectorXd min_value;     // per source; off-site minimum when t = 0
  bool all_positive = false;
  int steps = 0;
};

PositivityReport heat_kernel_positivity_check(const GridOperator& op, double t,
                                              const std::vector<int>& sources, int workers = 0);

/// Sup-norm growth and boundary behavior of the computed modes.
struct ModeDiagnostics {
  Eigen::VectorXd sup_norms;      // ||phi_n||_inf
  Eigen::VectorXd growth_ratio;   // sup norm / lambda_n^{Q/2}
  double ratio_spread = 0.0;      // max/min of growth_ratio
  double boundary_layer_max = 0.0;  // max |phi_1| on the near-boundary layer
  bool ground_state_one_signed = false;
  double phi1_min = 0.0;
  double phi1_max = 0.0;
};

ModeDiagnostics eigenfunction_diagnostics(const GridOperator& op, const GridEigenSystem& sys);

/// Max residual of the composed centered first-difference stencil for
/// -1/2 sum X_i^2 applied to rho^{2-Q}, over lattice nodes with gauge in
/// [r_in, r_out]; stencil points take analytic function values. Decays like
/// h^2 when rho is the L-gauge. The top layer of the gauge scales like
/// rho^2, so the asymptotic regime needs h well below r_in^2/4.
double gauge_harmonicity_residual(const GroupSpec& spec, carnot::NormKind kind, double r_in,
                                  double r_out, double h, int workers = 0);

}  // namespace sublab::spectral
