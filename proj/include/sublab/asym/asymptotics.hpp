#pragma once

#include "sublab/sim/simulate.hpp"
#include "sublab/spectral/eigensolver.hpp"

namespace sublab::asym {

using sim::Domain;
using sim::SimConfig;
using carnot::GroupSpec;
using carnot::NormKind;
using carnot::Point;
using carnot::Vec;

/// Which side of the scaling identity the experiment runs on:
/// survival of Omega at horizon t/eps^2 (one domain, one step size), or
/// survival of the dilated set delta_eps(Omega) at horizon t with step h eps^2.
enum class SmallDevPath { StretchTime, DilateDomain };

struct SmallDeviationReport {
  Eigen::VectorXd epsilons;  // strictly decreasing
  double t = 0.0;
  Eigen::VectorXd survival, ci_lo, ci_hi;
  Eigen::VectorXd rate;          // -eps^2 log survival
  double extrapolated_rate = 0.0;  // fit rate = L + a eps^2 over the 3 smallest eps
  double fitted_lambda1 = 0.0;     // extrapolated_rate / t
  double reference_lambda1 = std::numeric_limits<double>::quiet_NaN();
  SmallDevPath path = SmallDevPath::StretchTime;
};

/// Exit-rate experiment across a shrinking family Omega_eps. Throws when some
/// survival estimate is zero (insufficient samples at that eps).
SmallDeviationReport small_deviation_experiment(
    const Domain& domain, const SimConfig& config, const Eigen::VectorXd& eps_grid, double t,
    SmallDevPath path = SmallDevPath::StretchTime,
    double reference_lambda1 = std::numeric_limits<double>::quiet_NaN());

struct SupNormEstimate {
  double eps = 0.0;
  double t = 0.0;
  double probability = 0.0;
  double lo = 0.0, hi = 0.0;
};

/// P(max_{s<=t} rho(g_s) < eps), i.e. survival of the eps gauge ball.
SupNormEstimate sup_norm_event_probability(const GroupSpec& spec, NormKind norm,
                                           const SimConfig& config, double eps, double t);

struct HeatContentCurve {
  Eigen::VectorXd times;
  Eigen::VectorXd content, ci_lo, ci_hi;  // Q hat
  Eigen::VectorXd rescaled;               // e^{lambda1 t} Q hat
  Eigen::VectorXd reference;              // sum_n e^{-lambda_n t} c_n^2
  double q0_estimate = 0.0;               // Q hat at t -> 0+
  double volume = 0.0;                    // exact |Omega|
  double c1_squared = 0.0;
  double lambda1 = 0.0;
  std::int64_t samples = 0;
};

/// Monte Carlo heat content: uniform starts by rejection from the bounding
/// box, one trajectory per start, Q(t) = |box| P(start in Omega, tau > t).
/// The eigen data must come from the same domain (signature check).
HeatContentCurve heat_content(const Domain& domain, const SimConfig& config,
                              const Eigen::VectorXd& time_grid,
                              const spectral::GridEigenSystem& eig);

struct RegularityProbeReport {
  Eigen::MatrixXd points;    // N x P
  Eigen::VectorXd times;
  Eigen::MatrixXd survival;  // P x T
  Eigen::MatrixXd ci_hi;     // P x T
  std::vector<bool> suspect;  // heuristic flag, never a verdict
};

/// Small-time survival started from boundary points; regular points should
/// show survival -> 0. Points must lie on the boundary to tolerance.
RegularityProbeReport boundary_regularity_probe(const Domain& domain, const SimConfig& config,
                                                const Eigen::MatrixXd& points,
                                                const Eigen::VectorXd& t_grid,
                                                double boundary_tol = 1e-9);

}  // namespace sublab::asym
