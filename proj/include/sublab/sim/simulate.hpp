#pragma once

#include "sublab/sim/domain.hpp"
#include "sublab/sim/rng.hpp"

#include <cstdint>
#include <limits>

namespace sublab::sim {

/// Sentinel for trajectories that never left the domain before the horizon.
constexpr double kNoExit = std::numeric_limits<double>::infinity();

enum class Scheme { GeometricEuler, CoordinateHeun };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SimConfig {
  double step_size = 1e-3;
  double horizon = 1.0;
  std::int64_t trajectories = 1000;
  std::uint64_t base_seed = 0;
  Scheme scheme = Scheme::GeometricEuler;
  int workers = 0;  // 0 = SUBLAB_WORKERS / hardware

  std::int64_t steps() const;
  void validate() const;
};

/// One worker's stepping state; keeps the group product allocation-free.
class TrajectorySimulator {
 public:
  TrajectorySimulator(const GroupSpec& spec, Scheme scheme, double step_size);

  void reseed(std::uint64_t seed) { normal_.reseed(seed); }

  /// Advance the state by one step of the chosen scheme.
  void step(Vec& g);

  /// Run from start for at most max_steps; returns the first step index k with
  /// the state outside the domain (tau = k h), or 0 if it never exits. The
  /// final state is left in state().
  std::int64_t run_exit(const Domain& domain, const Eigen::Ref<const Vec>& start,
                        std::int64_t max_steps);

  const Vec& state() const { return g_; }
  Xoshiro256pp& engine() { return normal_.engine(); }

 private:
  const GroupSpec& spec_;
  Scheme scheme_;
  double sqrt_h_;
  NormalSampler normal_;
  Vec g_, inc_, next_, xi_;
  Eigen::MatrixXd frame_, frame_mid_;
  carnot::ProductWorkspace ws_;
};

struct ExitBatch {
  Eigen::VectorXd exit_times;   // tau in (0, T], or kNoExit
  Eigen::MatrixXd exit_points;  // column m: exit point, or final state if censored
  Point start;
  SimConfig config;

  std::int64_t size() const { return exit_times.size(); }
  std::int64_t exited() const;
};

/// Discrete path g_0 = start, g_{k+1} = g_k * exp(sum_i dB_i X_i); returns an
/// N x (steps+1) matrix of states. Uses trajectory index 0 of the seed stream.
Eigen::MatrixXd sample_path(const GroupSpec& spec, const SimConfig& config, const Point& start);

/// Killed-process exit sample: trajectory m uses seed base_seed ^ m, so the
/// batch is reproducible and independent of scheduling.
ExitBatch sample_exit_batch(const Domain& domain, const SimConfig& config, const Point& start);

struct SurvivalCurve {
  Eigen::VectorXd times;
  Eigen::VectorXd survival;
  Eigen::VectorXd ci_lo;
  Eigen::VectorXd ci_hi;
  std::int64_t samples = 0;
};

struct WilsonInterval {
  double lo;
  double hi;
};

/// 95% Wilson score interval by default.
WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z = 1.959964);

SurvivalCurve survival_curve(const ExitBatch& batch, const Eigen::VectorXd& time_grid);
SurvivalCurve survival_curve_from_times(const Eigen::Ref<const Eigen::VectorXd>& exit_times,
                                        const Eigen::VectorXd& time_grid);

/// Weighted least-squares fit of -d/dt log survival over [t_min, t_max].
struct DecayFit {
  double rate = 0.0;
  double rate_stderr = 0.0;
  double intercept = 0.0;
  int points_used = 0;
};
DecayFit fit_survival_decay(const SurvivalCurve& curve, double t_min, double t_max);

/// Monte Carlo check of the space-time scaling identity: survival of Omega at
/// t/eps^2 against survival of delta_eps(Omega) at t started from delta_eps(x),
/// with the step size scaled by eps^2 on the dilated side.
struct ScalingCheckReport {
  double eps = 1.0;
  double t = 0.0;
  double survival_stretched = 0.0;  // P(tau_Omega > t/eps^2)
  double stretched_lo = 0.0, stretched_hi = 0.0;
  double survival_dilated = 0.0;  // P(tau_{Omega_eps} > t)
  double dilated_lo = 0.0, dilated_hi = 0.0;
  double z_statistic = 0.0;
  std::int64_t trajectories = 0;
};
ScalingCheckReport scaling_check(const Domain& domain, const SimConfig& config, double eps,
                                 double t, const Point& start);

}  // namespace sublab::sim
