#include "sublab/sim/simulate.hpp"

#include "sublab/sim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sublab::sim {

std::string to_string(Scheme s) {
  return s == Scheme::GeometricEuler ? "geometric-euler" : "coordinate-heun";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "geometric-euler") return Scheme::GeometricEuler;
  if (s == "coordinate-heun") return Scheme::CoordinateHeun;
  throw std::invalid_argument("unknown scheme: " + s);
}

std::int64_t SimConfig::steps() const {
  return static_cast<std::int64_t>(std::floor(horizon / step_size + 1e-9));
}

void SimConfig::validate() const {
  if (!(step_size > 0.0) || !std::isfinite(step_size))
    throw std::invalid_argument("sim config: step size must be positive");
  if (!(horizon >= step_size) || !std::isfinite(horizon))
    throw std::invalid_argument("sim config: horizon must be >= step size");
  if (trajectories < 1) throw std::invalid_argument("sim config: trajectories must be >= 1");
}

TrajectorySimulator::TrajectorySimulator(const GroupSpec& spec, Scheme scheme, double step_size)
    : spec_(spec), scheme_(scheme), sqrt_h_(std::sqrt(step_size)) {
  const int n = spec.dim();
  g_.resize(n);
  inc_ = Vec::Zero(n);
  next_.resize(n);
  xi_.resize(spec.horizontal_dim());
}

void TrajectorySimulator::step(Vec& g) {
  const int d1 = spec_.horizontal_dim();
  if (scheme_ == Scheme::GeometricEuler) {
    for (int i = 0; i < d1; ++i) inc_[i] = sqrt_h_ * normal_();
    spec_.product_into(g, inc_, next_, ws_);
    g.swap(next_);
    return;
  }
  // Stratonovich midpoint in exponential coordinates
  for (int i = 0; i < d1; ++i) xi_[i] = sqrt_h_ * normal_();
  carnot::left_invariant_frame_into(spec_, g, frame_, ws_);
  next_.noalias() = g + frame_ * xi_;
  carnot::left_invariant_frame_into(spec_, next_, frame_mid_, ws_);
  g.noalias() += 0.5 * (frame_ + frame_mid_) * xi_;
}

std::int64_t TrajectorySimulator::run_exit(const Domain& domain,
                                           const Eigen::Ref<const Vec>& start,
                                           std::int64_t max_steps) {
  g_ = start;
  for (std::int64_t k = 1; k <= max_steps; ++k) {
    step(g_);
    if (!domain.contains(g_)) return k;
  }
  return 0;
}

std::int64_t ExitBatch::exited() const {
  std::int64_t n = 0;
  for (std::int64_t m = 0; m < exit_times.size(); ++m)
    if (exit_times[m] != kNoExit) ++n;
  return n;
}

Eigen::MatrixXd sample_path(const GroupSpec& spec, const SimConfig& config, const Point& start) {
  config.validate();
  if (start.size() != spec.dim()) throw std::invalid_argument("sample_path: bad start size");
  const std::int64_t steps = config.steps();
  Eigen::MatrixXd path(spec.dim(), steps + 1);
  TrajectorySimulator sim(spec, config.scheme, config.step_size);
  sim.reseed(config.base_seed ^ 0ull);
  Vec g = start;
  path.col(0) = g;
  for (std::int64_t k = 1; k <= steps; ++k) {
    sim.step(g);
    path.col(k) = g;
  }
  return path;
}

ExitBatch sample_exit_batch(const Domain& domain, const SimConfig& config, const Point& start) {
  config.validate();
  if (start.size() != domain.spec().dim())
    throw std::invalid_argument("sample_exit_batch: bad start size");
  if (!domain.contains(start))
    throw std::invalid_argument("sample_exit_batch: start point not inside the domain");

  ExitBatch batch;
  batch.start = start;
  batch.config = config;
  const std::int64_t m_total = config.trajectories;
  batch.exit_times.resize(m_total);
  batch.exit_points.resize(domain.spec().dim(), m_total);

  const std::int64_t steps = config.steps();
  const double h = config.step_size;
  parallel_chunks(m_total, config.workers, [&](std::int64_t b, std::int64_t e, int) {
    TrajectorySimulator sim(domain.spec(), config.scheme, h);
    for (std::int64_t m = b; m < e; ++m) {
      sim.reseed(config.base_seed ^ static_cast<std::uint64_t>(m));
      const std::int64_t k = sim.run_exit(domain, start, steps);
      batch.exit_times[m] = k > 0 ? k * h : kNoExit;
      batch.exit_points.col(m) = sim.state();
    }
  });
  return batch;
}

WilsonInterval wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SurvivalCurve survival_curve_from_times(const Eigen::Ref<const Eigen::VectorXd>& exit_times,
                                        const Eigen::VectorXd& time_grid) {
  const std::int64_t m = exit_times.size();
  if (m == 0) throw std::invalid_argument("survival_curve: empty batch");
  SurvivalCurve curve;
  curve.times = time_grid;
  curve.samples = m;
  const int nt = static_cast<int>(time_grid.size());
  curve.survival.resize(nt);
  curve.ci_lo.resize(nt);
  curve.ci_hi.resize(nt);

  std::vector<double> sorted(exit_times.data(), exit_times.data() + m);
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < nt; ++i) {
    const double t = time_grid[i];
    // survivors: tau > t
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
    const std::int64_t alive = sorted.end() - it;
    curve.survival[i] = static_cast<double>(alive) / static_cast<double>(m);
    const auto ci = wilson_interval(alive, m);
    curve.ci_lo[i] = ci.lo;
    curve.ci_hi[i] = ci.hi;
  }
  return curve;
}

SurvivalCurve survival_curve(const ExitBatch& batch, const Eigen::VectorXd& time_grid) {
  if (time_grid.size() > 0 && time_grid.maxCoeff() > batch.config.horizon + 1e-12)
    throw std::invalid_argument("survival_curve: grid exceeds the simulated horizon");
  if (time_grid.size() > 0 && time_grid.minCoeff() < 0.0)
    throw std::invalid_argument("survival_curve: negative time");
  return survival_curve_from_times(batch.exit_times, time_grid);
}

DecayFit fit_survival_decay(const SurvivalCurve& curve, double t_min, double t_max) {
  // weighted LS on log survival; weight = 1/Var(log p_hat) ~ m p/(1-p)
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  int used = 0;
  for (int i = 0; i < curve.times.size(); ++i) {
    const double t = curve.times[i];
    const double p = curve.survival[i];
    if (t < t_min || t > t_max || p <= 0.0 || p >= 1.0) continue;
    const double w = static_cast<double>(curve.samples) * p / (1.0 - p);
    const double y = std::log(p);
    sw += w;
    swx += w * t;
    swy += w * y;
    swxx += w * t * t;
    swxy += w * t * y;
    ++used;
  }
  if (used < 2) throw std::invalid_argument("fit_survival_decay: fewer than two usable points");
  const double det = sw * swxx - swx * swx;
  DecayFit fit;
  fit.points_used = used;
  const double slope = (sw * swxy - swx * swy) / det;
  fit.rate = -slope;
  fit.intercept = (swxx * swy - swx * swxy) / det;
  fit.rate_stderr = std::sqrt(sw / det);
  return fit;
}

ScalingCheckReport scaling_check(const Domain& domain, const SimConfig& config, double eps,
                                 double t, const Point& start) {
  if (!(eps > 0.0)) throw std::invalid_argument("scaling_check: eps must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("scaling_check: t must be positive");

  SimConfig stretched = config;
  stretched.horizon = t / (eps * eps);
  ExitBatch a = sample_exit_batch(domain, stretched, start);

  SimConfig dil = config;
  dil.horizon = t;
  dil.step_size = config.step_size * eps * eps;
  dil.base_seed = derive_seed(config.base_seed, 0x5ca11ull);
  ExitBatch b =
      sample_exit_batch(domain.dilated(eps), dil, carnot::dilate(domain.spec(), eps, start));

  const std::int64_t m = config.trajectories;
  const std::int64_t sa = m - a.exited();
  const std::int64_t sb = m - b.exited();

  ScalingCheckReport rep;
  rep.eps = eps;
  rep.t = t;
  rep.trajectories = m;
  rep.survival_stretched = static_cast<double>(sa) / m;
  rep.survival_dilated = static_cast<double>(sb) / m;
  const auto cia = wilson_interval(sa, m);
  const auto cib = wilson_interval(sb, m);
  rep.stretched_lo = cia.lo;
  rep.stretched_hi = cia.hi;
  rep.dilated_lo = cib.lo;
  rep.dilated_hi = cib.hi;
  const double pool = static_cast<double>(sa + sb) / (2.0 * m);
  const double var = pool * (1.0 - pool) * (2.0 / m);
  rep.z_statistic = var > 0.0 ? (rep.survival_stretched - rep.survival_dilated) / std::sqrt(var)
                              : 0.0;
  return rep;
}

}  // namespace sublab::sim
