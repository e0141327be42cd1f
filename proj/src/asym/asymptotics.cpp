#include "sublab/asym/asymptotics.hpp"

#include "sublab/sim/parallel.hpp"
#include "sublab/sim/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sublab::asym {

SmallDeviationReport small_deviation_experiment(const Domain& domain, const SimConfig& config,
                                                const Eigen::VectorXd& eps_grid, double t,
                                                SmallDevPath path, double reference_lambda1) {
  if (eps_grid.size() < 1) throw std::invalid_argument("small deviation: empty eps grid");
  for (int i = 1; i < eps_grid.size(); ++i)
    if (!(eps_grid[i] < eps_grid[i - 1]))
      throw std::invalid_argument("small deviation: eps grid must be strictly decreasing");
  if (!(eps_grid.maxCoeff() <= 1.0) || !(eps_grid.minCoeff() > 0.0))
    throw std::invalid_argument("small deviation: eps must lie in (0, 1]");
  if (!(t > 0.0)) throw std::invalid_argument("small deviation: t must be positive");
  const Point start = Point::Zero(domain.spec().dim());
  if (!domain.contains(start))
    throw std::invalid_argument("small deviation: identity not inside the domain");

  const int ne = static_cast<int>(eps_grid.size());
  SmallDeviationReport rep;
  rep.epsilons = eps_grid;
  rep.t = t;
  rep.path = path;
  rep.reference_lambda1 = reference_lambda1;
  rep.survival.resize(ne);
  rep.ci_lo.resize(ne);
  rep.ci_hi.resize(ne);
  rep.rate.resize(ne);

  for (int i = 0; i < ne; ++i) {
    const double eps = eps_grid[i];
    SimConfig run = config;
    run.base_seed = sim::derive_seed(config.base_seed, static_cast<std::uint64_t>(i), 0);
    sim::ExitBatch batch = [&] {
      if (path == SmallDevPath::StretchTime) {
        run.horizon = t / (eps * eps);
        return sim::sample_exit_batch(domain, run, start);
      }
      run.horizon = t;
      run.step_size = config.step_size * eps * eps;
      return sim::sample_exit_batch(domain.dilated(eps), run, start);
    }();
    const std::int64_t alive = batch.size() - batch.exited();
    if (alive == 0) {
      std::ostringstream os;
      os << "small deviation: no survivors at eps = " << eps
         << "; increase trajectories or shrink the horizon";
      throw std::runtime_error(os.str());
    }
    rep.survival[i] = static_cast<double>(alive) / batch.size();
    const auto ci = sim::wilson_interval(alive, batch.size());
    rep.ci_lo[i] = ci.lo;
    rep.ci_hi[i] = ci.hi;
    rep.rate[i] = -eps * eps * std::log(rep.survival[i]);
  }

  // rate(eps) = L + a eps^2, least squares over the three smallest eps
  const int fit_n = std::min(3, ne);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = ne - fit_n; i < ne; ++i) {
    const double x = eps_grid[i] * eps_grid[i];
    sx += x;
    sy += rep.rate[i];
    sxx += x * x;
    sxy += x * rep.rate[i];
  }
  if (fit_n >= 2) {
    const double det = fit_n * sxx - sx * sx;
    rep.extrapolated_rate = (sxx * sy - sx * sxy) / det;
  } else {
    rep.extrapolated_rate = rep.rate[ne - 1];
  }
  rep.fitted_lambda1 = rep.extrapolated_rate / t;
  return rep;
}

SupNormEstimate sup_norm_event_probability(const GroupSpec& spec, NormKind norm,
                                           const SimConfig& config, double eps, double t) {
  if (!(eps > 0.0)) throw std::invalid_argument("sup norm event: eps must be positive");
  SimConfig run = config;
  run.horizon = t;
  const Domain ball = Domain::gauge_ball(spec, norm, eps);
  sim::ExitBatch batch = sim::sample_exit_batch(ball, run, Point::Zero(spec.dim()));
  const std::int64_t alive = batch.size() - batch.exited();
  SupNormEstimate est;
  est.eps = eps;
  est.t = t;
  est.probability = static_cast<double>(alive) / batch.size();
  const auto ci = sim::wilson_interval(alive, batch.size());
  est.lo = ci.lo;
  est.hi = ci.hi;
  return est;
}

HeatContentCurve heat_content(const Domain& domain, const SimConfig& config,
                              const Eigen::VectorXd& time_grid,
                              const spectral::GridEigenSystem& eig) {
  config.validate();
  if (time_grid.size() == 0) throw std::invalid_argument("heat content: empty time grid");
  if (time_grid.minCoeff() < 0.0) throw std::invalid_argument("heat content: negative time");
  if (time_grid.maxCoeff() > config.horizon + 1e-12)
    throw std::invalid_argument("heat content: grid exceeds the simulated horizon");
  if (eig.domain_signature != domain.signature())
    throw std::invalid_argument("heat content: eigen data computed for a different domain (" +
                                eig.domain_signature + " vs " + domain.signature() + ")");

  const int nt = static_cast<int>(time_grid.size());
  const std::int64_t m = config.trajectories;
  const Vec lo = domain.bounding_lo();
  const Vec hi = domain.bounding_hi();
  const double box_volume = (hi - lo).prod();
  const int dim = domain.spec().dim();

  // per-sample exit time; kNoExit when censored, NaN when start was rejected
  Eigen::VectorXd tau(m);
  const std::int64_t steps = config.steps();
  sim::parallel_chunks(m, config.workers, [&](std::int64_t b, std::int64_t e, int) {
    sim::TrajectorySimulator tsim(domain.spec(), config.scheme, config.step_size);
    Vec start(dim);
    for (std::int64_t i = b; i < e; ++i) {
      tsim.reseed(sim::derive_seed(config.base_seed, 0x4ea7ull, static_cast<std::uint64_t>(i)));
      auto& rng = tsim.engine();
      for (int j = 0; j < dim; ++j) start[j] = rng.uniform(lo[j], hi[j]);
      if (!domain.contains(start)) {
        tau[i] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const std::int64_t k = tsim.run_exit(domain, start, steps);
      tau[i] = k > 0 ? k * config.step_size : sim::kNoExit;
    }
  });

  std::int64_t accepted = 0;
  for (std::int64_t i = 0; i < m; ++i)
    if (!std::isnan(tau[i])) ++accepted;

  HeatContentCurve curve;
  curve.times = time_grid;
  curve.samples = m;
  curve.volume = domain.volume();
  curve.lambda1 = eig.lambdas[0];
  curve.c1_squared = eig.mass[0] * eig.mass[0];
  curve.q0_estimate = box_volume * static_cast<double>(accepted) / static_cast<double>(m);
  curve.content.resize(nt);
  curve.ci_lo.resize(nt);
  curve.ci_hi.resize(nt);
  curve.rescaled.resize(nt);
  curve.reference.resize(nt);

  for (int it = 0; it < nt; ++it) {
    const double t = time_grid[it];
    std::int64_t alive = 0;
    for (std::int64_t i = 0; i < m; ++i)
      if (!std::isnan(tau[i]) && tau[i] > t) ++alive;
    curve.content[it] = box_volume * static_cast<double>(alive) / static_cast<double>(m);
    const auto ci = sim::wilson_interval(alive, m);
    curve.ci_lo[it] = box_volume * ci.lo;
    curve.ci_hi[it] = box_volume * ci.hi;
    curve.rescaled[it] = std::exp(curve.lambda1 * t) * curve.content[it];
    double ref = 0.0;
    for (int j = 0; j < eig.count(); ++j)
      ref += std::exp(-eig.lambdas[j] * t) * eig.mass[j] * eig.mass[j];
    curve.reference[it] = ref;
  }
  return curve;
}

RegularityProbeReport boundary_regularity_probe(const Domain& domain, const SimConfig& config,
                                                const Eigen::MatrixXd& points,
                                                const Eigen::VectorXd& t_grid,
                                                double boundary_tol) {
  if (points.rows() != domain.spec().dim())
    throw std::invalid_argument("regularity probe: bad point dimension");
  if (t_grid.size() == 0) throw std::invalid_argument("regularity probe: empty time grid");
  if (t_grid.maxCoeff() > config.horizon + 1e-12)
    throw std::invalid_argument("regularity probe: grid exceeds the simulated horizon");
  for (int i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]))
      throw std::invalid_argument("regularity probe: time grid must be increasing");

  const int np = static_cast<int>(points.cols());
  for (int p = 0; p < np; ++p) {
    const Vec x = points.col(p);
    double dist;
    if (domain.kind() == Domain::Kind::GaugeBall) {
      Vec shifted = domain.center().isZero(0.0)
                        ? x
                        : domain.spec().product(-domain.center(), x);
      dist = std::abs(carnot::homogeneous_norm(domain.spec(), domain.norm(), shifted) -
                      domain.radius());
    } else {
      const Vec lo = domain.bounding_lo(), hi = domain.bounding_hi();
      double face = std::numeric_limits<double>::infinity();
      double outside = 0.0;
      for (int j = 0; j < x.size(); ++j) {
        face = std::min({face, std::abs(x[j] - lo[j]), std::abs(hi[j] - x[j])});
        outside = std::max({outside, lo[j] - x[j], x[j] - hi[j]});
      }
      dist = std::max(face, outside);
    }
    if (dist > boundary_tol)
      throw std::invalid_argument("regularity probe: point " + std::to_string(p) +
                                  " is not on the boundary (distance " + std::to_string(dist) +
                                  ")");
  }

  RegularityProbeReport rep;
  rep.points = points;
  rep.times = t_grid;
  rep.survival.resize(np, t_grid.size());
  rep.ci_hi.resize(np, t_grid.size());
  rep.suspect.assign(np, false);

  const std::int64_t m = config.trajectories;
  const std::int64_t steps = config.steps();
  for (int p = 0; p < np; ++p) {
    Eigen::VectorXd tau(m);
    sim::parallel_chunks(m, config.workers, [&](std::int64_t b, std::int64_t e, int) {
      sim::TrajectorySimulator tsim(domain.spec(), config.scheme, config.step_size);
      for (std::int64_t i = b; i < e; ++i) {
        tsim.reseed(sim::derive_seed(config.base_seed, 0xb0dull + p,
                                     static_cast<std::uint64_t>(i)));
        const std::int64_t k = tsim.run_exit(domain, points.col(p), steps);
        tau[i] = k > 0 ? k * config.step_size : sim::kNoExit;
      }
    });
    for (int it = 0; it < t_grid.size(); ++it) {
      std::int64_t alive = 0;
      for (std::int64_t i = 0; i < m; ++i)
        if (tau[i] > t_grid[it]) ++alive;
      rep.survival(p, it) = static_cast<double>(alive) / static_cast<double>(m);
      rep.ci_hi(p, it) = sim::wilson_interval(alive, m).hi;
    }
    // heuristic only: flagged when survival at the smallest horizon stays large
    rep.suspect[p] = rep.survival(p, 0) > 0.5;
  }
  return rep;
}

}  // namespace sublab::asym
