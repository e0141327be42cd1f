#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sublab/carnot/catalog.hpp"
#include "sublab/sim/simulate.hpp"

#include <cmath>
#include <vector>

using namespace sublab;
using carnot::NormKind;
using carnot::Point;

namespace {

// Dirichlet series for standard BM killed on the unit disk, started at the
// center: P(tau > t) = sum_k 2/(j_{0k} J1(j_{0k})) exp(-j_{0k}^2 t / 2).
// Zeros found by bisection of J0; independent of the simulator.
double disk_survival(double t) {
  auto j0 = [](double x) { return std::cyl_bessel_j(0.0, x); };
  static const std::vector<std::pair<double, double>> brackets = {
      {2.0, 3.0}, {5.0, 6.0}, {8.0, 9.0}, {11.0, 12.0}, {14.0, 15.0}};
  double p = 0.0;
  for (const auto& [lo0, hi0] : brackets) {
    double a = lo0, b = hi0;
    for (int i = 0; i < 80; ++i) {
      const double m = 0.5 * (a + b);
      (j0(a) * j0(m) <= 0.0 ? b : a) = m;
    }
    const double z = 0.5 * (a + b);
    p += 2.0 / (z * std::cyl_bessel_j(1.0, z)) * std::exp(-0.5 * z * z * t);
  }
  return p;
}

double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double s2 = 0.0;
  for (double x : v) s2 += (x - mean) * (x - mean);
  return s2 / (v.size() - 1);
}

}  // namespace

TEST_CASE("config validation") {
  sim::SimConfig cfg;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.step_size = 0.5;
  cfg.horizon = 0.1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.horizon = 1.0;
  cfg.trajectories = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("unbounded domains are rejected") {
  const auto e2 = carnot::euclidean(2);
  CHECK_THROWS_AS(
      sim::Domain::gauge_ball(e2, NormKind::GaugeRho, std::numeric_limits<double>::infinity()),
      std::invalid_argument);
  CHECK_THROWS_AS(sim::Domain::gauge_ball(e2, NormKind::GaugeRho, -1.0), std::invalid_argument);
}

TEST_CASE("exit batches are reproducible and worker-count independent") {
  const auto hg = carnot::heisenberg();
  const auto ball = sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 2e-3;
  cfg.horizon = 1.0;
  cfg.trajectories = 512;
  cfg.base_seed = 99;

  cfg.workers = 2;
  const auto a = sim::sample_exit_batch(ball, cfg, Point::Zero(3));
  const auto b = sim::sample_exit_batch(ball, cfg, Point::Zero(3));
  cfg.workers = 1;
  const auto c = sim::sample_exit_batch(ball, cfg, Point::Zero(3));

  CHECK(a.exit_times == b.exit_times);
  CHECK(a.exit_points == b.exit_points);
  CHECK(a.exit_times == c.exit_times);
  CHECK(a.exit_points == c.exit_points);

  // finite exits land outside, censored trajectories stay inside
  for (int m = 0; m < a.size(); ++m) {
    if (a.exit_times[m] != sim::kNoExit) {
      CHECK(a.exit_times[m] > 0.0);
      CHECK(a.exit_times[m] <= cfg.horizon + 1e-12);
      CHECK(!ball.contains(a.exit_points.col(m)));
    } else {
      CHECK(ball.contains(a.exit_points.col(m)));
    }
  }

  CHECK_THROWS_AS(sim::sample_exit_batch(ball, cfg, 2.0 * Point::Ones(3)),
                  std::invalid_argument);
}

TEST_CASE("wilson interval and survival counting") {
  Eigen::VectorXd taus(3);
  taus << 0.5, 1.5, sim::kNoExit;
  Eigen::VectorXd grid(3);
  grid << 0.0, 1.0, 2.0;
  const auto curve = sim::survival_curve_from_times(taus, grid);
  CHECK(curve.survival[0] == doctest::Approx(1.0));
  CHECK(curve.survival[1] == doctest::Approx(2.0 / 3.0));
  CHECK(curve.survival[2] == doctest::Approx(1.0 / 3.0));
  // frozen Wilson values for 2 successes out of 3 at z = 1.959964
  CHECK(curve.ci_lo[1] == doctest::Approx(0.20765).epsilon(1e-3));
  CHECK(curve.ci_hi[1] == doctest::Approx(0.93851).epsilon(1e-3));

  // all censored: survival identically one
  Eigen::VectorXd inf_taus = Eigen::VectorXd::Constant(10, sim::kNoExit);
  const auto flat = sim::survival_curve_from_times(inf_taus, grid);
  CHECK(flat.survival.minCoeff() == 1.0);
  CHECK(flat.ci_hi[0] == doctest::Approx(1.0));

  Eigen::VectorXd empty;
  CHECK_THROWS_AS(sim::survival_curve_from_times(empty, grid), std::invalid_argument);
}

TEST_CASE("survival is exactly nonincreasing for a fixed batch") {
  const auto e2 = carnot::euclidean(2);
  const auto disk = sim::Domain::gauge_ball(e2, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 1e-3;
  cfg.horizon = 2.0;
  cfg.trajectories = 2000;
  cfg.base_seed = 1;
  const auto batch = sim::sample_exit_batch(disk, cfg, Point::Zero(2));
  const auto curve = sim::survival_curve(batch, Eigen::VectorXd::LinSpaced(64, 0.0, 2.0));
  for (int i = 1; i < curve.times.size(); ++i) CHECK(curve.survival[i] <= curve.survival[i - 1]);
  CHECK(curve.survival[0] == 1.0);

  Eigen::VectorXd beyond(1);
  beyond << 3.0;
  CHECK_THROWS_AS(sim::survival_curve(batch, beyond), std::invalid_argument);
}

TEST_CASE("euclidean paths are plain brownian motion") {
  const auto e2 = carnot::euclidean(2);
  sim::SimConfig cfg;
  cfg.step_size = 0.01;
  cfg.horizon = 1.0;
  cfg.base_seed = 5;
  const auto path = sim::sample_path(e2, cfg, Point::Zero(2));
  CHECK(path.cols() == 101);

  // increments have mean ~ 0 and variance ~ h per coordinate
  std::vector<double> incs;
  for (int k = 1; k < path.cols(); ++k)
    for (int j = 0; j < 2; ++j) incs.push_back(path(j, k) - path(j, k - 1));
  const double var = sample_variance(incs);
  CHECK(var == doctest::Approx(cfg.step_size).epsilon(0.25));

  // terminal variance ~ horizon, over many paths
  std::vector<double> terminal;
  for (int m = 0; m < 400; ++m) {
    sim::SimConfig c2 = cfg;
    c2.base_seed = sim::derive_seed(1000, m);
    terminal.push_back(sim::sample_path(e2, c2, Point::Zero(2))(0, 100));
  }
  CHECK(sample_variance(terminal) == doctest::Approx(1.0).epsilon(0.3));
}

TEST_CASE("heisenberg vertical variance matches a step-refined oracle") {
  const auto hg = carnot::heisenberg();
  const int m = 20000;
  auto vertical_variance = [&](double h, std::uint64_t salt) {
    sim::SimConfig cfg;
    cfg.step_size = h;
    cfg.horizon = 1.0;
    std::vector<double> x3(m);
    sim::TrajectorySimulator tsim(hg, sim::Scheme::GeometricEuler, h);
    const auto steps = static_cast<std::int64_t>(std::llround(1.0 / h));
    for (int i = 0; i < m; ++i) {
      tsim.reseed(sim::derive_seed(123, salt, i));
      Point g = Point::Zero(3);
      // no domain: free path
      for (std::int64_t k = 0; k < steps; ++k) tsim.step(g);
      x3[i] = g[2];
    }
    return sample_variance(x3);
  };
  const double coarse = vertical_variance(1e-2, 1);
  const double fine = vertical_variance(1e-4, 2);
  // sd of a sample variance of ~ t^2/4 at m = 2e4 is about 0.0025
  CHECK(std::abs(coarse - fine) < 0.02);
  // Levy-area variance of the oracle at t = 1 is 1/4
  CHECK(fine == doctest::Approx(0.25).epsilon(0.05));
  // first-layer mean ~ 0, variance ~ t is covered by the euclidean reduction
}

TEST_CASE("abelian reduction against the disk series") {
  const auto e2 = carnot::euclidean(2);
  const auto disk = sim::Domain::gauge_ball(e2, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 1e-3;
  cfg.horizon = 1.0;
  cfg.trajectories = 20000;
  cfg.base_seed = 3;
  const auto batch = sim::sample_exit_batch(disk, cfg, Point::Zero(2));
  Eigen::VectorXd grid(3);
  grid << 0.3, 0.6, 1.0;
  const auto curve = sim::survival_curve(batch, grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double oracle = disk_survival(grid[i]);
    const double width = curve.ci_hi[i] - curve.ci_lo[i];
    INFO("t = ", grid[i], " mc = ", curve.survival[i], " series = ", oracle);
    CHECK(std::abs(curve.survival[i] - oracle) < 3.0 * width);
  }
}

TEST_CASE("coordinate heun cross-checks the geometric euler law") {
  const auto hg = carnot::heisenberg();
  const auto ball = sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 1e-3;
  cfg.horizon = 0.5;
  cfg.trajectories = 20000;
  cfg.base_seed = 17;
  auto p_at = [&](sim::Scheme s, double t) {
    sim::SimConfig c = cfg;
    c.scheme = s;
    const auto batch = sim::sample_exit_batch(ball, c, Point::Zero(3));
    Eigen::VectorXd grid(1);
    grid << t;
    return sim::survival_curve(batch, grid);
  };
  const auto euler = p_at(sim::Scheme::GeometricEuler, 0.4);
  const auto heun = p_at(sim::Scheme::CoordinateHeun, 0.4);
  const double width = (euler.ci_hi[0] - euler.ci_lo[0]) + (heun.ci_hi[0] - heun.ci_lo[0]);
  CHECK(std::abs(euler.survival[0] - heun.survival[0]) < 2.0 * width);
}

TEST_CASE("step-size convergence with richardson extrapolation in sqrt h") {
  const auto e2 = carnot::euclidean(2);
  const auto disk = sim::Domain::gauge_ball(e2, NormKind::GaugeRho, 1.0);
  const double lambda = 2.891593;
  std::vector<double> hs = {4e-3, 1e-3, 2.5e-4};
  std::vector<double> rates, errs;
  for (double h : hs) {
    sim::SimConfig cfg;
    cfg.step_size = h;
    cfg.horizon = 2.0;
    cfg.trajectories = 60000;
    cfg.base_seed = 21;
    const auto batch = sim::sample_exit_batch(disk, cfg, Point::Zero(2));
    const auto curve = sim::survival_curve(batch, Eigen::VectorXd::LinSpaced(40, 0.05, 2.0));
    const auto fit = sim::fit_survival_decay(curve, 0.7, 1.9);
    rates.push_back(fit.rate);
    errs.push_back(fit.rate_stderr);
  }
  // rate estimates increase toward the true value as h shrinks
  CHECK(rates[0] < rates[1]);
  CHECK(rates[1] < rates[2]);
  // two-point Richardson in sqrt(h) from the finest pair
  const double s1 = std::sqrt(hs[1]), s2 = std::sqrt(hs[2]);
  const double extrap = (rates[2] * s1 - rates[1] * s2) / (s1 - s2);
  CHECK(std::abs(extrap - lambda) < 4.0 * (errs[1] + errs[2]));
}

TEST_CASE("euclidean scaling check matches the disk series on both sides") {
  const auto e2 = carnot::euclidean(2);
  const auto disk = sim::Domain::gauge_ball(e2, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 5e-4;
  cfg.horizon = 1.0;
  cfg.trajectories = 20000;
  cfg.base_seed = 23;
  const double eps = 0.5, t = 0.2;
  const auto rep = sim::scaling_check(disk, cfg, eps, t, Point::Zero(2));
  CHECK(std::abs(rep.z_statistic) < 4.0);
  // classical BM scaling: both sides estimate P(tau > t/eps^2) on the unit disk
  const double oracle = disk_survival(t / (eps * eps));
  const double wa = rep.stretched_hi - rep.stretched_lo;
  const double wb = rep.dilated_hi - rep.dilated_lo;
  CHECK(std::abs(rep.survival_stretched - oracle) < 3.0 * wa);
  CHECK(std::abs(rep.survival_dilated - oracle) < 3.0 * wb);
}

TEST_CASE("scaling check at eps = 1 compares two runs of the same experiment") {
  const auto hg = carnot::heisenberg();
  const auto ball = sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 1e-3;
  cfg.horizon = 1.0;
  cfg.trajectories = 20000;
  cfg.base_seed = 29;
  const auto rep = sim::scaling_check(ball, cfg, 1.0, 0.25, Point::Zero(3));
  CHECK(std::abs(rep.z_statistic) < 4.0);
  CHECK(rep.survival_stretched == doctest::Approx(rep.survival_dilated).epsilon(0.1));
}
