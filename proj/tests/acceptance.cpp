// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Heavy runs share intermediate results (grid eigen-systems
// feed the Monte Carlo cross-checks).

#include "sublab/asym/asymptotics.hpp"
#include "sublab/carnot/catalog.hpp"
#include "sublab/spectral/analysis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace sublab;
using carnot::NormKind;
using carnot::Point;
using carnot::Vec;

namespace {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

struct Criterion {
  int number;
  std::string name;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Criterion> results;

void record(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
  results.push_back({number, name, pass, detail, seconds});
  std::printf("[%d/9] %s  %s (%s; %.1f s)\n", number, pass ? "PASS" : "FAIL", name.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
}

double lambda_disk_exact() {
  return 0.5 * spectral::kBesselJ0FirstZero * spectral::kBesselJ0FirstZero;
}

Point random_point(const carnot::GroupSpec& spec, sim::Xoshiro256pp& rng, double scale) {
  Point p(spec.dim());
  for (int i = 0; i < spec.dim(); ++i) p[i] = scale * (2.0 * rng.uniform() - 1.0);
  return p;
}

// ----------------------------------------------------------------- 1
void criterion_group_laws() {
  const auto t0 = clock_type::now();
  double worst = 0.0;
  const std::vector<std::string> names = {"heisenberg", "engel", "euclidean2", "free3-step2"};
  for (const auto& name : names) {
    const auto g = carnot::group_by_name(name);
    sim::Xoshiro256pp rng(2024);
    const Point zero = Point::Zero(g.dim());
    for (int it = 0; it < 1000; ++it) {
      const Point x = random_point(g, rng, 1.5);
      const Point y = random_point(g, rng, 1.5);
      const Point z = random_point(g, rng, 1.5);
      const double a = 0.2 + 2.3 * rng.uniform();

      worst = std::max(worst, (g.product(g.product(x, y), z) - g.product(x, g.product(y, z)))
                                  .lpNorm<Eigen::Infinity>());
      worst = std::max(worst, (g.product(x, zero) - x).lpNorm<Eigen::Infinity>());
      worst = std::max(worst, g.product(x, g.inverse(x)).lpNorm<Eigen::Infinity>());
      worst = std::max(
          worst, (carnot::dilate(g, a, g.product(x, y)) -
                  g.product(carnot::dilate(g, a, x), carnot::dilate(g, a, y)))
                     .lpNorm<Eigen::Infinity>());
      for (const auto kind : {NormKind::Gauge16, NormKind::GaugeRho, NormKind::LayerMax}) {
        if (!carnot::norm_supported(g, kind)) continue;
        const double n1 = carnot::homogeneous_norm(g, kind, x);
        if (n1 < 1e-8) continue;
        const double n2 = carnot::homogeneous_norm(g, kind, carnot::dilate(g, a, x));
        worst = std::max(worst, std::abs(n2 / (a * n1) - 1.0));
        worst = std::max(worst,
                         std::abs(carnot::homogeneous_norm(g, kind, -x) / n1 - 1.0));
      }
    }
  }
  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::ostringstream os;
  os << "max error " << worst << " over 1000 samples/group";
  record(1, "group-law property suite", worst < 1e-10 && dt < 10.0, os.str(), dt);
}

// ----------------------------------------------------------------- 2
void criterion_gauge_harmonicity() {
  const auto t0 = clock_type::now();
  const auto hg = carnot::heisenberg();
  const std::vector<double> meshes = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> residuals;
  for (double h : meshes)
    residuals.push_back(
        spectral::gauge_harmonicity_residual(hg, NormKind::Gauge16, 1.0, 2.0, h));
  bool pass = true;
  std::ostringstream os;
  os << "residuals";
  for (double r : residuals) os << " " << r;
  os << "; ratios";
  for (size_t i = 1; i < residuals.size(); ++i) {
    const double ratio = residuals[i - 1] / residuals[i];
    os << " " << ratio;
    pass = pass && ratio > 2.5 && ratio < 6.0;  // ~4x per halving
  }
  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  record(2, "gauge harmonicity at rate h^2", pass && dt < 60.0, os.str(), dt);
}

// ----------------------------------------------------------------- 3
spectral::GridEigenSystem criterion_euclidean_oracle() {
  const auto t0 = clock_type::now();
  const auto e2 = carnot::euclidean(2);
  const auto disk = sim::Domain::gauge_ball(e2, NormKind::GaugeRho, 1.0);

  const auto op = spectral::assemble(e2, disk, 1.0 / 64);
  spectral::EigenOptions eopts;
  auto sys = spectral::leading_eigenpairs(op, 10, 1e-6, eopts);
  const double grid_err = sys.lambdas[0] / lambda_disk_exact() - 1.0;

  sim::SimConfig cfg;
  cfg.step_size = 1e-4;
  cfg.horizon = 2.0;
  cfg.trajectories = 1000000;
  cfg.base_seed = 31;
  const auto batch = sim::sample_exit_batch(disk, cfg, Point::Zero(2));
  const auto curve = sim::survival_curve(batch, Eigen::VectorXd::LinSpaced(60, 0.05, 2.0));
  const auto fit = sim::fit_survival_decay(curve, 0.75, 2.0);
  const double mc_err = fit.rate / lambda_disk_exact() - 1.0;

  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::ostringstream os;
  os << "grid lambda1 " << sys.lambdas[0] << " (" << 100 * grid_err << "%), MC rate " << fit.rate
     << " (" << 100 * mc_err << "%)";
  record(3, "euclidean disk oracle", std::abs(grid_err) < 0.02 && std::abs(mc_err) < 0.05 &&
                                         dt < 600.0,
         os.str(), dt);
  return sys;
}

// ----------------------------------------------------------------- 4
struct HeisenbergSpectralData {
  spectral::GridOperator op;
  spectral::GridEigenSystem sys;
};

std::optional<HeisenbergSpectralData> criterion_gap_bracket() {
  const auto t0 = clock_type::now();
  const auto hg = carnot::heisenberg();
  const auto gb = spectral::gap_bounds();

  HeisenbergSpectralData data;
  data.op = spectral::assemble(hg, sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0), 1.0 / 48);
  data.sys = spectral::leading_eigenpairs(data.op, 10, 1e-6);
  const double l1 = data.sys.lambdas[0];

  const auto op16 =
      spectral::assemble(hg, sim::Domain::gauge_ball(hg, NormKind::Gauge16, 1.0), 1.0 / 48);
  const auto sys16 = spectral::leading_eigenpairs(op16, 3, 1e-6);

  const bool inside = l1 >= gb.lower && l1 <= gb.upper;
  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::ostringstream os;
  os << "rho-gauge lambda1 " << l1 << " in [" << gb.lower << ", " << gb.upper
     << "]; gauge16 ball lambda1 " << sys16.lambdas[0] << " (reported)";
  record(4, "spectral gap bracket at h=1/48", inside && dt < 1800.0, os.str(), dt);
  if (!inside) return std::nullopt;
  return data;
}

// ----------------------------------------------------------------- 5
void criterion_simplicity_positivity(const std::optional<HeisenbergSpectralData>& data) {
  const auto t0 = clock_type::now();
  if (!data) {
    record(5, "simplicity and positivity", false, "skipped: no eigen-system from criterion 4",
           0.0);
    return;
  }
  const auto& sys = data->sys;
  const double tol = 1e-6;
  const bool gap_pos = sys.lambdas[0] > 0.0;
  const bool simple = sys.lambdas[1] - sys.lambdas[0] > 10.0 * tol;
  const auto diag = spectral::eigenfunction_diagnostics(data->op, sys);

  // Kernel columns at a coarser mesh keep the stepping budget small. The
  // check runs at t = 2, where the ground state dominates every node pair; at
  // small t the true far-field kernel lies below the stencil's transient
  // error scale, so its sign cannot be resolved on any practical mesh.
  const auto hg = carnot::heisenberg();
  const auto op24 =
      spectral::assemble(hg, sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0), 1.0 / 24);
  sim::Xoshiro256pp rng(55);
  std::vector<int> sources;
  for (int k = 0; k < 10; ++k) sources.push_back(static_cast<int>(rng.uniform() * op24.size()));
  const auto pos = spectral::heat_kernel_positivity_check(op24, 2.0, sources);

  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::ostringstream os;
  os << "lambda1 " << sys.lambdas[0] << ", gap " << sys.lambdas[1] - sys.lambdas[0]
     << ", one-signed " << (diag.ground_state_one_signed ? "yes" : "no") << ", min kernel "
     << pos.min_value.minCoeff();
  record(5, "simplicity and positivity",
         gap_pos && simple && diag.ground_state_one_signed && pos.all_positive, os.str(), dt);
}

// ----------------------------------------------------------------- 6
void criterion_scaling_identity() {
  const auto t0 = clock_type::now();
  const auto hg = carnot::heisenberg();
  const auto ball = sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 1e-3;
  cfg.horizon = 1.0;
  cfg.trajectories = 100000;
  cfg.base_seed = 67;
  bool pass = true;
  std::ostringstream os;
  for (double eps : {0.5, 0.25}) {
    const auto rep = sim::scaling_check(ball, cfg, eps, 0.25, Point::Zero(3));
    os << "eps " << eps << ": z = " << rep.z_statistic << "  ";
    pass = pass && std::abs(rep.z_statistic) < 3.0;
  }
  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  record(6, "space-time scaling identity", pass, os.str(), dt);
}

// ----------------------------------------------------------------- 7
void criterion_small_deviation(const std::optional<HeisenbergSpectralData>& data) {
  const auto t0 = clock_type::now();
  if (!data) {
    record(7, "small-deviation rate", false, "skipped: no eigen-system from criterion 4", 0.0);
    return;
  }
  const double lambda_grid = data->sys.lambdas[0];
  const auto hg = carnot::heisenberg();
  const auto ball = sim::Domain::gauge_ball(hg, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 5e-4;
  cfg.trajectories = 300000;
  cfg.base_seed = 71;
  Eigen::VectorXd eps(5);
  eps << 1.0, 0.707, 0.5, 0.354, 0.25;
  const auto rep = asym::small_deviation_experiment(ball, cfg, eps, 0.1,
                                                    asym::SmallDevPath::StretchTime, lambda_grid);
  const double rel = rep.fitted_lambda1 / lambda_grid - 1.0;
  // stabilization: rate increments shrink as eps decreases
  const int ne = static_cast<int>(rep.rate.size());
  const double first_step = std::abs(rep.rate[1] - rep.rate[0]);
  const double last_step = std::abs(rep.rate[ne - 1] - rep.rate[ne - 2]);
  const bool stabilized = last_step < first_step;

  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::ostringstream os;
  os << "fitted lambda1 " << rep.fitted_lambda1 << " vs grid " << lambda_grid << " ("
     << 100 * rel << "%); rate steps " << first_step << " -> " << last_step;
  record(7, "small-deviation rate", std::abs(rel) < 0.10 && stabilized, os.str(), dt);
}

// ----------------------------------------------------------------- 8
void criterion_heat_content(const spectral::GridEigenSystem& disk_sys) {
  const auto t0 = clock_type::now();
  const auto e2 = carnot::euclidean(2);
  const auto disk = sim::Domain::gauge_ball(e2, NormKind::GaugeRho, 1.0);
  sim::SimConfig cfg;
  cfg.step_size = 2.5e-4;
  cfg.horizon = 1.45;
  cfg.trajectories = 2000000;
  cfg.base_seed = 83;
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(28, 0.05, 1.4);
  const auto curve = asym::heat_content(disk, cfg, grid, disk_sys);

  const double q0_gap = std::abs(curve.q0_estimate / curve.volume - 1.0);
  double flat_lo = 1e300, flat_hi = 0.0, ref_dev = 0.0;
  int window_points = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2.0 / curve.lambda1 || grid[i] > 4.0 / curve.lambda1) continue;
    ++window_points;
    flat_lo = std::min(flat_lo, curve.rescaled[i]);
    flat_hi = std::max(flat_hi, curve.rescaled[i]);
    ref_dev = std::max(ref_dev, std::abs(curve.content[i] / curve.reference[i] - 1.0));
  }
  const bool flat = window_points >= 3 && flat_hi / flat_lo < 1.10;
  const bool matches = ref_dev < 0.10;

  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::ostringstream os;
  os << "Q(0+) gap " << 100 * q0_gap << "%, plateau spread "
     << 100 * (flat_hi / flat_lo - 1.0) << "%, max ref deviation " << 100 * ref_dev << "% over "
     << window_points << " pts";
  record(8, "heat content large-time behavior", q0_gap < 0.03 && flat && matches, os.str(), dt);
}

// ----------------------------------------------------------------- 9
void criterion_determinism() {
  const auto t0 = clock_type::now();
  const fs::path base = fs::temp_directory_path() / "sublab_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  auto run_cli = [&](const std::string& args) {
    const std::string cmd =
        std::string(SUBLAB_CLI) + " " + args + " > " + (base / "log.txt").string() + " 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  bool pass = true;
  const std::string a = (base / "a").string(), b = (base / "b").string(),
                    c = (base / "c").string();
  pass &= run_cli("simulate --group heisenberg --radius 1 --steps 2e-3 --horizon 0.5 "
                  "--trajectories 5000 --seed 7 --out " + a);
  pass &= run_cli("simulate --group heisenberg --radius 1 --steps 2e-3 --horizon 0.5 "
                  "--trajectories 5000 --seed 7 --out " + b);
  pass &= run_cli("simulate --config " + a + "/manifest.json --out " + c);
  for (const char* f : {"exits.csv", "survival.csv", "summary.json"}) {
    pass &= slurp(fs::path(a) / f) == slurp(fs::path(b) / f);
    pass &= slurp(fs::path(a) / f) == slurp(fs::path(c) / f);
  }

  const std::string d = (base / "d").string(), e = (base / "e").string();
  pass &= run_cli("scalingcheck --group heisenberg --eps 0.5 --t 0.2 --steps 2e-3 "
                  "--trajectories 5000 --seed 19 --out " + d);
  pass &= run_cli("scalingcheck --config " + d + "/manifest.json --out " + e);
  pass &= slurp(fs::path(d) / "scalingcheck.csv") == slurp(fs::path(e) / "scalingcheck.csv");
  pass &= slurp(fs::path(d) / "summary.json") == slurp(fs::path(e) / "summary.json");

  const double dt = std::chrono::duration<double>(clock_type::now() - t0).count();
  record(9, "manifest determinism", pass, "repeat and rerun byte-identical", dt);
}

}  // namespace

int main() {
  std::printf("sublab acceptance suite\n");
  criterion_group_laws();
  criterion_gauge_harmonicity();
  const auto disk_sys = criterion_euclidean_oracle();
  const auto heis = criterion_gap_bracket();
  criterion_simplicity_positivity(heis);
  criterion_scaling_identity();
  criterion_small_deviation(heis);
  criterion_heat_content(disk_sys);
  criterion_determinism();

  int passed = 0;
  for (const auto& r : results) passed += r.pass ? 1 : 0;
  std::printf("ACCEPTANCE: %d/9 criteria passed\n", passed);
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}
