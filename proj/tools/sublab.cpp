// sublab: numerical laboratory for hypoelliptic diffusions and Dirichlet
// sub-Laplacian spectra on homogeneous Carnot groups.

#include "sublab/asym/asymptotics.hpp"
#include "sublab/carnot/catalog.hpp"
#include "sublab/io/output.hpp"
#include "sublab/spectral/analysis.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace sublab;
using carnot::GroupSpec;
using carnot::NormKind;
using carnot::Point;
using carnot::Vec;
using io::OrderedJson;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- parsing

double parse_real(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const double num = std::stod(s.substr(0, slash));
    const double den = std::stod(s.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("bad fraction: " + s);
    return num / den;
  }
  return std::stod(s);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(parse_real(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + s);
  return out;
}

// "a..b" or "a..b:n" (inclusive linspace, default n = 25), or a comma list
Eigen::VectorXd parse_grid(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const auto v = parse_list(s);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<int>(v.size()));
  }
  const double a = parse_real(s.substr(0, dots));
  std::string rest = s.substr(dots + 2);
  int n = 25;
  const auto colon = rest.find(':');
  if (colon != std::string::npos) {
    n = std::stoi(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double b = parse_real(rest);
  if (n < 2 || !(b > a)) throw std::invalid_argument("bad grid spec: " + s);
  return Eigen::VectorXd::LinSpaced(n, a, b);
}

Point parse_point(int dim, const std::string& s) {
  const auto v = parse_list(s);
  if (static_cast<int>(v.size()) != dim)
    throw std::invalid_argument("point has " + std::to_string(v.size()) + " coordinates, need " +
                                std::to_string(dim));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

// ---------------------------------------------------------------- options

struct Options {
  std::string config_path;
  std::string group = "heisenberg";
  std::string spec_json;
  std::string norm = "gaugerho";
  double radius = 1.0;
  std::string start;  // empty = identity
  std::string steps = "1e-3";
  double horizon = 1.0;
  std::int64_t trajectories = 100000;
  std::uint64_t seed = 0;
  std::string scheme = "geometric-euler";
  std::string mesh = "1/32";
  int eigenpairs = 10;
  double tol = 1e-6;
  std::string eps = "1,0.7,0.5,0.35,0.25";
  std::string tgrid;
  double t = 0.25;
  int workers = 0;
  std::string out;
  bool no_modes = false;
  int positivity_sources = 0;
  double positivity_t = 0.1;
  std::string path = "stretch";
  double ref_lambda1 = 0.0;
  std::string points;
  std::string mul_a, mul_b;
  double dilate_by = 0.0;
  std::string point;
};

GroupSpec resolve_group(const Options& o) {
  if (!o.spec_json.empty()) return carnot::group_from_json_file(o.spec_json);
  return carnot::group_by_name(o.group);
}

sim::Domain resolve_domain(const GroupSpec& spec, const Options& o) {
  return sim::Domain::gauge_ball(spec, carnot::norm_from_string(o.norm), o.radius);
}

sim::SimConfig resolve_sim(const Options& o) {
  sim::SimConfig cfg;
  cfg.step_size = parse_real(o.steps);
  cfg.horizon = o.horizon;
  cfg.trajectories = o.trajectories;
  cfg.base_seed = o.seed;
  cfg.scheme = sim::scheme_from_string(o.scheme);
  cfg.workers = o.workers;
  return cfg;
}

Point resolve_start(const GroupSpec& spec, const Options& o) {
  if (o.start.empty()) return Point::Zero(spec.dim());
  return parse_point(spec.dim(), o.start);
}

OrderedJson manifest_json(const std::string& command, const Options& o) {
  OrderedJson m;
  m["tool"] = "sublab";
  m["version"] = kVersion;
  m["command"] = command;
  m["group"] = o.group;
  m["spec_json"] = o.spec_json;
  m["norm"] = o.norm;
  m["radius"] = o.radius;
  m["start"] = o.start;
  m["steps"] = o.steps;
  m["horizon"] = o.horizon;
  m["trajectories"] = o.trajectories;
  m["seed"] = o.seed;
  m["scheme"] = o.scheme;
  m["mesh"] = o.mesh;
  m["eigenpairs"] = o.eigenpairs;
  m["tol"] = o.tol;
  m["eps"] = o.eps;
  m["tgrid"] = o.tgrid;
  m["t"] = o.t;
  m["workers"] = o.workers;
  m["no_modes"] = o.no_modes;
  m["positivity_sources"] = o.positivity_sources;
  m["positivity_t"] = o.positivity_t;
  m["path"] = o.path;
  m["ref_lambda1"] = o.ref_lambda1;
  m["points"] = o.points;
  return m;
}

void apply_manifest(const std::string& path, const std::string& command, Options& o) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  nlohmann::json m;
  in >> m;
  if (m.contains("command") && m["command"].get<std::string>() != command)
    throw std::invalid_argument("config was written by subcommand '" +
                                m["command"].get<std::string>() + "', not '" + command + "'");
  o.group = m.value("group", o.group);
  o.spec_json = m.value("spec_json", o.spec_json);
  o.norm = m.value("norm", o.norm);
  o.radius = m.value("radius", o.radius);
  o.start = m.value("start", o.start);
  o.steps = m.value("steps", o.steps);
  o.horizon = m.value("horizon", o.horizon);
  o.trajectories = m.value("trajectories", o.trajectories);
  o.seed = m.value("seed", o.seed);
  o.scheme = m.value("scheme", o.scheme);
  o.mesh = m.value("mesh", o.mesh);
  o.eigenpairs = m.value("eigenpairs", o.eigenpairs);
  o.tol = m.value("tol", o.tol);
  o.eps = m.value("eps", o.eps);
  o.tgrid = m.value("tgrid", o.tgrid);
  o.t = m.value("t", o.t);
  o.workers = m.value("workers", o.workers);
  o.no_modes = m.value("no_modes", o.no_modes);
  o.positivity_sources = m.value("positivity_sources", o.positivity_sources);
  o.positivity_t = m.value("positivity_t", o.positivity_t);
  o.path = m.value("path", o.path);
  o.ref_lambda1 = m.value("ref_lambda1", o.ref_lambda1);
  o.points = m.value("points", o.points);
}

void write_manifest(const std::string& command, const Options& o) {
  io::ensure_dir(o.out);
  io::write_json(o.out + "/manifest.json", manifest_json(command, o));
}

void write_survival_csv(const std::string& path, const sim::SurvivalCurve& curve) {
  io::CsvTable table({"t", "survival", "ci_lo", "ci_hi"});
  for (int i = 0; i < curve.times.size(); ++i)
    table.add_row({curve.times[i], curve.survival[i], curve.ci_lo[i], curve.ci_hi[i]});
  table.write(path);
}

std::string format_point(const Eigen::Ref<const Vec>& x) {
  std::string s;
  for (int j = 0; j < x.size(); ++j) {
    if (j) s += ',';
    s += io::format_double(x[j]);
  }
  return s;
}

// ---------------------------------------------------------------- commands

int cmd_group(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  std::cout << "group: " << spec.name() << "\n";
  std::cout << "step r = " << spec.step() << ", N = " << spec.dim()
            << ", Q = " << spec.homogeneous_dim() << "\n";
  std::cout << "layers d = (";
  for (size_t i = 0; i < spec.layer_dims().size(); ++i)
    std::cout << (i ? ", " : "") << spec.layer_dims()[i];
  std::cout << ")\nsigma = (";
  for (int j = 0; j < spec.dim(); ++j) std::cout << (j ? ", " : "") << spec.weight(j);
  std::cout << ")\n";
  std::cout << "brackets (1-based, antisymmetric pairs shown once):\n";
  const auto& br = spec.brackets();
  for (size_t b = 0; b < br.size(); b += 2) {
    std::cout << "  [X" << br[b].i + 1 << ", X" << br[b].j + 1 << "] = "
              << io::format_double(br[b].c) << " X" << br[b].k + 1 << "\n";
  }
  if (!o.mul_a.empty()) {
    if (o.mul_b.empty()) throw std::invalid_argument("--mul needs --with");
    const Point x = parse_point(spec.dim(), o.mul_a);
    const Point y = parse_point(spec.dim(), o.mul_b);
    std::cout << "product = " << format_point(spec.product(x, y)) << "\n";
  }
  if (!o.point.empty()) {
    const Point x = parse_point(spec.dim(), o.point);
    if (o.dilate_by > 0.0)
      std::cout << "dilate(" << io::format_double(o.dilate_by)
                << ") = " << format_point(carnot::dilate(spec, o.dilate_by, x)) << "\n";
    std::cout << "norm[" << o.norm << "] = "
              << io::format_double(
                     carnot::homogeneous_norm(spec, carnot::norm_from_string(o.norm), x))
              << "\n";
  }
  if (!o.out.empty()) {
    write_manifest("group", o);
    OrderedJson j;
    j["name"] = spec.name();
    j["step"] = spec.step();
    j["dim"] = spec.dim();
    j["homogeneous_dim"] = spec.homogeneous_dim();
    j["layer_dims"] = spec.layer_dims();
    io::write_json(o.out + "/group.json", j);
  }
  return 0;
}

spectral::GridEigenSystem run_eigensolver(const GroupSpec& spec, const sim::Domain& domain,
                                          const Options& o, spectral::GridOperator* op_out) {
  spectral::GridOperator op = spectral::assemble(spec, domain, parse_real(o.mesh));
  spectral::EigenOptions eopts;
  eopts.workers = o.workers;
  auto sys = spectral::leading_eigenpairs(op, o.eigenpairs, o.tol, eopts);
  if (op_out) *op_out = std::move(op);
  return sys;
}

int cmd_spectral(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  const sim::Domain domain = resolve_domain(spec, o);
  write_manifest("spectral", o);

  spectral::GridOperator op;
  const auto sys = run_eigensolver(spec, domain, o, &op);
  const auto diag = spectral::eigenfunction_diagnostics(op, sys);

  io::CsvTable eigs({"n", "lambda", "residual", "c_n"});
  for (int j = 0; j < sys.count(); ++j)
    eigs.add_row({static_cast<double>(j + 1), sys.lambdas[j], sys.residuals[j], sys.mass[j]});
  eigs.write(o.out + "/eigenvalues.csv");

  if (!o.no_modes) {
    std::vector<std::string> headers;
    for (int j = 0; j < spec.dim(); ++j) headers.push_back("x" + std::to_string(j + 1));
    for (int j = 0; j < sys.count(); ++j) headers.push_back("phi_" + std::to_string(j + 1));
    io::CsvTable modes(headers);
    std::vector<double> row(headers.size());
    for (int v = 0; v < sys.interior_count; ++v) {
      for (int j = 0; j < spec.dim(); ++j) row[j] = op.geometry.nodes(j, v);
      for (int j = 0; j < sys.count(); ++j) row[spec.dim() + j] = sys.modes(v, j);
      modes.add_row(row);
    }
    modes.write(o.out + "/modes.csv");
  }

  OrderedJson summary;
  summary["group"] = spec.name();
  summary["domain"] = domain.signature();
  summary["mesh"] = sys.mesh_h;
  summary["interior_nodes"] = sys.interior_count;
  summary["lambda"] = io::vector_to_json(sys.lambdas);
  summary["residual"] = io::vector_to_json(sys.residuals);
  summary["c_n"] = io::vector_to_json(sys.mass);
  summary["sweeps"] = sys.sweeps;
  summary["spectral_gap"] = sys.lambdas[0];
  summary["gap_above_ground"] = sys.count() > 1 ? sys.lambdas[1] - sys.lambdas[0] : 0.0;
  summary["ground_state_one_signed"] = diag.ground_state_one_signed;
  summary["sup_norm_ratio_spread"] = diag.ratio_spread;
  summary["boundary_layer_max"] = diag.boundary_layer_max;

  const auto gb = spectral::gap_bounds();
  OrderedJson bounds;
  bounds["lower"] = gb.lower;
  bounds["upper"] = gb.upper;
  bounds["x_star"] = gb.x_star;
  bounds["lambda1_interval"] = gb.lambda1_interval;
  bounds["lambda1_disk"] = gb.lambda1_disk;
  summary["heisenberg_unit_ball_bracket"] = bounds;
  if (spec.name() == "heisenberg" && o.radius == 1.0)
    summary["lambda1_in_bracket"] = sys.lambdas[0] >= gb.lower && sys.lambdas[0] <= gb.upper;

  if (o.positivity_sources > 0) {
    sim::Xoshiro256pp rng(o.seed ^ 0x705171ull);
    std::vector<int> sources;
    for (int k = 0; k < o.positivity_sources; ++k)
      sources.push_back(static_cast<int>(rng.uniform() * op.size()));
    const auto rep =
        spectral::heat_kernel_positivity_check(op, o.positivity_t, sources, o.workers);
    OrderedJson pos;
    pos["t"] = rep.t;
    pos["sources"] = rep.sources;
    pos["min_value"] = io::vector_to_json(rep.min_value);
    pos["all_positive"] = rep.all_positive;
    summary["kernel_positivity"] = pos;
  }

  io::write_json(o.out + "/summary.json", summary);
  std::cout << "lambda1 = " << io::format_double(sys.lambdas[0]) << " (" << sys.interior_count
            << " nodes, " << sys.sweeps << " sweeps)\n";
  return 0;
}

int cmd_simulate(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  const sim::Domain domain = resolve_domain(spec, o);
  const sim::SimConfig cfg = resolve_sim(o);
  write_manifest("simulate", o);

  const auto batch = sim::sample_exit_batch(domain, cfg, resolve_start(spec, o));
  io::CsvTable exits({"index", "exit_time"}, {false, true});
  for (int m = 0; m < batch.size(); ++m)
    exits.add_row({static_cast<double>(m), batch.exit_times[m]});
  exits.write(o.out + "/exits.csv");

  const Eigen::VectorXd grid =
      o.tgrid.empty() ? Eigen::VectorXd::LinSpaced(51, 0.0, cfg.horizon) : parse_grid(o.tgrid);
  const auto curve = sim::survival_curve(batch, grid);
  write_survival_csv(o.out + "/survival.csv", curve);

  OrderedJson summary;
  summary["domain"] = domain.signature();
  summary["trajectories"] = batch.size();
  summary["exited"] = batch.exited();
  OrderedJson curve_json;
  curve_json["t"] = io::vector_to_json(curve.times);
  curve_json["survival"] = io::vector_to_json(curve.survival);
  curve_json["ci_lo"] = io::vector_to_json(curve.ci_lo);
  curve_json["ci_hi"] = io::vector_to_json(curve.ci_hi);
  summary["survival_curve"] = curve_json;
  // decay fit over the tail of the window, where the leading mode dominates
  try {
    const auto fit = sim::fit_survival_decay(curve, 0.4 * cfg.horizon, cfg.horizon);
    summary["decay_rate"] = fit.rate;
    summary["decay_rate_stderr"] = fit.rate_stderr;
    summary["decay_points"] = fit.points_used;
  } catch (const std::invalid_argument&) {
    summary["decay_rate"] = nullptr;
  }
  io::write_json(o.out + "/summary.json", summary);
  std::cout << batch.exited() << "/" << batch.size() << " trajectories exited\n";
  return 0;
}

int cmd_smalldev(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  const sim::Domain domain = resolve_domain(spec, o);
  const sim::SimConfig cfg = resolve_sim(o);
  write_manifest("smalldev", o);

  const auto eps_list = parse_list(o.eps);
  const Eigen::VectorXd eps =
      Eigen::Map<const Eigen::VectorXd>(eps_list.data(), static_cast<int>(eps_list.size()));
  const auto path_kind =
      o.path == "dilate" ? asym::SmallDevPath::DilateDomain : asym::SmallDevPath::StretchTime;
  const double ref =
      o.ref_lambda1 > 0.0 ? o.ref_lambda1 : std::numeric_limits<double>::quiet_NaN();
  const auto rep = asym::small_deviation_experiment(domain, cfg, eps, o.t, path_kind, ref);

  io::CsvTable table({"epsilon", "t", "survival", "ci_lo", "ci_hi", "rate"});
  for (int i = 0; i < eps.size(); ++i)
    table.add_row(
        {rep.epsilons[i], rep.t, rep.survival[i], rep.ci_lo[i], rep.ci_hi[i], rep.rate[i]});
  table.write(o.out + "/smalldev.csv");

  OrderedJson summary;
  summary["domain"] = domain.signature();
  summary["t"] = rep.t;
  summary["path"] = o.path;
  summary["epsilons"] = io::vector_to_json(rep.epsilons);
  summary["rate"] = io::vector_to_json(rep.rate);
  summary["extrapolated_rate"] = rep.extrapolated_rate;
  summary["fitted_lambda1"] = rep.fitted_lambda1;
  if (std::isfinite(rep.reference_lambda1)) {
    summary["reference_lambda1"] = rep.reference_lambda1;
    summary["lambda1_relative_gap"] = rep.fitted_lambda1 / rep.reference_lambda1 - 1.0;
  }
  const auto gb = spectral::gap_bounds();
  OrderedJson bounds;
  bounds["lower"] = gb.lower;
  bounds["upper"] = gb.upper;
  bounds["x_star"] = gb.x_star;
  summary["heisenberg_unit_ball_bracket"] = bounds;
  io::write_json(o.out + "/summary.json", summary);
  std::cout << "fitted lambda1 = " << io::format_double(rep.fitted_lambda1) << "\n";
  return 0;
}

int cmd_heatcontent(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  const sim::Domain domain = resolve_domain(spec, o);
  const sim::SimConfig cfg = resolve_sim(o);
  write_manifest("heatcontent", o);

  const auto sys = run_eigensolver(spec, domain, o, nullptr);
  const Eigen::VectorXd grid = o.tgrid.empty()
                                   ? Eigen::VectorXd::LinSpaced(29, 0.05, cfg.horizon)
                                   : parse_grid(o.tgrid);
  const auto curve = asym::heat_content(domain, cfg, grid, sys);

  io::CsvTable table({"t", "Q", "ci_lo", "ci_hi", "rescaled", "reference"});
  for (int i = 0; i < grid.size(); ++i)
    table.add_row({curve.times[i], curve.content[i], curve.ci_lo[i], curve.ci_hi[i],
                   curve.rescaled[i], curve.reference[i]});
  table.write(o.out + "/heatcontent.csv");

  // plateau of the rescaled curve over [2/lambda1, 4/lambda1]
  double plateau_max_dev = 0.0;
  int plateau_points = 0;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid[i] < 2.0 / curve.lambda1 || grid[i] > 4.0 / curve.lambda1) continue;
    plateau_max_dev =
        std::max(plateau_max_dev, std::abs(curve.rescaled[i] / curve.c1_squared - 1.0));
    ++plateau_points;
  }

  OrderedJson summary;
  summary["domain"] = domain.signature();
  summary["volume"] = curve.volume;
  summary["q0_estimate"] = curve.q0_estimate;
  summary["q0_relative_gap"] = curve.q0_estimate / curve.volume - 1.0;
  summary["lambda1"] = curve.lambda1;
  summary["c1_squared"] = curve.c1_squared;
  summary["samples"] = curve.samples;
  summary["plateau_points"] = plateau_points;
  summary["plateau_max_relative_deviation"] = plateau_max_dev;
  io::write_json(o.out + "/summary.json", summary);
  std::cout << "Q(0+) = " << io::format_double(curve.q0_estimate)
            << " vs |Omega| = " << io::format_double(curve.volume) << "\n";
  return 0;
}

int cmd_scalingcheck(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  const sim::Domain domain = resolve_domain(spec, o);
  const sim::SimConfig cfg = resolve_sim(o);
  write_manifest("scalingcheck", o);

  const auto eps_list = parse_list(o.eps);
  io::CsvTable table({"epsilon", "t", "survival_stretched", "stretched_lo", "stretched_hi",
                      "survival_dilated", "dilated_lo", "dilated_hi", "z"});
  double worst_z = 0.0;
  const Point start = resolve_start(spec, o);
  for (double e : eps_list) {
    const auto rep = sim::scaling_check(domain, cfg, e, o.t, start);
    table.add_row({rep.eps, rep.t, rep.survival_stretched, rep.stretched_lo, rep.stretched_hi,
                   rep.survival_dilated, rep.dilated_lo, rep.dilated_hi, rep.z_statistic});
    worst_z = std::max(worst_z, std::abs(rep.z_statistic));
  }
  table.write(o.out + "/scalingcheck.csv");

  OrderedJson summary;
  summary["domain"] = domain.signature();
  summary["t"] = o.t;
  summary["epsilons"] = eps_list;
  summary["max_abs_z"] = worst_z;
  io::write_json(o.out + "/summary.json", summary);
  std::cout << "max |z| = " << io::format_double(worst_z) << "\n";
  return 0;
}

int cmd_regularity(const Options& o) {
  const GroupSpec spec = resolve_group(o);
  const sim::Domain domain = resolve_domain(spec, o);
  const sim::SimConfig cfg = resolve_sim(o);
  write_manifest("regularity", o);

  Eigen::MatrixXd pts;
  if (!o.points.empty()) {
    // "x,y,z;x,y,z;..."
    std::vector<Point> parsed;
    std::string cur;
    for (char c : o.points + ";") {
      if (c == ';') {
        if (!cur.empty()) parsed.push_back(parse_point(spec.dim(), cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    pts.resize(spec.dim(), static_cast<int>(parsed.size()));
    for (size_t i = 0; i < parsed.size(); ++i) pts.col(static_cast<int>(i)) = parsed[i];
  } else {
    // defaults: a lateral point and the top-axis pole of the gauge ball
    pts = Eigen::MatrixXd::Zero(spec.dim(), 2);
    pts(0, 0) = o.radius;
    const auto kind = carnot::norm_from_string(o.norm);
    const int top = spec.dim() - 1;
    if (spec.step() == 1) {
      pts(top, 1) = o.radius;
    } else if (kind == NormKind::Gauge16) {
      pts(top, 1) = o.radius * o.radius / 4.0;
    } else if (kind == NormKind::GaugeRho) {
      pts(top, 1) = o.radius * o.radius;
    } else {
      pts(top, 1) = std::pow(o.radius, spec.weight(top));
    }
  }

  Eigen::VectorXd grid;
  if (o.tgrid.empty()) {
    grid.resize(3);
    grid << 0.005, 0.01, 0.02;
  } else {
    grid = parse_grid(o.tgrid);
  }
  const auto rep = asym::boundary_regularity_probe(domain, cfg, pts, grid);

  io::CsvTable table({"point", "t", "survival", "ci_hi"});
  for (int p = 0; p < pts.cols(); ++p)
    for (int i = 0; i < grid.size(); ++i)
      table.add_row({static_cast<double>(p), grid[i], rep.survival(p, i), rep.ci_hi(p, i)});
  table.write(o.out + "/regularity.csv");

  OrderedJson summary;
  summary["domain"] = domain.signature();
  summary["times"] = io::vector_to_json(rep.times);
  OrderedJson plist = OrderedJson::array();
  for (int p = 0; p < pts.cols(); ++p) {
    OrderedJson pj;
    pj["coords"] = io::vector_to_json(pts.col(p));
    pj["suspect"] = static_cast<bool>(rep.suspect[p]);
    pj["survival"] = io::vector_to_json(rep.survival.row(p));
    plist.push_back(pj);
  }
  summary["points"] = plist;
  io::write_json(o.out + "/summary.json", summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sublab: hypoelliptic diffusions and Dirichlet spectra on Carnot groups"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Options o;

  // manifests act as defaults; explicit flags override
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") o.config_path = argv[i + 1];
  }

  auto add_common = [&o](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", o.config_path, "load defaults from a manifest");
    cmd->add_option("--group", o.group, "catalog group name");
    cmd->add_option("--spec-json", o.spec_json, "custom group spec (json file)");
    cmd->add_option("--norm", o.norm, "gauge16 | gaugerho | layermax");
    cmd->add_option("--workers", o.workers, "worker threads (default: SUBLAB_WORKERS)");
    auto* out = cmd->add_option("--out", o.out, "output directory");
    if (needs_out) out->required();
  };
  auto add_sim_opts = [&o](CLI::App* cmd) {
    cmd->add_option("--radius", o.radius, "gauge-ball radius");
    cmd->add_option("--steps", o.steps, "time step size (real or p/q)");
    cmd->add_option("--horizon", o.horizon, "simulation horizon");
    cmd->add_option("--trajectories", o.trajectories, "Monte Carlo sample count");
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--scheme", o.scheme, "geometric-euler | coordinate-heun");
    cmd->add_option("--start", o.start, "start point (comma list; default identity)");
    cmd->add_option("--tgrid", o.tgrid, "time grid: list or a..b:n");
  };

  auto* g = app.add_subcommand("group", "print group structure; evaluate products and norms");
  add_common(g, false);
  g->add_option("--mul", o.mul_a, "left factor (used with --with)");
  g->add_option("--with", o.mul_b, "right factor for --mul");
  g->add_option("--dilate", o.dilate_by, "dilation scale applied to --point");
  g->add_option("--point", o.point, "point for dilation / norm evaluation");

  auto* sp = app.add_subcommand("spectral", "Dirichlet eigenpairs on a gauge ball");
  add_common(sp, true);
  sp->add_option("--radius", o.radius, "gauge-ball radius");
  sp->add_option("--mesh", o.mesh, "grid spacing (real or p/q)");
  sp->add_option("--eigenpairs,--K", o.eigenpairs, "number of eigenpairs");
  sp->add_option("--tol", o.tol, "residual tolerance");
  sp->add_option("--seed", o.seed, "seed for the positivity sources");
  sp->add_flag("--no-modes", o.no_modes, "skip the modes.csv export");
  sp->add_option("--positivity", o.positivity_sources, "check kernel positivity from n sources");
  sp->add_option("--positivity-t", o.positivity_t, "time for the positivity check");

  auto* si = app.add_subcommand("simulate", "killed-diffusion exit batch and survival curve");
  add_common(si, true);
  add_sim_opts(si);

  auto* sd = app.add_subcommand("smalldev", "small-deviation rate experiment");
  add_common(sd, true);
  add_sim_opts(sd);
  sd->add_option("--eps", o.eps, "decreasing epsilon grid (comma list)");
  sd->add_option("--t", o.t, "fixed horizon t");
  sd->add_option("--path", o.path, "stretch | dilate");
  sd->add_option("--ref-lambda1", o.ref_lambda1, "grid lambda1 for comparison");

  auto* hc = app.add_subcommand("heatcontent", "Monte Carlo heat content with spectral reference");
  add_common(hc, true);
  add_sim_opts(hc);
  hc->add_option("--mesh", o.mesh, "grid spacing for the eigen reference");
  hc->add_option("--eigenpairs,--K", o.eigenpairs, "number of reference eigenpairs");
  hc->add_option("--tol", o.tol, "eigensolver residual tolerance");

  auto* sc = app.add_subcommand("scalingcheck", "two-sample test of the space-time scaling");
  add_common(sc, true);
  add_sim_opts(sc);
  sc->add_option("--eps", o.eps, "epsilon values (comma list)");
  sc->add_option("--t", o.t, "horizon t");

  auto* rg = app.add_subcommand("regularity", "boundary-point survival probe");
  add_common(rg, true);
  add_sim_opts(rg);
  rg->add_option("--points", o.points, "boundary points: 'x,y,z;x,y,z'");

  try {
    if (!o.config_path.empty()) {
      // peek at the subcommand name to validate the manifest against it
      std::string sub;
      for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (!a.empty() && a[0] != '-') {
          sub = a;
          break;
        }
      }
      apply_manifest(o.config_path, sub, o);
    }
    app.parse(argc, argv);

    if (g->parsed()) return cmd_group(o);
    if (sp->parsed()) return cmd_spectral(o);
    if (si->parsed()) return cmd_simulate(o);
    if (sd->parsed()) return cmd_smalldev(o);
    if (hc->parsed()) return cmd_heatcontent(o);
    if (sc->parsed()) return cmd_scalingcheck(o);
    if (rg->parsed()) return cmd_regularity(o);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const io::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 4;
  } catch (const spectral::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
