#include "sublab/spectral/analysis.hpp"

#include "sublab/carnot/norms.hpp"
#include "sublab/sim/parallel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sublab::spectral {

namespace {

double bracket_f(double x, double lam1, double lam2) {
  return lam2 / std::sqrt(1.0 - x) + lam1 * std::sqrt(1.0 - x) / (4.0 * x);
}

}  // namespace

GapBounds gap_bounds() {
  GapBounds gb;
  gb.lambda1_interval = std::numbers::pi * std::numbers::pi / 8.0;
  gb.lambda1_disk = 0.5 * kBesselJ0FirstZero * kBesselJ0FirstZero;
  const double l1 = gb.lambda1_interval;
  const double l2 = gb.lambda1_disk;
  gb.x_star = (std::sqrt(l1 * l1 + 32.0 * l1 * l2) - 3.0 * l1) / (2.0 * (4.0 * l2 - l1));
  gb.lower = l2;
  gb.upper = bracket_f(gb.x_star, l1, l2);

  // cross-check: x* is the minimizer of f on (0, 1)
  double x_lo = 1e-6, x_hi = 1.0 - 1e-6;
  double best_x = gb.x_star, best_f = gb.upper;
  for (int i = 0; i <= 2000; ++i) {
    const double x = x_lo + (x_hi - x_lo) * i / 2000.0;
    const double fx = bracket_f(x, l1, l2);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  // golden-section refinement around the grid minimum
  double a = std::max(x_lo, best_x - 1e-3), b = std::min(x_hi, best_x + 1e-3);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  for (int i = 0; i < 200; ++i) {
    if (bracket_f(c, l1, l2) < bracket_f(d, l1, l2)) b = d; else a = c;
    c = b - gr * (b - a);
    d = a + gr * (b - a);
  }
  const double x_min = 0.5 * (a + b);
  if (std::abs(bracket_f(x_min, l1, l2) - gb.upper) > 1e-10)
    throw std::logic_error("gap_bounds: closed-form minimizer disagrees with grid minimum");
  return gb;
}

PositivityReport heat_kernel_positivity_check(const GridOperator& op, double t,
                                              const std::vector<int>& sources, int workers) {
  if (t < 0.0) throw std::invalid_argument("positivity check: t must be >= 0");
  const int n = op.size();
  PositivityReport rep;
  rep.t = t;
  rep.sources = sources;
  rep.min_value.resize(static_cast<int>(sources.size()));

  if (t == 0.0) {
    // the kernel column is the delta vector; off-site minimum is zero
    rep.min_value.setZero();
    rep.steps = 0;
    rep.all_positive = false;
    return rep;
  }

  const double upper = op.gershgorin_upper();
  const int steps = std::max<int>(1, static_cast<int>(std::ceil(t * upper / 0.9)));
  const double tau = t / steps;
  rep.steps = steps;

  Eigen::VectorXd col(n), tmp(n);
  for (size_t s = 0; s < sources.size(); ++s) {
    const int src = sources[s];
    if (src < 0 || src >= n) throw std::invalid_argument("positivity check: bad source index");
    col.setZero();
    col[src] = 1.0;
    for (int k = 0; k < steps; ++k) {
      op.apply(col, tmp, workers);
      col -= tau * tmp;
    }
    rep.min_value[static_cast<int>(s)] = col.minCoeff();
  }
  rep.all_positive = (rep.min_value.array() > 0.0).all();
  return rep;
}

ModeDiagnostics eigenfunction_diagnostics(const GridOperator& op, const GridEigenSystem& sys) {
  ModeDiagnostics diag;
  const int k = sys.count();
  diag.sup_norms.resize(k);
  diag.growth_ratio.resize(k);
  const double q = op.spec ? op.spec->homogeneous_dim()
                           : static_cast<double>(op.geometry.dims.size());
  for (int j = 0; j < k; ++j) {
    diag.sup_norms[j] = sys.modes.col(j).cwiseAbs().maxCoeff();
    diag.growth_ratio[j] = diag.sup_norms[j] / std::pow(sys.lambdas[j], 0.5 * q);
  }
  diag.ratio_spread = diag.growth_ratio.maxCoeff() / diag.growth_ratio.minCoeff();

  diag.phi1_min = sys.modes.col(0).minCoeff();
  diag.phi1_max = sys.modes.col(0).maxCoeff();
  diag.ground_state_one_signed = diag.phi1_min * diag.phi1_max > 0.0;

  double bmax = 0.0;
  for (int v : op.boundary_layer()) bmax = std::max(bmax, std::abs(sys.modes(v, 0)));
  diag.boundary_layer_max = bmax;
  return diag;
}

double gauge_harmonicity_residual(const GroupSpec& spec, carnot::NormKind kind, double r_in,
                                  double r_out, double h, int workers) {
  if (!(0.0 < r_in && r_in < r_out)) throw std::invalid_argument("harmonicity: bad annulus");
  const Domain outer = Domain::gauge_ball(spec, kind, r_out);
  const auto rho = [&](const Vec& x) { return carnot::homogeneous_norm(spec, kind, x); };
  GridGeometry geom = make_grid_from_predicate(
      spec, outer.bounding_lo(), outer.bounding_hi(), Vec::Zero(spec.dim()), h,
      [&](const Vec& x) {
        const double r = rho(x);
        return r > r_in && r < r_out;
      });
  if (geom.count == 0) throw std::invalid_argument("harmonicity: no lattice nodes in the annulus");

  const int dim = spec.dim();
  const int d1 = spec.horizontal_dim();
  Eigen::VectorXd worst_per_worker = Eigen::VectorXd::Zero(sim::resolve_workers(workers));
  sim::parallel_chunks(geom.count, workers, [&](std::int64_t lo, std::int64_t hi, int w) {
    carnot::ProductWorkspace ws;
    Eigen::MatrixXd frame_center, frame_side;
    Vec side(dim), inner_pt(dim);
    const auto candidate = [&](const Vec& x) {
      return carnot::gauge_harmonic_candidate(spec, kind, x);
    };
    // centered first difference of the candidate along field i at point p
    const auto first_diff = [&](int i, const Vec& p, Eigen::MatrixXd& frame) {
      carnot::left_invariant_frame_into(spec, p, frame, ws);
      double acc = 0.0;
      for (int j = 0; j < dim; ++j) {
        const double a = frame(j, i);
        if (a == 0.0) continue;
        inner_pt = p;
        inner_pt[j] += h;
        const double fp = candidate(inner_pt);
        inner_pt[j] -= 2.0 * h;
        acc += a * (fp - candidate(inner_pt)) / (2.0 * h);
      }
      return acc;
    };
    double worst = 0.0;
    for (std::int64_t v = lo; v < hi; ++v) {
      const Vec x = geom.nodes.col(static_cast<int>(v));
      double val = 0.0;
      carnot::left_invariant_frame_into(spec, x, frame_center, ws);
      for (int i = 0; i < d1; ++i) {
        for (int j = 0; j < dim; ++j) {
          const double a = frame_center(j, i);
          if (a == 0.0) continue;
          side = x;
          side[j] += h;
          const double up = first_diff(i, side, frame_side);
          side[j] -= 2.0 * h;
          const double dn = first_diff(i, side, frame_side);
          val += a * (up - dn) / (2.0 * h);
        }
      }
      worst = std::max(worst, std::abs(0.5 * val));
    }
    worst_per_worker[w] = std::max(worst_per_worker[w], worst);
  });
  return worst_per_worker.maxCoeff();
}

}  // namespace sublab::spectral
