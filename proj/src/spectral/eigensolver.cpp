#include "sublab/spectral/eigensolver.hpp"

#include "sublab/sim/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace sublab::spectral {

namespace {

// Scaled Chebyshev filter damping [a, b]; modes below a are amplified. The
// scaling keeps iterates normalized around the lower spectrum edge a0.
void chebyshev_filter(const GridOperator& op, RowMat& x, int degree, double a, double b, double a0,
                      int workers, RowMat& y, RowMat& work) {
  const double e = 0.5 * (b - a);
  const double c = 0.5 * (b + a);
  double sigma = e / (a0 - c);
  const double sigma1 = sigma;
  op.apply_block(x, work, workers);
  y = (work - c * x) * (sigma1 / e);
  for (int j = 2; j <= degree; ++j) {
    const double sigma2 = 1.0 / (2.0 / sigma1 - sigma);
    op.apply_block(y, work, workers);
    work = (work - c * y) * (2.0 * sigma2 / e) - (sigma * sigma2) * x;
    x.swap(y);
    y.swap(work);
    sigma = sigma2;
  }
  x.swap(y);  // result back in x
}

void finalize_system(const GridOperator& op, const Eigen::VectorXd& lambdas,
                     const Eigen::MatrixXd& vectors, const Eigen::VectorXd& residuals, int sweeps,
                     GridEigenSystem& sys) {
  const int k = static_cast<int>(lambdas.size());
  const double cell = op.geometry.cell_volume();
  sys.lambdas = lambdas;
  sys.residuals = residuals;
  sys.mesh_h = op.geometry.h;
  sys.cell_volume = cell;
  sys.interior_count = op.size();
  sys.domain_signature = op.domain ? op.domain->signature() : "";
  sys.sweeps = sweeps;
  sys.modes = vectors / std::sqrt(cell);
  sys.mass.resize(k);
  for (int j = 0; j < k; ++j) {
    // deterministic orientation: largest-magnitude entry positive
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < sys.modes.rows(); ++i) {
      const double a = std::abs(sys.modes(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (sys.modes(arg, j) < 0.0) sys.modes.col(j) = -sys.modes.col(j);
    sys.mass[j] = cell * sys.modes.col(j).sum();
  }
}

GridEigenSystem dense_solve(const GridOperator& op, int k) {
  Eigen::MatrixXd dense(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  if (es.info() != Eigen::Success)
    throw NonConvergenceError("dense eigensolver failed", std::nan(""));
  GridEigenSystem sys;
  Eigen::VectorXd lambdas = es.eigenvalues().head(k);
  Eigen::MatrixXd vectors = es.eigenvectors().leftCols(k);
  Eigen::VectorXd residuals(k);
  Eigen::VectorXd tmp(op.size());
  for (int j = 0; j < k; ++j) {
    op.apply(vectors.col(j), tmp);
    residuals[j] = (tmp - lambdas[j] * vectors.col(j)).norm();
  }
  finalize_system(op, lambdas, vectors, residuals, 0, sys);
  return sys;
}

}  // namespace

GridEigenSystem leading_eigenpairs(const GridOperator& op, int k, double tol,
                                   EigenOptions options) {
  if (k < 1) throw std::invalid_argument("leading_eigenpairs: k must be >= 1");
  const int n = op.size();
  if (k > n) throw std::invalid_argument("leading_eigenpairs: k exceeds grid size");
  options.tol_residual = tol;

  if (n <= options.dense_cutoff) return dense_solve(op, k);

  const int nb = std::min(n, k + std::max(options.block_extra, 2));
  const double upper = op.gershgorin_upper();

  // deterministic random start
  RowMat x(n, nb);
  {
    sim::Xoshiro256pp rng(options.seed);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < nb; ++j) x(i, j) = 2.0 * rng.uniform() - 1.0;
  }

  RowMat y, work, aq;
  Eigen::MatrixXd q, h, u;
  Eigen::VectorXd theta_prev = Eigen::VectorXd::Constant(nb, std::nan(""));
  Eigen::VectorXd theta(nb), residuals(nb);
  double filter_lo = 0.5 * upper;

  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    if (sweep > 1) {
      const double a = std::min(std::max(filter_lo, 1e-8 * upper), 0.95 * upper);
      chebyshev_filter(op, x, options.filter_degree, a, upper, 0.0, options.workers, y, work);
    }

    // orthonormalize and Rayleigh-Ritz
    q = x;  // row-major -> column-major copy
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(n, nb);
    x = q;
    op.apply_block(x, aq, options.workers);
    Eigen::MatrixXd aq_col = aq;
    h.noalias() = q.transpose() * aq_col;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    u = es.eigenvectors();
    theta = es.eigenvalues();

    Eigen::MatrixXd ritz = q * u;
    Eigen::MatrixXd aritz = aq_col * u;
    for (int j = 0; j < nb; ++j) residuals[j] = (aritz.col(j) - theta[j] * ritz.col(j)).norm();
    x = ritz;

    bool done = true;
    for (int j = 0; j < k && done; ++j) {
      const bool res_ok = residuals[j] < options.tol_residual;
      const bool lam_ok = std::isfinite(theta_prev[j]) &&
                          std::abs(theta[j] - theta_prev[j]) <=
                              options.tol_lambda_rel * std::max(1.0, std::abs(theta[j]));
      done = res_ok && lam_ok;
    }
    theta_prev = theta;
    filter_lo = theta[nb - 1];

    if (done) {
      GridEigenSystem sys;
      finalize_system(op, theta.head(k), ritz.leftCols(k), residuals.head(k), sweep, sys);
      return sys;
    }
  }
  throw NonConvergenceError(
      "leading_eigenpairs: no convergence after " + std::to_string(options.max_sweeps) +
          " sweeps (worst residual " + std::to_string(residuals.head(k).maxCoeff()) + ")",
      residuals.head(k).maxCoeff());
}

}  // namespace sublab::spectral
