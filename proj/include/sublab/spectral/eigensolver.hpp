#pragma once

#include "sublab/spectral/grid_operator.hpp"

#include <stdexcept>
#include <string>

namespace sublab::spectral {

struct EigenOptions {
  int block_extra = 6;         // subspace padding beyond K
  int filter_degree = 150;     // Chebyshev degree per sweep
  int max_sweeps = 120;
  double tol_residual = 1e-6;  // ||A phi - lambda phi|| with unit phi
  double tol_lambda_rel = 1e-8;
  std::uint64_t seed = 0x5eedull;
  int workers = 0;
  int dense_cutoff = 2200;  // below this, solve densely
};

/// Leading Dirichlet eigenpairs on the grid. Modes are L2(grid)-normalized:
/// h^N sum phi^2 = 1.
struct GridEigenSystem {
  Eigen::VectorXd lambdas;    // ascending, first K
  Eigen::MatrixXd modes;      // count x K
  Eigen::VectorXd residuals;  // per mode, unit-l2 scale
  Eigen::VectorXd mass;       // c_n = h^N sum phi_n
  double mesh_h = 0.0;
  double cell_volume = 0.0;
  int interior_count = 0;
  std::string domain_signature;
  int sweeps = 0;

  int count() const { return static_cast<int>(lambdas.size()); }
};

struct NonConvergenceError : std::runtime_error {
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), last_residual(residual) {}
  double last_residual;
};

GridEigenSystem leading_eigenpairs(const GridOperator& op, int k, double tol,
                                   EigenOptions options = {});

}  // namespace sublab::spectral
