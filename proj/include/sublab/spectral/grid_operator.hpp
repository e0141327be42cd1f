#pragma once

#include "sublab/sim/domain.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace sublab::spectral {

using carnot::GroupSpec;
using carnot::Vec;
using sim::Domain;

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Uniform node lattice (spacing h on every axis, anchored at the domain
/// center) restricted to a point set; nodes outside are Dirichlet zero.
struct GridGeometry {
  double h = 0.0;
  Eigen::VectorXi dims;           // lattice extent per axis
  Eigen::VectorXd origin;         // coordinate of lattice index 0
  std::vector<std::int32_t> index;  // flat lattice index -> interior index or -1
  Eigen::MatrixXd nodes;          // N x count, coordinates of interior nodes
  Eigen::MatrixXi icoords;        // N x count, lattice indices of interior nodes
  int count = 0;

  std::int64_t flat(const Eigen::Ref<const Eigen::VectorXi>& idx) const;
  /// Interior index of the axis neighbor (dir = +1/-1), or -1.
  std::int32_t neighbor(int interior, int axis, int dir) const;
  double cell_volume() const;  // h^N
};

GridGeometry make_grid(const GroupSpec& spec, const Domain& domain, double h);
GridGeometry make_grid_from_predicate(const GroupSpec& spec, const Vec& lo, const Vec& hi,
                                      const Vec& center, double h,
                                      const std::function<bool(const Vec&)>& keep);

/// Applies -G_h, the discrete -1/2 sum X_i^2 with zero-outside condition:
/// A = 1/4 sum_i (B+^T B+ + B-^T B-), with B+- the one-sided first differences
/// of X_i taken over every lattice point whose stencil overlaps the interior.
/// Symmetric positive semidefinite by construction, second order after the
/// pairing, and reduces to the textbook 5-point stencil in the abelian case.
class GridOperator {
 public:
  GridGeometry geometry;
  SparseRow matrix;
  std::optional<GroupSpec> spec;
  std::optional<Domain> domain;

  int size() const { return geometry.count; }
  double gershgorin_upper() const;

  void apply(const Eigen::Ref<const Eigen::VectorXd>& in, Eigen::Ref<Eigen::VectorXd> out,
             int workers = 0) const;
  /// Y = A X for a block of column vectors (row-major storage so one pass
  /// over the matrix feeds every column).
  void apply_block(const RowMat& x, RowMat& y, int workers = 0) const;

  /// Interior nodes with a missing axis neighbor (the near-boundary layer).
  std::vector<int> boundary_layer() const;
};

GridOperator assemble(const GroupSpec& spec, const Domain& domain, double mesh_h);
GridOperator assemble_on_grid(const GroupSpec& spec, GridGeometry geom);

}  // namespace sublab::spectral
