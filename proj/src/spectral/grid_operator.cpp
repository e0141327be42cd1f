#include "sublab/spectral/grid_operator.hpp"

#include "sublab/sim/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab::spectral {

std::int64_t GridGeometry::flat(const Eigen::Ref<const Eigen::VectorXi>& idx) const {
  std::int64_t f = 0;
  for (int j = static_cast<int>(dims.size()) - 1; j >= 0; --j) {
    if (idx[j] < 0 || idx[j] >= dims[j]) return -1;
    f = f * dims[j] + idx[j];
  }
  return f;
}

std::int32_t GridGeometry::neighbor(int interior, int axis, int dir) const {
  Eigen::VectorXi idx = icoords.col(interior);
  idx[axis] += dir;
  const std::int64_t f = flat(idx);
  return f < 0 ? -1 : index[f];
}

double GridGeometry::cell_volume() const {
  return std::pow(h, static_cast<double>(dims.size()));
}

namespace {

GridGeometry build_grid(const GroupSpec& spec, const Vec& lo, const Vec& hi, const Vec& center,
                        double h, const std::function<bool(const Vec&)>& keep) {
  if (!(h > 0.0)) throw std::invalid_argument("grid: mesh width must be positive");
  const int n = spec.dim();
  GridGeometry g;
  g.h = h;
  g.dims.resize(n);
  g.origin.resize(n);
  std::int64_t flat_count = 1;
  for (int j = 0; j < n; ++j) {
    const auto m_lo = static_cast<std::int64_t>(std::floor((center[j] - lo[j]) / h + 1e-12));
    const auto m_hi = static_cast<std::int64_t>(std::floor((hi[j] - center[j]) / h + 1e-12));
    g.origin[j] = center[j] - static_cast<double>(m_lo) * h;
    g.dims[j] = static_cast<int>(m_lo + m_hi + 1);
    flat_count *= g.dims[j];
  }
  if (flat_count > (1ll << 31))
    throw std::invalid_argument("grid: lattice too large for this mesh width");

  g.index.assign(flat_count, -1);
  std::vector<std::int64_t> kept;
  Eigen::VectorXi idx = Eigen::VectorXi::Zero(n);
  Vec x(n);
  for (std::int64_t f = 0; f < flat_count; ++f) {
    for (int j = 0; j < n; ++j) x[j] = g.origin[j] + h * idx[j];
    if (keep(x)) {
      g.index[f] = static_cast<std::int32_t>(kept.size());
      kept.push_back(f);
    }
    for (int j = 0; j < n; ++j) {
      if (++idx[j] < g.dims[j]) break;
      idx[j] = 0;
    }
  }
  g.count = static_cast<int>(kept.size());
  g.nodes.resize(n, g.count);
  g.icoords.resize(n, g.count);
  for (int v = 0; v < g.count; ++v) {
    std::int64_t f = kept[v];
    for (int j = 0; j < n; ++j) {
      g.icoords(j, v) = static_cast<int>(f % g.dims[j]);
      f /= g.dims[j];
      g.nodes(j, v) = g.origin[j] + h * g.icoords(j, v);
    }
  }
  return g;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

GridGeometry make_grid(const GroupSpec& spec, const Domain& domain, double h) {
  return build_grid(spec, domain.bounding_lo(), domain.bounding_hi(), domain.center(), h,
                    [&domain](const Vec& x) { return domain.contains(x); });
}

GridGeometry make_grid_from_predicate(const GroupSpec& spec, const Vec& lo, const Vec& hi,
                                      const Vec& center, double h,
                                      const std::function<bool(const Vec&)>& keep) {
  return build_grid(spec, lo, hi, center, h, keep);
}

double GridOperator::gershgorin_upper() const {
  double bound = 0.0;
  for (int i = 0; i < matrix.rows(); ++i) {
    double s = 0.0;
    for (SparseRow::InnerIterator it(matrix, i); it; ++it) s += std::abs(it.value());
    bound = std::max(bound, s);
  }
  return bound;
}

void GridOperator::apply(const Eigen::Ref<const Eigen::VectorXd>& in,
                         Eigen::Ref<Eigen::VectorXd> out, int workers) const {
  const int n = size();
  const auto* outer = matrix.outerIndexPtr();
  const auto* inner = matrix.innerIndexPtr();
  const auto* vals = matrix.valuePtr();
  sim::parallel_chunks(n, workers, [&](std::int64_t b, std::int64_t e, int) {
    for (std::int64_t i = b; i < e; ++i) {
      double acc = 0.0;
      for (auto p = outer[i]; p < outer[i + 1]; ++p) acc += vals[p] * in[inner[p]];
      out[i] = acc;
    }
  });
}

void GridOperator::apply_block(const RowMat& x, RowMat& y, int workers) const {
  const int n = size();
  const auto* outer = matrix.outerIndexPtr();
  const auto* inner = matrix.innerIndexPtr();
  const auto* vals = matrix.valuePtr();
  y.resize(n, x.cols());
  sim::parallel_chunks(n, workers, [&](std::int64_t b, std::int64_t e, int) {
    for (std::int64_t i = b; i < e; ++i) {
      y.row(i).setZero();
      for (auto p = outer[i]; p < outer[i + 1]; ++p) y.row(i) += vals[p] * x.row(inner[p]);
    }
  });
}

std::vector<int> GridOperator::boundary_layer() const {
  std::vector<int> layer;
  const int n = size();
  const int dim = static_cast<int>(geometry.dims.size());
  for (int v = 0; v < n; ++v) {
    bool edge = false;
    for (int j = 0; j < dim && !edge; ++j)
      edge = geometry.neighbor(v, j, +1) < 0 || geometry.neighbor(v, j, -1) < 0;
    if (edge) layer.push_back(v);
  }
  return layer;
}

GridOperator assemble(const GroupSpec& spec, const Domain& domain, double mesh_h) {
  GridOperator op = assemble_on_grid(spec, make_grid(spec, domain, mesh_h));
  op.domain = domain;
  return op;
}

GridOperator assemble_on_grid(const GroupSpec& spec, GridGeometry geom) {
  const int n = geom.count;
  const int dim = spec.dim();
  if (n < 2 * dim + 1)
    throw std::invalid_argument("assemble: domain too small for this mesh (" +
                                std::to_string(n) + " interior nodes)");
  const int d1 = spec.horizontal_dim();
  const double h = geom.h;

  GridOperator op;
  Eigen::SparseMatrix<double> acc(n, n);

  // One-sided differences live on the extended lattice: a row for every
  // lattice point whose one-sided stencil overlaps the interior, so boundary
  // edges enter the quadratic form at full weight (the abelian case is then
  // the textbook 5-point operator).
  const std::int64_t flat_count = static_cast<std::int64_t>(geom.index.size());
  carnot::ProductWorkspace ws;
  Eigen::MatrixXd frame;
  Eigen::VectorXi idx(dim);
  Vec xw(dim);
  for (int i = 0; i < d1; ++i) {
    for (int dir : {+1, -1}) {
      Triplets trip;
      trip.reserve(static_cast<size_t>(n) * (dim + 2));
      for (std::int64_t f = 0; f < flat_count; ++f) {
        // lattice coordinates of this (possibly exterior) row node
        std::int64_t rem = f;
        for (int j = 0; j < dim; ++j) {
          idx[j] = static_cast<int>(rem % geom.dims[j]);
          rem /= geom.dims[j];
        }
        const std::int32_t self = geom.index[f];
        bool touches = self >= 0;
        for (int j = 0; j < dim && !touches; ++j) {
          idx[j] += dir;
          const std::int64_t nf = geom.flat(idx);
          idx[j] -= dir;
          touches = nf >= 0 && geom.index[nf] >= 0;
        }
        if (!touches) continue;
        for (int j = 0; j < dim; ++j) xw[j] = geom.origin[j] + h * idx[j];
        carnot::left_invariant_frame_into(spec, xw, frame, ws);
        double diag = 0.0;
        for (int j = 0; j < dim; ++j) {
          const double a = frame(j, i);
          if (a == 0.0) continue;
          const double w = dir * a / h;
          diag -= w;
          idx[j] += dir;
          const std::int64_t nf = geom.flat(idx);
          idx[j] -= dir;
          const std::int32_t nb = nf >= 0 ? geom.index[nf] : -1;
          if (nb >= 0) trip.emplace_back(static_cast<int>(f), nb, w);
        }
        if (self >= 0 && diag != 0.0) trip.emplace_back(static_cast<int>(f), self, diag);
      }
      Eigen::SparseMatrix<double> b(flat_count, n);
      b.setFromTriplets(trip.begin(), trip.end());
      acc += Eigen::SparseMatrix<double>(0.25 * (b.transpose() * b));
    }
  }
  // enforce exact symmetry
  Eigen::SparseMatrix<double> t = acc.transpose();
  acc = 0.5 * (acc + t);

  acc.makeCompressed();
  op.matrix = SparseRow(acc);
  op.matrix.makeCompressed();
  op.geometry = std::move(geom);
  op.spec = spec;
  return op;
}

}  // namespace sublab::spectral
