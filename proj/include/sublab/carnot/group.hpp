#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace sublab::carnot {

/// Exponential coordinates of the first kind; a group point and a Lie algebra
/// element share the same coordinate representation.
using Point = Eigen::VectorXd;
using Vec = Eigen::VectorXd;

/// One structure-constant entry: [X_i, X_j] contains c * X_k (indices 0-based).
struct Bracket {
  int i;
  int j;
  int k;
  double c;
};

/// A term of the truncated Dynkin series: the right-nested commutator of a
/// word over the letters {x, y} (bit 0 = x, bit 1 = y), times a coefficient
/// accumulated from exact rationals.
struct SeriesTerm {
  std::uint32_t word;
  int length;
  double coeff;
};

/// Scratch buffers so the group product can run allocation-free in hot loops.
struct ProductWorkspace {
  Vec a;
  Vec b;
};

/// Stratified nilpotent Lie algebra with its group structure in exponential
/// coordinates. Immutable after construction; all operations are pure.
class GroupSpec {
 public:
  GroupSpec(std::string name, std::vector<int> layer_dims, std::vector<Bracket> brackets);

  const std::string& name() const { return name_; }
  int step() const { return static_cast<int>(layer_dims_.size()); }
  int dim() const { return dim_; }
  int horizontal_dim() const { return layer_dims_[0]; }
  int homogeneous_dim() const { return hom_dim_; }
  const std::vector<int>& layer_dims() const { return layer_dims_; }

  /// Homogeneity sigma_j of coordinate j (1-based weight, 0-based coordinate).
  int weight(int coord) const { return weights_[coord]; }
  const std::vector<int>& weights() const { return weights_; }
  /// First coordinate index of a layer (layer 0-based).
  int layer_offset(int layer) const { return offsets_[layer]; }

  /// Both orientations are stored, so a single pass applies the full bracket.
  const std::vector<Bracket>& brackets() const { return brackets_; }

  /// out = [u, v] through the structure-constant table.
  void bracket_into(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v, Vec& out) const;
  Vec bracket(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& v) const;

  /// Group product z = x * y by the Dynkin series truncated at commutator
  /// degree step(); exact for nilpotent algebras.
  void product_into(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y, Vec& out,
                    ProductWorkspace& ws) const;
  Point product(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const;

  Point inverse(const Eigen::Ref<const Vec>& x) const { return -x; }

  const std::vector<SeriesTerm>& series_terms() const { return terms_; }

 private:
  void validate() const;

  std::string name_;
  std::vector<int> layer_dims_;
  std::vector<int> weights_;
  std::vector<int> offsets_;
  std::vector<Bracket> brackets_;
  std::vector<SeriesTerm> terms_;
  int dim_ = 0;
  int hom_dim_ = 0;
};

/// Coordinate j scaled by a^{sigma_j}; throws for a <= 0.
Point dilate(const GroupSpec& spec, double a, const Eigen::Ref<const Vec>& x);
void dilate_into(const GroupSpec& spec, double a, const Eigen::Ref<const Vec>& x, Vec& out);

/// Columns are the horizontal left-invariant fields X_1..X_{d1} at x, i.e. the
/// derivative of t -> x * exp(t e_i) at t = 0.
Eigen::MatrixXd left_invariant_frame(const GroupSpec& spec, const Eigen::Ref<const Vec>& x);
void left_invariant_frame_into(const GroupSpec& spec, const Eigen::Ref<const Vec>& x,
                               Eigen::MatrixXd& frame, ProductWorkspace& ws);

}  // namespace sublab::carnot
