#pragma once

#include "sublab/carnot/group.hpp"
#include "sublab/carnot/norms.hpp"

#include <string>

namespace sublab::sim {

using carnot::GroupSpec;
using carnot::NormKind;
using carnot::Point;
using carnot::Vec;

/// Bounded open set the diffusion is killed on: a gauge ball (left translate
/// of {rho < radius}) or a coordinate box.
class Domain {
 public:
  enum class Kind { GaugeBall, Box };

  static Domain gauge_ball(const GroupSpec& spec, NormKind norm, double radius);
  static Domain gauge_ball(const GroupSpec& spec, NormKind norm, double radius, Point center);
  static Domain box(const GroupSpec& spec, Vec lo, Vec hi);

  Kind kind() const { return kind_; }
  const GroupSpec& spec() const { return spec_; }
  NormKind norm() const { return norm_; }
  double radius() const { return radius_; }
  const Point& center() const { return center_; }

  bool contains(const Eigen::Ref<const Vec>& x) const;

  /// Tight coordinate bounding box.
  Vec bounding_lo() const;
  Vec bounding_hi() const;

  /// Exact Haar volume (Lebesgue in exponential coordinates).
  double volume() const;

  /// The dilated set delta_eps(domain).
  Domain dilated(double eps) const;

  /// Stable description used to match eigen-data against simulation domains.
  std::string signature() const;

 private:
  Domain(const GroupSpec& spec) : spec_(spec) {}

  Kind kind_ = Kind::GaugeBall;
  GroupSpec spec_;
  NormKind norm_ = NormKind::GaugeRho;
  double radius_ = 0.0;
  Point center_;
  bool centered_ = true;  // center is the identity
  Vec lo_, hi_;
};

}  // namespace sublab::sim
