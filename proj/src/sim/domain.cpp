#include "sublab/sim/domain.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sublab::sim {

namespace {

double unit_ball_volume_euclidean(int n) {
  return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

// Unit gauge ball {(|u|^4 + c t^2)^{1/4} < 1}, u in R^{d1}, t in R:
//   vol = (2/sqrt(c)) * surf(S^{d1-1}) * int_0^1 r^{d1-1} sqrt(1-r^4) dr,
// and the radial integral is Beta(d1/4, 3/2)/4.
double unit_ball_volume_gauge(int d1, double c) {
  const double surf =
      2.0 * std::pow(std::numbers::pi, d1 / 2.0) / std::tgamma(d1 / 2.0);
  const double radial = 0.25 * std::tgamma(d1 / 4.0) * std::tgamma(1.5) /
                        std::tgamma(d1 / 4.0 + 1.5);
  return 2.0 / std::sqrt(c) * surf * radial;
}

}  // namespace

Domain Domain::gauge_ball(const GroupSpec& spec, NormKind norm, double radius) {
  return gauge_ball(spec, norm, radius, Point::Zero(spec.dim()));
}

Domain Domain::gauge_ball(const GroupSpec& spec, NormKind norm, double radius, Point center) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("gauge ball: radius must be positive and finite");
  if (!carnot::norm_supported(spec, norm))
    throw std::invalid_argument("gauge ball: norm not available on group " + spec.name());
  if (center.size() != spec.dim()) throw std::invalid_argument("gauge ball: bad center size");
  Domain d(spec);
  d.kind_ = Kind::GaugeBall;
  d.norm_ = norm;
  d.radius_ = radius;
  d.centered_ = center.isZero(0.0);
  d.center_ = std::move(center);
  return d;
}

Domain Domain::box(const GroupSpec& spec, Vec lo, Vec hi) {
  if (lo.size() != spec.dim() || hi.size() != spec.dim())
    throw std::invalid_argument("box: bound size mismatch");
  if (!((hi - lo).array() > 0.0).all()) throw std::invalid_argument("box: empty box");
  if (!lo.allFinite() || !hi.allFinite()) throw std::invalid_argument("box: unbounded");
  Domain d(spec);
  d.kind_ = Kind::Box;
  d.lo_ = std::move(lo);
  d.hi_ = std::move(hi);
  d.center_ = 0.5 * (d.lo_ + d.hi_);
  return d;
}

bool Domain::contains(const Eigen::Ref<const Vec>& x) const {
  if (kind_ == Kind::Box) {
    return (x.array() > lo_.array()).all() && (x.array() < hi_.array()).all();
  }
  if (centered_) return carnot::homogeneous_norm(spec_, norm_, x) < radius_;
  thread_local carnot::ProductWorkspace ws;
  thread_local Vec shifted;
  shifted.resize(spec_.dim());
  spec_.product_into(-center_, x, shifted, ws);
  return carnot::homogeneous_norm(spec_, norm_, shifted) < radius_;
}

Vec Domain::bounding_lo() const {
  if (kind_ == Kind::Box) return lo_;
  Vec ext(spec_.dim());
  for (int j = 0; j < spec_.dim(); ++j) {
    double e = std::pow(radius_, spec_.weight(j));
    // the top coordinate of the gauge16 ball only reaches radius^2 / 4
    if (norm_ == NormKind::Gauge16 && spec_.step() == 2 && j == spec_.dim() - 1) e *= 0.25;
    ext[j] = e;
  }
  return center_ - ext;
}

Vec Domain::bounding_hi() const {
  if (kind_ == Kind::Box) return hi_;
  return 2.0 * center_ - bounding_lo();
}

double Domain::volume() const {
  if (kind_ == Kind::Box) return (hi_ - lo_).prod();
  const double scale = std::pow(radius_, spec_.homogeneous_dim());
  switch (norm_) {
    case NormKind::Gauge16:
    case NormKind::GaugeRho: {
      if (spec_.step() == 1) return scale * unit_ball_volume_euclidean(spec_.dim());
      const double c = (norm_ == NormKind::Gauge16) ? 16.0 : 1.0;
      return scale * unit_ball_volume_gauge(spec_.horizontal_dim(), c);
    }
    case NormKind::LayerMax: {
      double v = 1.0;
      for (int l = 0; l < spec_.step(); ++l) v *= unit_ball_volume_euclidean(spec_.layer_dims()[l]);
      return scale * v;
    }
  }
  return 0.0;
}

Domain Domain::dilated(double eps) const {
  if (!(eps > 0.0)) throw std::invalid_argument("dilated: eps must be positive");
  if (kind_ == Kind::GaugeBall)
    return gauge_ball(spec_, norm_, eps * radius_, carnot::dilate(spec_, eps, center_));
  return box(spec_, carnot::dilate(spec_, eps, lo_), carnot::dilate(spec_, eps, hi_));
}

std::string Domain::signature() const {
  std::ostringstream os;
  os << spec_.name() << '|';
  if (kind_ == Kind::GaugeBall) {
    os << "ball|" << carnot::to_string(norm_) << '|' << radius_;
    if (!centered_) {
      os << '|';
      for (int j = 0; j < center_.size(); ++j) os << (j ? "," : "") << center_[j];
    }
  } else {
    os << "box|";
    for (int j = 0; j < lo_.size(); ++j) os << (j ? "," : "") << lo_[j] << ':' << hi_[j];
  }
  return os.str();
}

}  // namespace sublab::sim
