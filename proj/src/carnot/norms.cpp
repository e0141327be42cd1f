#include "sublab/carnot/norms.hpp"

#include <cmath>
#include <stdexcept>

namespace sublab::carnot {

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::Gauge16: return "gauge16";
    case NormKind::GaugeRho: return "gaugerho";
    case NormKind::LayerMax: return "layermax";
  }
  return "?";
}

NormKind norm_from_string(const std::string& s) {
  if (s == "gauge16") return NormKind::Gauge16;
  if (s == "gaugerho") return NormKind::GaugeRho;
  if (s == "layermax") return NormKind::LayerMax;
  throw std::invalid_argument("unknown norm kind: " + s);
}

bool norm_supported(const GroupSpec& spec, NormKind kind) {
  if (kind == NormKind::LayerMax) return true;
  return spec.step() == 1 || (spec.step() == 2 && spec.layer_dims()[1] == 1);
}

double homogeneous_norm(const GroupSpec& spec, NormKind kind, const Eigen::Ref<const Vec>& x) {
  if (!x.allFinite()) throw std::invalid_argument("homogeneous_norm: non-finite input");
  const int d1 = spec.horizontal_dim();
  switch (kind) {
    case NormKind::Gauge16:
    case NormKind::GaugeRho: {
      if (!norm_supported(spec, kind))
        throw std::invalid_argument("gauge norm needs step 1, or step 2 with dim V2 = 1");
      const double s1 = x.head(d1).squaredNorm();
      if (spec.step() == 1) return std::sqrt(s1);
      const double c = (kind == NormKind::Gauge16) ? 16.0 : 1.0;
      const double top = x[spec.dim() - 1];
      return std::pow(s1 * s1 + c * top * top, 0.25);
    }
    case NormKind::LayerMax: {
      double m = 0.0;
      for (int l = 0; l < spec.step(); ++l) {
        const double block = x.segment(spec.layer_offset(l), spec.layer_dims()[l]).norm();
        m = std::max(m, std::pow(block, 1.0 / (l + 1)));
      }
      return m;
    }
  }
  return 0.0;
}

double gauge_harmonic_candidate(const GroupSpec& spec, NormKind kind,
                                const Eigen::Ref<const Vec>& x) {
  const double rho = homogeneous_norm(spec, kind, x);
  if (rho == 0.0) throw std::invalid_argument("gauge_harmonic_candidate: singular at the origin");
  return std::pow(rho, 2.0 - spec.homogeneous_dim());
}

}  // namespace sublab::carnot
