#pragma once

#include "sublab/carnot/group.hpp"

#include <string>

namespace sublab::carnot {

/// Homogeneous norms: rho(delta_a x) = a rho(x), rho(x) > 0 iff x != 0,
/// rho(-x) = rho(x).
///
/// Gauge16 / GaugeRho are the closed-form gauges
///   rho(x) = (|x_h|^4 + c |x_last|^2)^{1/4},  c = 16 or 1,
/// available when the group has step 1 (plain Euclidean norm) or step 2 with a
/// one-dimensional top layer. LayerMax = max_i |layer_i|^{1/i} works on every
/// group.
enum class NormKind { Gauge16, GaugeRho, LayerMax };

std::string to_string(NormKind kind);
NormKind norm_from_string(const std::string& s);

bool norm_supported(const GroupSpec& spec, NormKind kind);

double homogeneous_norm(const GroupSpec& spec, NormKind kind, const Eigen::Ref<const Vec>& x);

/// rho(x)^{2-Q}; harmonic for the sub-Laplacian off the origin when rho is the
/// L-gauge. Throws for x = 0.
double gauge_harmonic_candidate(const GroupSpec& spec, NormKind kind,
                                const Eigen::Ref<const Vec>& x);

}  // namespace sublab::carnot
