#pragma once

#include "gpm/interval.hpp"

namespace gpm {

// |y - x|^power loss. On circular domains the distance is the shorter arc.
struct ErrorMetric {
  int power{1};
};

inline constexpr ErrorMetric kAbsoluteError{1};
inline constexpr ErrorMetric kSquareError{2};

// Shorter-arc distance between two angles in [0, 2*pi).
double arc_distance(double y, double x);

// Loss evaluated under the domain's topology. Throws std::domain_error when
// either argument is outside the domain.
double metric_eval(const ErrorMetric& metric, const Interval& domain, double y,
                   double x);

// Exact integral of the loss over [left, right) at unit density:
//   \int_left^right |y - x|^p dy   (arc distance when the domain is circular).
// Used by the closed-form error evaluation; no quadrature involved.
double loss_integral(const ErrorMetric& metric, const Interval& domain,
                     double left, double right, double x);

}  // namespace gpm
