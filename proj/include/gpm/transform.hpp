#pragma once

#include "gpm/piecewise_density.hpp"

namespace gpm {

// Affine map x' = scale * x + shift with scale > 0. Applying it to a density
// preserves the density ratios (hence the privacy level) and the utility
// ordering between mechanisms.
struct Transform {
  double scale{1.0};
  double shift{0.0};

  double operator()(double x) const { return scale * x + shift; }
  Transform inverse() const { return Transform{1.0 / scale, -shift / scale}; }
  // g(x) = this(other(x))
  Transform compose(const Transform& other) const {
    return Transform{scale * other.scale, scale * other.shift + shift};
  }
  // The map taking `from` onto `to`.
  static Transform between(const Interval& from, const Interval& to);
};

// Maps pieces to scale*[l, r) + shift with density / scale. Classical
// domains only; throws std::invalid_argument for circular input.
PiecewiseDensity apply_transform(const PiecewiseDensity& pdf,
                                 const Transform& t);

}  // namespace gpm
