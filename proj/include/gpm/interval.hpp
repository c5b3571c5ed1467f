#pragma once

#include <numbers>
#include <stdexcept>

namespace gpm {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Topology { Classical, Circular };

// Half-open bounded range [lo, hi). Circular intervals are always the
// canonical angle domain [0, 2*pi). The right endpoint is treated as a
// member when testing containment, matching the closed-interval reading
// used everywhere downstream.
struct Interval {
  double lo{0.0};
  double hi{1.0};
  Topology topology{Topology::Classical};

  static Interval classical(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("interval requires lo < hi");
    return Interval{lo, hi, Topology::Classical};
  }
  static Interval unit() { return Interval{0.0, 1.0, Topology::Classical}; }
  static Interval circle() { return Interval{0.0, kTwoPi, Topology::Circular}; }

  double width() const { return hi - lo; }
  bool circular() const { return topology == Topology::Circular; }
  // Closed-interval membership with a 1e-9 relative slack: affine domain
  // maps round their endpoints by an ulp, and the right endpoint stands in
  // for the half-open limit.
  bool contains(double x) const {
    const double tol = 1e-9 * (width() < 1.0 ? 1.0 : width());
    return x >= lo - tol && x <= hi + tol;
  }

  bool operator==(const Interval&) const = default;
};

// Wraps an angle into [0, 2*pi).
double wrap_angle(double x);

}  // namespace gpm
