#pragma once

#include <optional>
#include <vector>

#include "gpm/interval.hpp"
#include "gpm/metric.hpp"

namespace gpm {

// One constant-density segment [left, right).
struct Piece {
  double density{0.0};
  double left{0.0};
  double right{0.0};

  double width() const { return right - left; }
  double mass() const { return density * width(); }
};

// Normalized piecewise-constant probability density whose pieces tile the
// domain: pieces[0].left == domain.lo, each right equals the next left, and
// the last right equals domain.hi. Total mass must equal 1 within 1e-9.
//
// When tagged with a privacy parameter, the ratio between the largest and
// the smallest positive density must not exceed exp(epsilon) * (1 + 1e-9).
//
// Zero-width pieces are accepted and removed during construction. Instances
// are immutable after construction.
class PiecewiseDensity {
 public:
  PiecewiseDensity(std::vector<Piece> pieces, Interval domain,
                   std::optional<double> epsilon = std::nullopt);

  const Interval& domain() const { return domain_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::optional<double> epsilon() const { return epsilon_; }

  double density_at(double y) const;
  double cdf(double y) const;
  // Inverse-CDF sample for u in [0, 1).
  double sample(double u) const;

  double max_density() const;
  double min_positive_density() const;
  double total_mass() const;
  // \int y * pdf(y) dy
  double mean() const;

 private:
  std::vector<Piece> pieces_;
  Interval domain_;
  std::optional<double> epsilon_;
  std::vector<double> cum_;  // cumulative mass up to each piece boundary
};

// Expected loss E[L(y, x)] via exact per-piece antiderivatives. Circular
// metrics split pieces at x and at its antipode; no quadrature error beyond
// floating point. Throws std::domain_error when x is outside the domain.
double expected_error(const PiecewiseDensity& pdf, const ErrorMetric& metric,
                      double x);

}  // namespace gpm
