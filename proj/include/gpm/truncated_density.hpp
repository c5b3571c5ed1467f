#pragma once

#include <vector>

#include "gpm/interval.hpp"
#include "gpm/metric.hpp"
#include "gpm/piecewise_density.hpp"

namespace gpm {

// Piecewise density plus optional point masses at the domain endpoints,
// produced by truncating a density defined on a larger domain. The interior
// pieces tile the (classical) domain; interior mass plus the two atoms sums
// to 1 within 1e-9.
class TruncatedDensity {
 public:
  TruncatedDensity(std::vector<Piece> interior, Interval domain,
                   double lo_atom, double hi_atom);

  static TruncatedDensity from_density(const PiecewiseDensity& pdf);

  const Interval& domain() const { return domain_; }
  const std::vector<Piece>& interior() const { return interior_; }
  double lo_atom() const { return lo_atom_; }
  double hi_atom() const { return hi_atom_; }
  bool has_atoms() const { return lo_atom_ > 0.0 || hi_atom_ > 0.0; }

  double total_mass() const;
  double sample(double u) const;

 private:
  std::vector<Piece> interior_;
  Interval domain_;
  double lo_atom_{0.0};
  double hi_atom_{0.0};
  std::vector<double> cum_;
};

// Collapses the probability mass of `pdf` outside `target` into point masses
// at target.lo and target.hi; interior pieces are clipped exactly. Classical
// domains only; target must be contained in pdf's domain.
TruncatedDensity truncate(const PiecewiseDensity& pdf, const Interval& target);

double expected_error(const TruncatedDensity& dist, const ErrorMetric& metric,
                      double x);

}  // namespace gpm
