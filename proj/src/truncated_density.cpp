#include "gpm/truncated_density.hpp"

#include <cmath>
#include <stdexcept>

namespace gpm {

TruncatedDensity::TruncatedDensity(std::vector<Piece> interior,
                                   Interval domain, double lo_atom,
                                   double hi_atom)
    : interior_(std::move(interior)),
      domain_(domain),
      lo_atom_(lo_atom),
      hi_atom_(hi_atom) {
  if (domain_.circular() && (lo_atom_ > 0.0 || hi_atom_ > 0.0))
    throw std::invalid_argument("atoms are defined on classical domains only");
  if (lo_atom_ < -1e-12 || hi_atom_ < -1e-12)
    throw std::invalid_argument("negative atom mass");
  lo_atom_ = std::max(lo_atom_, 0.0);
  hi_atom_ = std::max(hi_atom_, 0.0);
  cum_.resize(interior_.size() + 1, lo_atom_);
  for (std::size_t i = 0; i < interior_.size(); ++i)
    cum_[i + 1] = cum_[i] + interior_[i].mass();
  if (std::abs(cum_.back() + hi_atom_ - 1.0) > 1e-9)
    throw std::invalid_argument("truncated density mass differs from 1");
}

TruncatedDensity TruncatedDensity::from_density(const PiecewiseDensity& pdf) {
  return TruncatedDensity(pdf.pieces(), pdf.domain(), 0.0, 0.0);
}

double TruncatedDensity::total_mass() const { return cum_.back() + hi_atom_; }

double TruncatedDensity::sample(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("u must be in [0,1)");
  if (u < lo_atom_) return domain_.lo;
  for (std::size_t i = 0; i < interior_.size(); ++i) {
    if (u < cum_[i + 1])
      return interior_[i].left + (u - cum_[i]) / interior_[i].density;
  }
  return domain_.hi;
}

TruncatedDensity truncate(const PiecewiseDensity& pdf, const Interval& target) {
  if (pdf.domain().circular() || target.circular())
    throw std::invalid_argument("truncate: classical domains only");
  if (target.lo < pdf.domain().lo - 1e-12 ||
      target.hi > pdf.domain().hi + 1e-12)
    throw std::domain_error("truncate: target not contained in domain");

  double lo_atom = 0.0, hi_atom = 0.0;
  std::vector<Piece> interior;
  for (const Piece& p : pdf.pieces()) {
    const double l = std::max(p.left, target.lo);
    const double r = std::min(p.right, target.hi);
    if (p.left < target.lo)
      lo_atom += p.density * (std::min(p.right, target.lo) - p.left);
    if (p.right > target.hi)
      hi_atom += p.density * (p.right - std::max(p.left, target.hi));
    if (r > l) interior.push_back(Piece{p.density, l, r});
  }
  if (interior.empty())
    interior.push_back(Piece{0.0, target.lo, target.hi});
  else {
    interior.front().left = target.lo;
    interior.back().right = target.hi;
  }
  return TruncatedDensity(std::move(interior), target, lo_atom, hi_atom);
}

double expected_error(const TruncatedDensity& dist, const ErrorMetric& metric,
                      double x) {
  if (!dist.domain().contains(x))
    throw std::domain_error("expected_error: x outside domain");
  double err = dist.lo_atom() * metric_eval(metric, dist.domain(), dist.domain().lo, x) +
               dist.hi_atom() * metric_eval(metric, dist.domain(), dist.domain().hi, x);
  for (const Piece& p : dist.interior())
    err += p.density * loss_integral(metric, dist.domain(), p.left, p.right, x);
  return err;
}

}  // namespace gpm
