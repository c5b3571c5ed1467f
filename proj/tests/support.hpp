#pragma once

// Shared test helpers: an independent quadrature oracle for expected errors
// and a random-density generator. The oracle integrates density_at * loss on
// a fine trapezoid grid laid out piece by piece, so it never goes through
// the closed-form antiderivative path it is used to check.

#include <cmath>
#include <random>
#include <vector>

#include "gpm/mechanisms.hpp"
#include "gpm/piecewise_density.hpp"
#include "gpm/truncated_density.hpp"

namespace gpm::test {

inline double metric_distance(const Interval& domain, double y, double x,
                              int power) {
  double d = domain.circular() ? arc_distance(y, x) : std::abs(y - x);
  double r = 1.0;
  for (int i = 0; i < power; ++i) r *= d;
  return r;
}

inline double quad_error(const PiecewiseDensity& pdf, const ErrorMetric& metric,
                         double x, long panels = 1'000'000) {
  const double W = pdf.domain().width();
  double total = 0.0;
  for (const Piece& p : pdf.pieces()) {
    const long n = std::max<long>(8, std::lround(panels * p.width() / W));
    const double h = p.width() / n;
    double sum =
        0.5 * (metric_distance(pdf.domain(), p.left, x, metric.power) +
               metric_distance(pdf.domain(), p.right, x, metric.power));
    for (long i = 1; i < n; ++i)
      sum += metric_distance(pdf.domain(), p.left + i * h, x, metric.power);
    total += p.density * sum * h;
  }
  return total;
}

inline double quad_error(const TruncatedDensity& dist,
                         const ErrorMetric& metric, double x,
                         long panels = 1'000'000) {
  const double W = dist.domain().width();
  double total =
      dist.lo_atom() *
          metric_distance(dist.domain(), dist.domain().lo, x, metric.power) +
      dist.hi_atom() *
          metric_distance(dist.domain(), dist.domain().hi, x, metric.power);
  for (const Piece& p : dist.interior()) {
    if (p.width() <= 0.0) continue;
    const long n = std::max<long>(8, std::lround(panels * p.width() / W));
    const double h = p.width() / n;
    double sum =
        0.5 * (metric_distance(dist.domain(), p.left, x, metric.power) +
               metric_distance(dist.domain(), p.right, x, metric.power));
    for (long i = 1; i < n; ++i)
      sum += metric_distance(dist.domain(), p.left + i * h, x, metric.power);
    total += p.density * sum * h;
  }
  return total;
}

// Random feasible density: random interior boundaries, levels spread within
// the exp(eps) ratio band, mass normalized by construction.
inline PiecewiseDensity random_density(std::mt19937_64& rng,
                                       const Interval& domain, double eps,
                                       int max_pieces = 6) {
  std::uniform_int_distribution<int> n_pieces(1, max_pieces);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int m = n_pieces(rng);
  std::vector<double> bounds;
  for (int i = 0; i + 1 < m; ++i)
    bounds.push_back(domain.lo + unif(rng) * domain.width());
  std::sort(bounds.begin(), bounds.end());
  bounds.push_back(domain.hi);

  std::vector<Piece> pieces;
  double z = 0.0, prev = domain.lo;
  std::vector<double> levels;
  for (int i = 0; i < m; ++i) {
    const double level = std::exp(eps * unif(rng));
    levels.push_back(level);
    z += level * (bounds[static_cast<std::size_t>(i)] - prev);
    prev = bounds[static_cast<std::size_t>(i)];
  }
  prev = domain.lo;
  for (int i = 0; i < m; ++i) {
    pieces.push_back(Piece{levels[static_cast<std::size_t>(i)] / z, prev,
                           bounds[static_cast<std::size_t>(i)]});
    prev = bounds[static_cast<std::size_t>(i)];
  }
  return PiecewiseDensity(std::move(pieces), domain, eps);
}

}  // namespace gpm::test
