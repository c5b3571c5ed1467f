#include "gpm/polar.hpp"

#include <cmath>
#include <stdexcept>

#include "gpm/analytics.hpp"
#include "gpm/mechanisms.hpp"

namespace gpm {

namespace {

constexpr double kEpsFloor = 1e-9;  // below this a dimension is uniform noise

double radius_worst_mse(double e, double d) {
  // endpoint squared error on [0, d); scales as d^2 from the unit domain
  if (e <= kEpsFloor) return d * d / 3.0;
  return d * d * mse_closed_form_classical(e, 0.0);
}

double angle_mse(double e) {
  const double pi = kTwoPi / 2.0;
  if (e <= kEpsFloor) return pi * pi / 3.0;
  return circular_mse_closed_form(e);
}

}  // namespace

double polar_split_objective(double e1, double eps_total, double d) {
  if (e1 < 0.0 || e1 > eps_total)
    throw std::invalid_argument("e1 must lie in [0, eps_total]");
  return radius_worst_mse(e1, d) + angle_mse(eps_total - e1);
}

BudgetSplit optimal_budget_split(double eps_total, double d) {
  if (!(eps_total > 0.0)) throw std::invalid_argument("eps_total must be > 0");
  if (!(d > 0.0)) throw std::invalid_argument("d must be > 0");

  auto f = [&](double e1) { return polar_split_objective(e1, eps_total, d); };
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = eps_total;
  double c1 = b - phi * (b - a);
  double c2 = a + phi * (b - a);
  double f1 = f(c1), f2 = f(c2);
  while (b - a > 1e-6) {
    if (f1 > f2) {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + phi * (b - a);
      f2 = f(c2);
    } else {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - phi * (b - a);
      f1 = f(c1);
    }
  }
  // the minimum may sit on the boundary (tiny totals starve the radius)
  double e1 = (a + b) / 2.0;
  double best = f(e1);
  for (double cand : {0.0, eps_total}) {
    const double v = f(cand);
    if (v < best) {
      best = v;
      e1 = cand;
    }
  }
  return BudgetSplit{e1, eps_total - e1, eps_total};
}

PolarPoint perturb_polar(const PolarPoint& pt, const BudgetSplit& split,
                         double d, std::mt19937_64& rng) {
  if (!(d > 0.0)) throw std::invalid_argument("d must be > 0");
  if (!(pt.radius >= 0.0 && pt.radius < d))
    throw std::domain_error("radius outside [0, d)");
  if (!(pt.angle >= 0.0 && pt.angle < kTwoPi))
    throw std::domain_error("angle outside [0, 2*pi)");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u_r = unif(rng);
  const double u_a = unif(rng);

  PolarPoint out;
  if (split.eps_radius <= kEpsFloor) {
    out.radius = u_r * d;
  } else {
    const PiecewiseDensity pdf = ogpm_classical(split.eps_radius, pt.radius / d);
    out.radius = pdf.sample(u_r) * d;
  }
  if (split.eps_angle <= kEpsFloor) {
    out.angle = u_a * kTwoPi;
  } else {
    out.angle = ogpm_circular(split.eps_angle, pt.angle).sample(u_a);
  }
  out.radius = std::min(out.radius, std::nextafter(d, 0.0));
  out.angle = wrap_angle(out.angle);
  return out;
}

}  // namespace gpm
