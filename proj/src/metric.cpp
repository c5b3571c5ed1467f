#include "gpm/metric.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpm {

namespace {

double ipow(double v, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= v;
  return r;
}

// Distance to x under the domain's topology.
double distance(const Interval& domain, double y, double x) {
  return domain.circular() ? arc_distance(y, x) : std::abs(y - x);
}

}  // namespace

double arc_distance(double y, double x) {
  double d = std::abs(y - x);
  return std::min(d, kTwoPi - d);
}

double metric_eval(const ErrorMetric& metric, const Interval& domain, double y,
                   double x) {
  if (metric.power < 1) throw std::invalid_argument("metric power must be >= 1");
  if (!domain.contains(y) || !domain.contains(x))
    throw std::domain_error("metric_eval: argument outside domain");
  return ipow(distance(domain, y, x), metric.power);
}

double loss_integral(const ErrorMetric& metric, const Interval& domain,
                     double left, double right, double x) {
  if (metric.power < 1) throw std::invalid_argument("metric power must be >= 1");
  if (right <= left) return 0.0;
  const int p = metric.power;

  // Split [left, right) at the points where the distance-to-x kinks; between
  // kinks the distance is linear with unit slope, so
  //   \int = |d(b)^{p+1} - d(a)^{p+1}| / (p+1).
  double cuts[4] = {left, right, right, right};
  int n_cuts = 2;
  auto add_cut = [&](double c) {
    if (c > left && c < right) cuts[n_cuts++] = c;
  };
  if (domain.circular()) {
    add_cut(wrap_angle(x));
    add_cut(wrap_angle(x + kTwoPi / 2.0));  // antipode
  } else {
    add_cut(x);
  }
  std::sort(cuts, cuts + n_cuts);

  double total = 0.0;
  for (int i = 0; i + 1 < n_cuts; ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a) continue;
    const double da = distance(domain, a, x);
    const double db = distance(domain, b, x);
    total += std::abs(ipow(db, p + 1) - ipow(da, p + 1)) / (p + 1);
  }
  return total;
}

}  // namespace gpm
