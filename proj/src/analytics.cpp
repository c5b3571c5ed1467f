#include "gpm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "gpm/solver.hpp"

namespace gpm {

namespace {

double point_error(const MechanismSpec& spec, double eps,
                   const ErrorMetric& metric, double x) {
  if (spec.analytic_error) return spec.analytic_error(eps, metric);
  if (spec.pdf) return expected_error(spec.pdf(eps, x), metric, x);
  if (spec.distribution) return expected_error(spec.distribution(eps, x), metric, x);
  throw std::invalid_argument(spec.name + ": no error evaluation available");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string metric_name(const ErrorMetric& metric) {
  return "l" + std::to_string(metric.power);
}

ErrorCurve whole_domain_error(const MechanismSpec& spec, double eps,
                              const ErrorMetric& metric, int grid_n) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
  const Interval& in = spec.input_domain;
  ErrorCurve curve{spec.name, eps, metric, {}};
  curve.points.reserve(static_cast<std::size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) {
    // classical grids include both endpoints; circular ones stop short of
    // 2*pi, which aliases 0
    const double x = in.circular()
                         ? in.lo + in.width() * i / grid_n
                         : in.lo + in.width() * i / (grid_n - 1);
    curve.points.emplace_back(x, point_error(spec, eps, metric, x));
  }
  return curve;
}

double worst_case_error(const MechanismSpec& spec, double eps,
                        const ErrorMetric& metric) {
  switch (spec.worst_case) {
    case WorstCaseRule::Analytic:
      return spec.analytic_error(eps, metric);
    case WorstCaseRule::AtPi:
      return point_error(spec, eps, metric, kTwoPi / 2.0);
    case WorstCaseRule::Endpoints: {
      const double a = point_error(spec, eps, metric, spec.input_domain.lo);
      const double b = point_error(spec, eps, metric, spec.input_domain.hi);
      return std::max(a, b);
    }
    case WorstCaseRule::GridScan: {
      const ErrorCurve curve = whole_domain_error(spec, eps, metric, 1001);
      double m = 0.0;
      for (const auto& [x, err] : curve.points) m = std::max(m, err);
      return m;
    }
  }
  throw std::logic_error("unreachable");
}

double mse_closed_form_classical(double eps, double x) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("x outside [0,1)");
  const double p = std::exp(eps / 2.0);
  const double E = std::exp(eps);
  const double C = std::expm1(eps / 2.0) / (2.0 * std::expm1(eps));
  auto cube = [](double v) { return v * v * v; };
  if (x < C)
    return p / 3.0 * (cube(2.0 * C - x) + cube(x)) +
           p / (3.0 * E) * (cube(1.0 - x) - cube(2.0 * C - x));
  if (x < 1.0 - C)
    return p / (3.0 * E) * (-2.0 * cube(C) + 3.0 * x * x - 3.0 * x + 1.0) +
           p / 3.0 * (2.0 * cube(C));
  return p / (3.0 * E) * (cube(1.0 - 2.0 * C - x) + cube(x)) +
         p / 3.0 * (cube(1.0 - x) - cube(1.0 - 2.0 * C - x));
}

double circular_mse_closed_form(double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const double pi = kTwoPi / 2.0;
  const double p = std::exp(eps / 2.0) / kTwoPi;
  const double C = pi * std::expm1(eps / 2.0) / std::expm1(eps);
  return 2.0 / 3.0 *
         ((pi * pi * pi - C * C * C) * p / std::exp(eps) + C * C * C * p);
}

PointDesign point_targeted_probability(double eps, double x0,
                                       const ErrorMetric& metric) {
  if (!(x0 > 0.0 && x0 < 1.0))
    throw std::domain_error("x0 must lie strictly inside (0,1)");
  SolverProblem problem;
  problem.domain = Interval::unit();
  problem.metric = metric;
  problem.pieces = 3;
  problem.epsilon = eps;
  problem.target_x = x0;
  SolverSolution sol = solve_probabilities(problem);
  if (!sol.converged)
    throw std::runtime_error("point-targeted solve did not converge");
  return PointDesign{sol.pdf.max_density(), sol.objective};
}

void write_csv(std::ostream& os, std::span<const ErrorCurve> curves) {
  os << "mechanism,epsilon,metric,x,err\n";
  for (const ErrorCurve& c : curves)
    for (const auto& [x, err] : c.points)
      os << c.mechanism << ',' << fmt(c.epsilon) << ',' << metric_name(c.metric)
         << ',' << fmt(x) << ',' << fmt(err) << '\n';
}

}  // namespace gpm
