#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gpm/mechanisms.hpp"

namespace gpm {

struct ErrorCurve {
  std::string mechanism;
  double epsilon{0.0};
  ErrorMetric metric{1};
  std::vector<std::pair<double, double>> points;  // (x, err), sorted by x
};

// Expected error sampled at grid_n evenly spaced inputs over the mechanism's
// input domain (endpoints included on classical domains).
ErrorCurve whole_domain_error(const MechanismSpec& spec, double eps,
                              const ErrorMetric& metric, int grid_n = 1001);

// Largest expected error over the input domain, located per the mechanism's
// worst-case rule (endpoint evaluation, x = pi, grid scan, or analytic).
double worst_case_error(const MechanismSpec& spec, double eps,
                        const ErrorMetric& metric);

// Mean squared error of the optimal classical mechanism, three-case closed
// form; agrees with expected_error(ogpm_classical(eps,x), L2, x) to 1e-12.
double mse_closed_form_classical(double eps, double x);

// x-independent mean squared error of the optimal circular mechanism:
//   (2/3) * ((pi^3 - C^3) p/e^eps + C^3 p),  C = pi(e^{eps/2}-1)/(e^eps-1).
double circular_mse_closed_form(double eps);

// Single-point design: minimizes the error at x0 (three pieces) and reports
// the central density and the achieved error.
struct PointDesign {
  double density{0.0};
  double error{0.0};
};
PointDesign point_targeted_probability(double eps, double x0,
                                       const ErrorMetric& metric);

// CSV with header: mechanism,epsilon,metric,x,err
void write_csv(std::ostream& os, std::span<const ErrorCurve> curves);

std::string metric_name(const ErrorMetric& metric);

}  // namespace gpm
