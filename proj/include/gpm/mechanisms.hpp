#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gpm/piecewise_density.hpp"
#include "gpm/transform.hpp"
#include "gpm/truncated_density.hpp"

namespace gpm {

// ---------------------------------------------------------------------------
// Closed-form mechanisms
// ---------------------------------------------------------------------------

// Optimal three-piece mechanism on [0,1) -> [0,1).
// High density exp(eps/2) on the interval [l, r) around x, low density
// exp(-eps/2) elsewhere; the interval clamps to [0, 2C) and [1-2C, 1) near
// the boundaries, with C = (exp(eps/2) - 1) / (2 exp(eps) - 2).
PiecewiseDensity ogpm_classical(double eps, double x);

// Circular counterpart on [0, 2*pi): high arc of half-width
// pi * (exp(eps/2) - 1) / (exp(eps) - 1) centered at x, wrapping freely.
PiecewiseDensity ogpm_circular(double eps, double x);

// Unbiased variant on [0,1) -> [-C, C+1) with
// C = (exp(eps/2) + 1) / (exp(eps/2) - 1); satisfies E[M(x)] = x exactly.
PiecewiseDensity ogpm_unbiased(double eps, double x);

// Piecewise mechanism on [-1,1) -> [-Cpm, Cpm),
// Cpm = (exp(eps/2) + 1) / (exp(eps/2) - 1); central interval of fixed
// length Cpm - 1 placed affinely in x.
PiecewiseDensity pm(double eps, double x);

// Square-wave mechanism on [0,1) -> [-b, 1+b) with the high band [x-b, x+b).
PiecewiseDensity sw(double eps, double x);

// Constant whole-domain L1 error of the staircase mechanism at sensitivity 1.
double staircase_expected_error(double eps);

// Laplace(x, 1/eps) truncated to [0,1): exact endpoint atoms, interior
// represented on a uniform grid (cell masses exact via the Laplace CDF).
TruncatedDensity t_laplace(double eps, double x, int grid = 4096);

// Bounded Laplace shape on [0,1): density proportional to exp(-eps*|y-x|),
// normalized per input, on a uniform grid.
PiecewiseDensity b_laplace(double eps, double x, int grid = 4096);

// Closed-form expected L1 error of the bounded Laplace shape normalized by
// the boundary constant (1 - exp(-eps)) / 2:
//   (2 - (1+eps*x)e^{-eps*x} - (1+eps(1-x))e^{-eps(1-x)}) / (eps(1-e^{-eps}))
double b_laplace_expected_error(double eps, double x);

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

// How the worst-case input is located for a mechanism.
enum class WorstCaseRule {
  Endpoints,  // max of Err at the domain endpoints
  AtPi,       // circular: Err is maximal (here: constant) at x = pi
  GridScan,   // no endpoint argument available; scan a fixed grid
  Analytic,   // x-independent closed form (staircase)
};

struct MechanismSpec {
  std::string name;
  Interval input_domain;
  bool biased{true};
  WorstCaseRule worst_case{WorstCaseRule::Endpoints};

  std::function<Interval(double eps)> output_domain;
  // Universal accessor; pure mechanisms carry zero atoms.
  std::function<TruncatedDensity(double eps, double x)> distribution;
  // Null for mechanisms with inherent atoms.
  std::function<PiecewiseDensity(double eps, double x)> pdf;
  // Fast exact inverse-CDF sampler (eps, x, u) -> y; null means sample via
  // the distribution.
  std::function<double(double eps, double x, double u)> inverse_cdf;
  // Only for analytic-only entries: (eps, metric) -> x-independent error.
  std::function<double(double eps, const ErrorMetric&)> analytic_error;

  bool sampleable() const { return static_cast<bool>(distribution); }
  double perturb(double eps, double x, double u) const;
};

// Registered names: ogpm, ogpm-circular, ogpm-u, pm, sw, pm-c, sw-c, t-pm,
// t-sw, t-laplace, b-laplace, staircase (analytic-only).
const std::map<std::string, MechanismSpec>& mechanism_registry();
const MechanismSpec& mechanism(const std::string& name);
std::vector<std::string> mechanism_names();

// Composes the mechanism with the affine map that takes its output domain
// onto its input domain (privacy level unchanged).
MechanismSpec compress(const MechanismSpec& base, std::string name = {});

// Re-domains a classical mechanism so its input matches `data_domain`;
// outputs are mapped back through the inverse transform. A circular target
// flattens the angle domain, i.e. treats [0, 2*pi) as a classical range.
// Mechanisms native to the target are returned unchanged.
MechanismSpec adapted_to(const MechanismSpec& spec, const Interval& data_domain);

}  // namespace gpm
