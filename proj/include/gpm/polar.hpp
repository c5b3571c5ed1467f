#pragma once

#include <cstdint>
#include <random>

namespace gpm {

// Point in [0, d) x [0, 2*pi).
struct PolarPoint {
  double radius{0.0};
  double angle{0.0};
};

struct BudgetSplit {
  double eps_radius{0.0};  // classical dimension
  double eps_angle{0.0};   // circular dimension
  double total{0.0};
};

// Worst-case squared-error objective for assigning eps_radius = e1 and
// eps_angle = total - e1: classical MSE at the domain endpoint (scaled to
// [0, d)) plus the circular MSE.
double polar_split_objective(double e1, double eps_total, double d);

// Minimizes the objective above by golden-section search on [0, eps_total]
// (tolerance 1e-6); the objective is unimodal over the tested range.
BudgetSplit optimal_budget_split(double eps_total, double d = 1.0);

// Per-dimension perturbation: radius through the classical optimal mechanism
// rescaled to [0, d), angle through the circular one. A zero budget on a
// dimension degenerates to the uniform density.
PolarPoint perturb_polar(const PolarPoint& pt, const BudgetSplit& split,
                         double d, std::mt19937_64& rng);

}  // namespace gpm
