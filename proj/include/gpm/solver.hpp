#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpm/piecewise_density.hpp"

namespace gpm {

// Min-error instance over m-piece densities:
//   minimize Err(x*) over densities p_i and boundaries, subject to tiling,
//   normalization and the exp(eps) density-ratio bound.
// target_x empty means the worst case: the left endpoint on classical
// domains, x = pi on circular ones (the maximum reduces to those points).
struct SolverProblem {
  Interval domain = Interval::unit();
  ErrorMetric metric{1};
  int pieces{3};
  double epsilon{1.0};
  std::optional<double> target_x{};
  bool unbiased{false};
  std::optional<Interval> output_domain{};  // enlarged domain, unbiased case

  double solved_x() const;
  // Domain the pieces tile (output_domain when present).
  Interval tiling_domain() const;
};

struct SolverSolution {
  PiecewiseDensity pdf;
  double objective{0.0};
  bool converged{false};
  int iterations{0};
};

struct SolverOptions {
  int starts{48};              // multi-start count (>= 32 for production runs)
  std::uint64_t seed{0x9e3779b97f4a7c15ULL};
  double step_floor{1e-10};    // pattern-search resolution
  double agree_tol{1e-6};      // best-two-starts agreement => converged
};

// Joint optimization of densities and boundaries by multi-start projected
// pattern search. Normalization is eliminated analytically: densities are
// parametrized as exp(eps * t_i) / Z with t_i in [0,1], which keeps every
// candidate feasible. The known three-piece closed form is always included
// as a warm start.
SolverSolution solve_probabilities(const SolverProblem& problem,
                                   const SolverOptions& options = {});

// Boundary-only optimization with the piece densities fixed (in piece order).
// Normalization pins one width; the rest are searched. For circular domains
// the problem is solved at pi in a rotated frame and rotated back to x.
SolverSolution solve_intervals(const SolverProblem& problem,
                               std::span<const double> fixed_probs, double x,
                               const SolverOptions& options = {});

// Merges adjacent pieces whose densities agree within 1e-7. Idempotent;
// preserves expected error and the density-ratio bound.
PiecewiseDensity merge_pieces(const PiecewiseDensity& pdf);

// Monte Carlo check that m pieces suffice: for sampled (eps, x) pairs the
// merged optimal m- and (m+1)-piece solutions must coincide structurally
// (densities and boundaries within 1e-3).
struct OptimalPieceReport {
  struct Mismatch {
    double epsilon;
    double x;
    std::string what;
  };
  bool all_equal{false};
  int samples{0};
  int flagged{0};  // non-converged solves, not counted as mismatches
  std::vector<Mismatch> failures;
};

OptimalPieceReport verify_optimal_m(const Interval& domain,
                                    const ErrorMetric& metric, int m,
                                    int n_samples,
                                    std::pair<double, double> eps_range,
                                    std::uint64_t seed,
                                    const SolverOptions& options = {});

}  // namespace gpm
