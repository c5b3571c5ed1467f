#include "gpm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "gpm/seeding.hpp"

namespace gpm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double classical_half_width(double eps) {
  return std::expm1(eps / 2.0) / (2.0 * std::expm1(eps));
}

// ---------------------------------------------------------------------------
// Joint objective over densities and boundaries.
//
// Parameter vector: m log-levels t_i in [0,1] followed by m-1 interior
// boundaries. Densities are exp(eps * t_i) scaled by the normalizing
// constant, so every parameter vector maps to a feasible density: the ratio
// bound holds because t spans at most [0,1], and the mass is 1 by
// construction.
// ---------------------------------------------------------------------------
struct JointObjective {
  Interval tile;
  ErrorMetric metric;
  double eps{1.0};
  double x{0.0};
  int m{3};
  bool unbiased{false};
  double multiplier{0.0};  // augmented-Lagrangian term for E[y] = x
  double penalty{0.0};

  int dim() const { return 2 * m - 1; }

  // Scratch-free evaluation; boundaries are sorted into a local buffer.
  double operator()(const std::vector<double>& params) const {
    const int n_bounds = m - 1;
    double bounds[32];
    for (int i = 0; i < n_bounds; ++i) bounds[i] = params[m + i];
    std::sort(bounds, bounds + n_bounds);

    double z = 0.0;
    double prev = tile.lo;
    double level[32];
    for (int i = 0; i < m; ++i) {
      const double right = i < n_bounds ? bounds[i] : tile.hi;
      level[i] = std::exp(eps * params[i]);
      z += level[i] * (right - prev);
      prev = right;
    }
    if (!(z > 0.0)) return kInf;

    double err = 0.0;
    double mean_acc = 0.0;
    prev = tile.lo;
    for (int i = 0; i < m; ++i) {
      const double right = i < n_bounds ? bounds[i] : tile.hi;
      const double p = level[i] / z;
      err += p * loss_integral(metric, tile, prev, right, x);
      if (unbiased) mean_acc += p * (right * right - prev * prev) / 2.0;
      prev = right;
    }
    if (unbiased) {
      const double c = mean_acc - x;
      err += multiplier * c + penalty * c * c;
    }
    return err;
  }

  PiecewiseDensity build(const std::vector<double>& params) const {
    const int n_bounds = m - 1;
    std::vector<double> bounds(params.begin() + m, params.end());
    std::sort(bounds.begin(), bounds.end());

    double z = 0.0;
    double prev = tile.lo;
    std::vector<double> level(m);
    for (int i = 0; i < m; ++i) {
      const double right = i < n_bounds ? bounds[i] : tile.hi;
      level[i] = std::exp(eps * params[i]);
      z += level[i] * (right - prev);
      prev = right;
    }
    std::vector<Piece> pieces(m);
    prev = tile.lo;
    for (int i = 0; i < m; ++i) {
      const double right = i < n_bounds ? bounds[i] : tile.hi;
      pieces[i] = Piece{level[i] / z, prev, right};
      prev = right;
    }
    return PiecewiseDensity(std::move(pieces), tile, eps);
  }
};

struct SearchResult {
  std::vector<double> params;
  double value{kInf};
  int evals{0};
};

// Compass pattern search with per-coordinate steps inside a box.
template <typename F>
SearchResult pattern_search(const F& f, std::vector<double> params,
                            const std::vector<double>& lo,
                            const std::vector<double>& hi, double step_floor) {
  const std::size_t n = params.size();
  std::vector<double> step(n);
  for (std::size_t i = 0; i < n; ++i) step[i] = 0.25 * (hi[i] - lo[i]);

  SearchResult res;
  res.params = params;
  res.value = f(params);
  res.evals = 1;

  std::vector<double> cand = params;
  double max_step = 1.0;
  // eval budget guards against creep along numerically flat valleys
  constexpr int kBudget = 200000;
  while (max_step > step_floor && res.evals < kBudget) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        const double v =
            std::clamp(res.params[i] + sign * step[i], lo[i], hi[i]);
        if (v == res.params[i]) continue;
        cand = res.params;
        cand[i] = v;
        const double fv = f(cand);
        ++res.evals;
        if (fv < res.value - 1e-15) {
          res.params = cand;
          res.value = fv;
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      max_step = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        step[i] *= 0.5;
        max_step = std::max(max_step, step[i] / std::max(hi[i] - lo[i], 1e-300));
      }
    }
  }
  return res;
}

// Snap redundant structure: equalize adjacent levels or collapse pieces when
// doing so does not increase the objective. Keeps the merged representation
// of near-degenerate optima exact. Equal-objective moves can cycle (a
// zero-width piece has an exactly flat level), so passes are bounded.
template <typename F>
void polish_structure(const F& f, SearchResult& res, int m) {
  // boundary block is order-insensitive; sort it so index adjacency matches
  std::sort(res.params.begin() + m, res.params.end());
  std::vector<double> cand;
  const int n_bounds = m - 1;
  for (int pass = 0; pass < 2 * m; ++pass) {
    bool changed = false;
    // collapse boundaries onto their neighbors (zero-width pieces) first so
    // the level snapping below sees the final geometry
    for (int j = 0; j < n_bounds; ++j) {
      for (int k : {-1, 1}) {
        const int other = j + k;
        if (other < 0 || other >= n_bounds) continue;
        const double target = res.params[m + other];
        if (res.params[m + j] == target) continue;
        cand = res.params;
        cand[m + j] = target;
        const double fv = f(cand);
        ++res.evals;
        if (fv <= res.value + 1e-12) {
          res.params = cand;
          res.value = std::min(res.value, fv);
          changed = true;
          break;
        }
      }
    }
    for (int i = 0; i + 1 < m; ++i) {
      if (res.params[i] == res.params[i + 1]) continue;
      for (int dir : {0, 1}) {
        cand = res.params;
        cand[i + 1 - dir] = cand[i + dir];
        const double fv = f(cand);
        ++res.evals;
        if (fv <= res.value + 1e-12) {
          res.params = cand;
          res.value = std::min(res.value, fv);
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
}

std::vector<std::vector<double>> latin_hypercube(int n_starts, int dim,
                                                 const std::vector<double>& lo,
                                                 const std::vector<double>& hi,
                                                 std::mt19937_64& rng) {
  std::vector<std::vector<double>> starts(
      n_starts, std::vector<double>(static_cast<std::size_t>(dim)));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> perm(n_starts);
  for (int d = 0; d < dim; ++d) {
    for (int s = 0; s < n_starts; ++s) perm[s] = s;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int s = 0; s < n_starts; ++s) {
      const double cell = (perm[s] + unif(rng)) / n_starts;
      starts[s][d] = lo[d] + cell * (hi[d] - lo[d]);
    }
  }
  return starts;
}

}  // namespace

double SolverProblem::solved_x() const {
  if (target_x) {
    if (!domain.contains(*target_x))
      throw std::domain_error("solver target x outside domain");
    return *target_x;
  }
  // worst case: left endpoint on classical domains, pi on circular ones
  return domain.circular() ? kTwoPi / 2.0 : domain.lo;
}

Interval SolverProblem::tiling_domain() const {
  if (output_domain) return *output_domain;
  return domain;
}

SolverSolution solve_probabilities(const SolverProblem& problem,
                                   const SolverOptions& options) {
  if (problem.pieces < 1 || problem.pieces > 16)
    throw std::invalid_argument("piece count must be in [1, 16]");
  if (!(problem.epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  if (problem.unbiased && !problem.output_domain)
    throw std::invalid_argument("unbiased solve needs an output domain");
  if (options.starts < 2) throw std::invalid_argument("need >= 2 starts");

  const Interval tile = problem.tiling_domain();
  const double x = problem.solved_x();
  const int m = problem.pieces;

  JointObjective obj;
  obj.tile = tile;
  obj.metric = problem.metric;
  obj.eps = problem.epsilon;
  obj.x = x;
  obj.m = m;
  obj.unbiased = problem.unbiased;

  std::vector<double> lo(static_cast<std::size_t>(obj.dim()));
  std::vector<double> hi(lo.size());
  for (int i = 0; i < m; ++i) {
    lo[i] = 0.0;
    hi[i] = 1.0;
  }
  for (int i = m; i < obj.dim(); ++i) {
    lo[i] = tile.lo;
    hi[i] = tile.hi;
  }

  std::mt19937_64 rng(options.seed);
  auto starts = latin_hypercube(options.starts - 1, obj.dim(), lo, hi, rng);

  // Warm start: the known three-piece closed-form shape around x.
  {
    std::vector<double> warm(static_cast<std::size_t>(obj.dim()), 0.0);
    const double W = tile.width();
    double hw = classical_half_width(problem.epsilon) * W;
    if (tile.circular())
      hw = (W / 2.0) * std::expm1(problem.epsilon / 2.0) /
           std::expm1(problem.epsilon);
    double l = std::clamp(x - hw, tile.lo, tile.hi - 2.0 * hw);
    l = std::max(l, tile.lo);
    const double r = std::min(l + 2.0 * hw, tile.hi);
    const int center = std::min(1, m - 1);
    warm[center] = 1.0;
    if (m >= 2) warm[m] = l;
    if (m >= 3) warm[m + 1] = r;
    for (int i = m + 2; i < obj.dim(); ++i)
      warm[i] = r + (tile.hi - r) * (i - m - 1) / std::max(1, m - 2);
    starts.push_back(std::move(warm));
  }

  auto run_all = [&](const JointObjective& f) {
    std::vector<SearchResult> results;
    results.reserve(starts.size());
    for (const auto& s : starts)
      results.push_back(pattern_search(f, s, lo, hi, options.step_floor));
    std::sort(results.begin(), results.end(),
              [](const SearchResult& a, const SearchResult& b) {
                if (a.value != b.value) return a.value < b.value;
                return a.params < b.params;  // deterministic tie-break
              });
    return results;
  };

  int evals = 0;
  std::vector<SearchResult> results;
  if (!problem.unbiased) {
    results = run_all(obj);
  } else {
    // Augmented Lagrangian rounds on the mean constraint.
    obj.penalty = 1e2;
    results = run_all(obj);
    for (int round = 0; round < 4; ++round) {
      for (auto& r : results) evals += r.evals;
      SearchResult best = results.front();
      // update the multiplier from the current constraint violation
      const PiecewiseDensity pdf = obj.build(best.params);
      const double violation = pdf.mean() - x;
      obj.multiplier += 2.0 * obj.penalty * violation;
      obj.penalty *= 10.0;
      std::vector<std::vector<double>> restart = {best.params};
      if (results.size() > 1) restart.push_back(results[1].params);
      starts = std::move(restart);
      results = run_all(obj);
    }
  }

  SearchResult best = results.front();
  polish_structure(obj, best, m);
  for (const auto& r : results) evals += r.evals;

  PiecewiseDensity pdf = obj.build(best.params);
  const double objective = expected_error(pdf, problem.metric, x);

  bool converged = false;
  if (results.size() >= 2)
    converged = std::abs(results[1].value - results[0].value) <=
                options.agree_tol * std::max(1.0, std::abs(results[0].value));
  if (problem.unbiased && std::abs(pdf.mean() - x) > 1e-6) converged = false;

  return SolverSolution{std::move(pdf), objective, converged, evals};
}

// ---------------------------------------------------------------------------
// Boundary-only solve with fixed densities
// ---------------------------------------------------------------------------

namespace {

// Widths from the free coordinates: two widths are pinned by the tiling and
// normalization constraints, the rest are searched directly.
struct IntervalObjective {
  Interval tile;        // frame the pieces tile (rotated for circular)
  ErrorMetric metric;
  double x{0.0};
  std::vector<double> probs;
  int pin_a{0}, pin_b{0};  // indices solved from the two linear constraints
  std::vector<int> free_idx;

  double widths(const std::vector<double>& params,
                std::vector<double>& w) const {
    const double W = tile.width();
    double sum_free = 0.0, mass_free = 0.0;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      w[free_idx[k]] = params[k];
      sum_free += params[k];
      mass_free += probs[free_idx[k]] * params[k];
    }
    const double r1 = W - sum_free;
    const double r2 = 1.0 - mass_free;
    const double det = probs[pin_a] - probs[pin_b];
    const double wa = (r2 - probs[pin_b] * r1) / det;
    const double wb = r1 - wa;
    w[pin_a] = wa;
    w[pin_b] = wb;
    double min_w = kInf;
    for (double v : w) min_w = std::min(min_w, v);
    return min_w;
  }

  double operator()(const std::vector<double>& params) const {
    std::vector<double> w(probs.size());
    if (widths(params, w) < -1e-12) return kInf;
    double err = 0.0, left = tile.lo;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const double right = left + std::max(w[i], 0.0);
      err += probs[i] * loss_integral(metric, tile, left, right, x);
      left = right;
    }
    return err;
  }

  PiecewiseDensity build(const std::vector<double>& params,
                         std::optional<double> eps) const {
    std::vector<double> w(probs.size());
    widths(params, w);
    std::vector<Piece> pieces(probs.size());
    double left = tile.lo;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      double right = left + std::max(w[i], 0.0);
      if (i + 1 == probs.size()) right = tile.hi;
      pieces[i] = Piece{probs[i], left, right};
      left = right;
    }
    return PiecewiseDensity(std::move(pieces), tile, eps);
  }
};

PiecewiseDensity rotate_circular(const PiecewiseDensity& pdf, double delta) {
  std::vector<Piece> rotated;
  for (const Piece& p : pdf.pieces()) {
    const double a = wrap_angle(p.left + delta);
    const double b = a + p.width();
    if (b <= kTwoPi + 1e-12) {
      rotated.push_back(Piece{p.density, a, std::min(b, kTwoPi)});
    } else {
      rotated.push_back(Piece{p.density, a, kTwoPi});
      rotated.push_back(Piece{p.density, 0.0, b - kTwoPi});
    }
  }
  std::sort(rotated.begin(), rotated.end(),
            [](const Piece& a, const Piece& b) { return a.left < b.left; });
  // splitting at the seam can leave equal-density neighbors
  return merge_pieces(PiecewiseDensity(std::move(rotated), Interval::circle(),
                                       pdf.epsilon()));
}

}  // namespace

SolverSolution solve_intervals(const SolverProblem& problem,
                               std::span<const double> fixed_probs, double x,
                               const SolverOptions& options) {
  const int m = static_cast<int>(fixed_probs.size());
  if (m < 1) throw std::invalid_argument("need at least one density");
  if (!problem.domain.contains(x))
    throw std::domain_error("solve_intervals: x outside domain");
  for (double p : fixed_probs)
    if (!(p >= 0.0)) throw std::invalid_argument("densities must be >= 0");

  const bool circular = problem.domain.circular();
  const Interval tile =
      circular ? Interval::circle() : problem.tiling_domain();
  // Circular instances are solved at pi in the frame rotated by pi - x and
  // rotated back afterwards; the arc loss is invariant under rotation.
  const double x_solve = circular ? kTwoPi / 2.0 : x;

  IntervalObjective obj;
  obj.tile = tile;
  obj.metric = problem.metric;
  obj.x = x_solve;
  obj.probs.assign(fixed_probs.begin(), fixed_probs.end());

  int a = 0, b = 0;
  for (int i = 0; i < m; ++i) {
    if (obj.probs[i] > obj.probs[a]) a = i;
    if (obj.probs[i] < obj.probs[b]) b = i;
  }
  const double W = tile.width();

  if (obj.probs[a] - obj.probs[b] < 1e-12) {
    // all densities equal: normalization forces p * W = 1, boundaries free
    if (std::abs(obj.probs[a] * W - 1.0) > 1e-6)
      throw std::invalid_argument("fixed densities cannot be normalized");
    std::vector<Piece> pieces(m);
    for (int i = 0; i < m; ++i)
      pieces[i] = Piece{obj.probs[i], tile.lo + W * i / m,
                        tile.lo + W * (i + 1) / m};
    PiecewiseDensity pdf(std::move(pieces), tile, problem.epsilon);
    const double err = expected_error(pdf, problem.metric, x_solve);
    return SolverSolution{std::move(pdf), err, true, 1};
  }

  obj.pin_a = a;
  obj.pin_b = b;
  for (int i = 0; i < m; ++i)
    if (i != a && i != b) obj.free_idx.push_back(i);

  SearchResult best;
  int evals = 0;
  if (obj.free_idx.empty()) {
    best.params = {};
    best.value = obj(best.params);
    evals = 1;
  } else {
    std::vector<double> lo(obj.free_idx.size(), 0.0);
    std::vector<double> hi(obj.free_idx.size(), W);
    std::mt19937_64 rng(options.seed);
    const int n_starts = std::max(4, options.starts / 4);
    auto starts = latin_hypercube(n_starts, static_cast<int>(lo.size()), lo,
                                  hi, rng);
    starts.push_back(std::vector<double>(lo.size(), 0.0));  // clamped shape
    std::vector<SearchResult> results;
    for (const auto& s : starts)
      results.push_back(pattern_search(obj, s, lo, hi, options.step_floor));
    std::sort(results.begin(), results.end(),
              [](const SearchResult& p, const SearchResult& q) {
                if (p.value != q.value) return p.value < q.value;
                return p.params < q.params;
              });
    best = results.front();
    for (const auto& r : results) evals += r.evals;
    // Snap residual slivers left by the search floor: every width is affine
    // in each free coordinate, so the free value that zeroes a width has a
    // closed form from two probes.
    std::vector<double> w0(obj.probs.size()), w1(obj.probs.size());
    for (std::size_t j = 0; j < best.params.size(); ++j) {
      std::vector<double> snaps = {0.0};
      std::vector<double> probe = best.params;
      obj.widths(probe, w0);
      const double delta = 0.25 * W;
      probe[j] += delta;
      obj.widths(probe, w1);
      for (std::size_t i = 0; i < w0.size(); ++i) {
        const double slope = (w1[i] - w0[i]) / delta;
        if (std::abs(slope) > 1e-9 && w0[i] != 0.0)
          snaps.push_back(best.params[j] - w0[i] / slope);
      }
      for (double snap : snaps) {
        if (!(snap >= 0.0 && snap <= W) || snap == best.params[j]) continue;
        std::vector<double> cand = best.params;
        cand[j] = snap;
        const double fv = obj(cand);
        ++evals;
        if (fv <= best.value + 1e-12) {
          best.params = cand;
          best.value = std::min(best.value, fv);
        }
      }
    }
  }
  if (!std::isfinite(best.value))
    throw std::invalid_argument("fixed densities are infeasible");

  PiecewiseDensity pdf = obj.build(best.params, problem.epsilon);
  if (circular && x != x_solve) pdf = rotate_circular(pdf, x - x_solve);
  const double objective = expected_error(pdf, problem.metric, x);
  return SolverSolution{std::move(pdf), objective, true, evals};
}

// ---------------------------------------------------------------------------

PiecewiseDensity merge_pieces(const PiecewiseDensity& pdf) {
  std::vector<Piece> merged;
  for (const Piece& p : pdf.pieces()) {
    if (!merged.empty() &&
        std::abs(merged.back().density - p.density) <= 1e-7) {
      Piece& prev = merged.back();
      // mass-preserving merge keeps normalization exact
      const double mass = prev.mass() + p.mass();
      prev.right = p.right;
      prev.density = mass / prev.width();
    } else {
      merged.push_back(p);
    }
  }
  return PiecewiseDensity(std::move(merged), pdf.domain(), pdf.epsilon());
}

OptimalPieceReport verify_optimal_m(const Interval& domain,
                                    const ErrorMetric& metric, int m,
                                    int n_samples,
                                    std::pair<double, double> eps_range,
                                    std::uint64_t seed,
                                    const SolverOptions& options) {
  if (n_samples < 1) throw std::invalid_argument("need n_samples >= 1");
  if (!(eps_range.first > 0.0 && eps_range.second > eps_range.first))
    throw std::invalid_argument("bad epsilon range");

  struct Outcome {
    bool flagged{false};
    bool mismatch{false};
    double eps{0.0}, x{0.0};
    std::string what;
  };
  std::vector<Outcome> outcomes(static_cast<std::size_t>(n_samples));

  auto run_sample = [&](int i) {
    Outcome out;
    std::mt19937_64 rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    out.eps = eps_range.first + unif(rng) * (eps_range.second - eps_range.first);
    out.x = domain.lo + unif(rng) * domain.width();

    SolverProblem prob;
    prob.domain = domain;
    prob.metric = metric;
    prob.epsilon = out.eps;
    prob.target_x = out.x;

    prob.pieces = m;
    SolverSolution a = solve_probabilities(prob, options);
    prob.pieces = m + 1;
    SolverSolution b = solve_probabilities(prob, options);
    if (!a.converged || !b.converged) {
      out.flagged = true;
      return out;
    }
    if (b.objective > a.objective + 1e-6) {
      out.mismatch = true;
      out.what = "objective increased with the extra piece";
      return out;
    }
    const PiecewiseDensity ma = merge_pieces(a.pdf);
    const PiecewiseDensity mb = merge_pieces(b.pdf);
    if (ma.pieces().size() != mb.pieces().size()) {
      out.mismatch = true;
      out.what = "merged piece counts differ (" +
                 std::to_string(ma.pieces().size()) + " vs " +
                 std::to_string(mb.pieces().size()) + ")";
      return out;
    }
    for (std::size_t k = 0; k < ma.pieces().size(); ++k) {
      const Piece& pa = ma.pieces()[k];
      const Piece& pb = mb.pieces()[k];
      if (std::abs(pa.density - pb.density) > 1e-3 ||
          std::abs(pa.left - pb.left) > 1e-3 ||
          std::abs(pa.right - pb.right) > 1e-3) {
        out.mismatch = true;
        out.what = "piece " + std::to_string(k) + " differs";
        return out;
      }
    }
    return out;
  };

  // samples are independent; fan out across hardware threads
  const unsigned n_threads =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  std::vector<std::future<void>> futures;
  std::atomic<int> next{0};
  for (unsigned t = 0; t < n_threads; ++t) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < n_samples; i = next.fetch_add(1))
        outcomes[static_cast<std::size_t>(i)] = run_sample(i);
    }));
  }
  for (auto& f : futures) f.get();

  OptimalPieceReport report;
  report.samples = n_samples;
  for (const Outcome& out : outcomes) {
    if (out.flagged) {
      ++report.flagged;
    } else if (out.mismatch) {
      report.failures.push_back(
          OptimalPieceReport::Mismatch{out.eps, out.x, out.what});
    }
  }
  report.all_equal = report.failures.empty();
  return report;
}

}  // namespace gpm
