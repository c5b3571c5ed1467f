#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gpm/mechanisms.hpp"
#include "gpm/polar.hpp"

using namespace gpm;

namespace {
const double kPi = kTwoPi / 2.0;
}

TEST_CASE("budget split satisfies its constraint") {
  for (double total : {0.5, 2.0, 1.0 + kTwoPi, 12.0}) {
    const BudgetSplit split = optimal_budget_split(total);
    CHECK(split.eps_radius + split.eps_angle ==
          doctest::Approx(total).epsilon(1e-9));
    CHECK(split.eps_radius >= 0.0);
    CHECK(split.eps_angle >= 0.0);
  }
  CHECK_THROWS_AS(optimal_budget_split(0.0), std::invalid_argument);
}

TEST_CASE("golden-section result matches a dense grid scan") {
  for (double total : {2.0, 1.0 + kTwoPi}) {
    const BudgetSplit split = optimal_budget_split(total);
    double best_e1 = 0.0, best = 1e300;
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
      const double e1 = total * i / n;
      const double v = polar_split_objective(e1, total, 1.0);
      if (v < best) {
        best = v;
        best_e1 = e1;
      }
    }
    CHECK(split.eps_radius == doctest::Approx(best_e1).epsilon(1e-3));
    CHECK(polar_split_objective(split.eps_radius, total, 1.0) <=
          best + 1e-9);
  }
}

TEST_CASE("starving the angle dimension hurts far more than the radius") {
  const double total = 1.0 + kTwoPi;
  const double no_radius = polar_split_objective(0.0, total, 1.0);
  const double no_angle = polar_split_objective(total, total, 1.0);
  CHECK(std::isfinite(no_radius));
  CHECK(no_radius < no_angle);
}

TEST_CASE("perturbed points stay inside the domain") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const BudgetSplit split = optimal_budget_split(1.0 + kTwoPi);
  const double d = 2.0;
  for (int i = 0; i < 20000; ++i) {
    const PolarPoint in{unif(rng) * d, unif(rng) * kTwoPi};
    const PolarPoint out = perturb_polar(in, split, d, rng);
    CHECK(out.radius >= 0.0);
    CHECK(out.radius < d);
    CHECK(out.angle >= 0.0);
    CHECK(out.angle < kTwoPi);
  }
}

TEST_CASE("zero radius budget degenerates to a uniform radius") {
  std::mt19937_64 rng(14);
  const BudgetSplit split{0.0, 4.0, 4.0};
  const int n = 50000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const PolarPoint out = perturb_polar({0.9, 1.0}, split, 1.0, rng);
    sum += out.radius;
    sumsq += out.radius * out.radius;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(0.5).epsilon(0.01));
  // uniform variance 1/12
  CHECK(sumsq / n - mean * mean == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("monte carlo worst-case error matches the split objective") {
  const double total = 1.0 + kTwoPi;
  const BudgetSplit split = optimal_budget_split(total);
  // worst-case input: radius at the endpoint, any angle
  const PolarPoint worst{0.0, kPi};
  std::mt19937_64 rng(15);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const PolarPoint out = perturb_polar(worst, split, 1.0, rng);
    const double dr = out.radius - worst.radius;
    const double da = arc_distance(out.angle, worst.angle);
    const double loss = dr * dr + da * da;
    sum += loss;
    sumsq += loss * loss;
  }
  const double mean = sum / n;
  const double se =
      std::sqrt((sumsq / n - mean * mean) / static_cast<double>(n));
  const double expect = polar_split_objective(split.eps_radius, total, 1.0);
  CHECK(std::abs(mean - expect) < 3.0 * se);
}

TEST_CASE("joint output density composes the two privacy budgets") {
  const BudgetSplit split{1.0, 2.0, 3.0};
  const double bound = std::exp(split.total) * (1.0 + 1e-9);
  const PolarPoint in1{0.1, 0.3}, in2{0.8, 4.0};
  const PiecewiseDensity r1 = ogpm_classical(split.eps_radius, in1.radius);
  const PiecewiseDensity r2 = ogpm_classical(split.eps_radius, in2.radius);
  const PiecewiseDensity a1 = ogpm_circular(split.eps_angle, in1.angle);
  const PiecewiseDensity a2 = ogpm_circular(split.eps_angle, in2.angle);
  for (int i = 0; i < 50; ++i) {
    const double r = (i + 0.41) / 50.0;
    for (int j = 0; j < 50; ++j) {
      const double a = (j + 0.17) / 50.0 * kTwoPi;
      const double joint1 = r1.density_at(r) * a1.density_at(a);
      const double joint2 = r2.density_at(r) * a2.density_at(a);
      CHECK(joint1 / joint2 <= bound);
    }
  }
}
