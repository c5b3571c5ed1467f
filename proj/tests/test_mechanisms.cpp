#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gpm/analytics.hpp"
#include "gpm/mechanisms.hpp"
#include "support.hpp"

using namespace gpm;

namespace {
const double kPi = kTwoPi / 2.0;
const ErrorMetric kL1{1};
const ErrorMetric kL2{2};

double high_piece_left(const PiecewiseDensity& pdf) {
  for (const Piece& p : pdf.pieces())
    if (p.density == pdf.max_density()) return p.left;
  return 0.0;
}
double high_piece_right(const PiecewiseDensity& pdf) {
  for (const Piece& p : pdf.pieces())
    if (p.density == pdf.max_density()) return p.right;
  return 0.0;
}
}  // namespace

TEST_CASE("classical optimal mechanism closed form") {
  const PiecewiseDensity at0 = ogpm_classical(1.0, 0.0);
  CHECK(at0.max_density() == doctest::Approx(1.64872).epsilon(1e-5));
  CHECK(high_piece_left(at0) == doctest::Approx(0.0));
  CHECK(high_piece_right(at0) == doctest::Approx(0.37754).epsilon(1e-4));

  const PiecewiseDensity mid = ogpm_classical(1.0, 0.5);
  CHECK(high_piece_left(mid) == doctest::Approx(0.31123).epsilon(1e-4));
  CHECK(high_piece_right(mid) == doctest::Approx(0.68877).epsilon(1e-4));

  const PiecewiseDensity at03 = ogpm_classical(1.0, 0.3);
  CHECK(high_piece_left(at03) == doctest::Approx(0.11123).epsilon(1e-4));
  CHECK(high_piece_right(at03) == doctest::Approx(0.48877).epsilon(1e-4));
  CHECK(at03.max_density() == doctest::Approx(1.64872).epsilon(1e-5));

  CHECK_THROWS_AS(ogpm_classical(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ogpm_classical(-1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ogpm_classical(1.0, 1.5), std::domain_error);
}

TEST_CASE("circular optimal mechanism closed form") {
  const PiecewiseDensity at0 = ogpm_circular(1.0, 0.0);
  CHECK(at0.max_density() == doctest::Approx(0.26240).epsilon(1e-4));
  CHECK(at0.min_positive_density() == doctest::Approx(0.09653).epsilon(1e-4));
  // the high arc wraps: [1.62*pi, 2*pi) u [0, 0.38*pi)
  REQUIRE(at0.pieces().size() == 3);
  CHECK(at0.pieces().front().density == doctest::Approx(0.26240).epsilon(1e-4));
  CHECK(at0.pieces().back().density == doctest::Approx(0.26240).epsilon(1e-4));
  CHECK(at0.pieces().front().right ==
        doctest::Approx(0.37754 * kPi).epsilon(1e-4));
  CHECK(at0.pieces().back().left ==
        doctest::Approx(kTwoPi - 0.37754 * kPi).epsilon(1e-4));

  const PiecewiseDensity atpi = ogpm_circular(1.0, kPi);
  CHECK(high_piece_left(atpi) ==
        doctest::Approx(kPi - 0.37754 * kPi).epsilon(1e-4));
  CHECK(high_piece_right(atpi) ==
        doctest::Approx(kPi + 0.37754 * kPi).epsilon(1e-4));

  CHECK_THROWS_AS(ogpm_circular(0.0, 0.5), std::invalid_argument);
}

TEST_CASE("circular mechanism is rotation equivariant") {
  for (double eps : {0.7, 2.0}) {
    const PiecewiseDensity a = ogpm_circular(eps, 0.0);
    const PiecewiseDensity b = ogpm_circular(eps, kPi);
    for (int i = 0; i < 400; ++i) {
      const double y = (i + 0.37) / 400.0 * kTwoPi;
      CHECK(a.density_at(y) ==
            doctest::Approx(b.density_at(wrap_angle(y + kPi))).epsilon(1e-10));
    }
  }
}

TEST_CASE("unbiased mechanism hits its mean exactly") {
  const PiecewiseDensity mid = ogpm_unbiased(2.0, 0.5);
  CHECK(high_piece_left(mid) == doctest::Approx(-0.2164).epsilon(1e-3));
  CHECK(high_piece_right(mid) == doctest::Approx(1.2164).epsilon(1e-3));
  CHECK(mid.max_density() == doctest::Approx(0.5102).epsilon(1e-3));
  CHECK(mid.mean() == doctest::Approx(0.5).epsilon(1e-12));

  CHECK(ogpm_unbiased(1.0, 0.0).mean() == doctest::Approx(0.0));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double eps = 0.2 + 7.0 * unif(rng);
    const double x = unif(rng);
    const PiecewiseDensity pdf = ogpm_unbiased(eps, x);
    CHECK(std::abs(pdf.mean() - x) < 1e-9);
  }
}

TEST_CASE("pm structure") {
  const PiecewiseDensity at0 = pm(1.0, 0.0);
  // central interval centered at 0
  CHECK(high_piece_left(at0) == doctest::Approx(-high_piece_right(at0)));
  CHECK(at0.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(at0.max_density() / at0.min_positive_density() ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("sw structure and anchor") {
  // mean squared error at x=0 on the native enlarged domain
  const double mse = expected_error(sw(1.0, 0.0), kL2, 0.0);
  CHECK(mse == doctest::Approx(0.29).epsilon(0.02));
  CHECK(mse == doctest::Approx(0.286525).epsilon(1e-4));

  const PiecewiseDensity mid = sw(1.0, 0.5);
  for (double t : {0.1, 0.3, 0.45})
    CHECK(mid.density_at(0.5 - t) == doctest::Approx(mid.density_at(0.5 + t)));

  const PiecewiseDensity s2 = sw(2.0, 0.3);
  CHECK(s2.max_density() / s2.min_positive_density() ==
        doctest::Approx(std::exp(2.0)).epsilon(1e-12));
}

TEST_CASE("compressed variants map the output domain onto the input") {
  const MechanismSpec& pmc = mechanism("pm-c");
  const PiecewiseDensity c = pmc.pdf(1.0, 0.0);
  CHECK(c.domain().lo == doctest::Approx(-1.0));
  CHECK(c.domain().hi == doctest::Approx(1.0));

  const MechanismSpec& swc = mechanism("sw-c");
  const PiecewiseDensity s = swc.pdf(1.0, 0.25);
  CHECK(s.domain().lo == doctest::Approx(0.0));
  CHECK(s.domain().hi == doctest::Approx(1.0));

  // compression preserves the density ratios
  const PiecewiseDensity base = pm(1.0, 0.3);
  CHECK(c.max_density() / c.min_positive_density() ==
        doctest::Approx(base.max_density() / base.min_positive_density())
            .epsilon(1e-12));
}

TEST_CASE("re-domaining keeps atoms at the mapped endpoints") {
  const Interval target = Interval::classical(0.0, 2.0);
  const MechanismSpec moved = adapted_to(mechanism("t-sw"), target);
  const TruncatedDensity dist = moved.distribution(1.0, 0.6);
  CHECK(dist.domain().lo == doctest::Approx(0.0));
  CHECK(dist.domain().hi == doctest::Approx(2.0));
  CHECK(dist.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  // same truncation probabilities as the native mechanism at x/2
  const TruncatedDensity native = truncate(sw(1.0, 0.3), Interval::unit());
  CHECK(dist.lo_atom() == doctest::Approx(native.lo_atom()).epsilon(1e-12));
  CHECK(dist.hi_atom() == doctest::Approx(native.hi_atom()).epsilon(1e-12));
  for (double u : {0.05, 0.5, 0.95}) {
    const double y = moved.perturb(1.0, 0.6, u);
    CHECK(y >= 0.0);
    CHECK(y <= 2.0);
    CHECK(y == doctest::Approx(2.0 * native.sample(u)).epsilon(1e-12));
  }
}

TEST_CASE("staircase expected error formula") {
  CHECK(staircase_expected_error(1.0) == doctest::Approx(0.9595).epsilon(1e-3));
  CHECK(staircase_expected_error(4.0) == doctest::Approx(0.1379).epsilon(1e-3));
  double prev = staircase_expected_error(0.25);
  for (double e = 0.5; e < 12.0; e += 0.25) {
    const double cur = staircase_expected_error(e);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("truncated laplace atoms and error") {
  for (double eps : {0.5, 1.0, 3.0}) {
    const TruncatedDensity at0 = t_laplace(eps, 0.0);
    CHECK(at0.lo_atom() == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(at0.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  }
  const TruncatedDensity mid = t_laplace(1.0, 0.5);
  CHECK(mid.lo_atom() == doctest::Approx(mid.hi_atom()).epsilon(1e-12));

  // grid representation vs the exact truncated-laplace error:
  //   atoms + int_0^1 |y-x| (eps/2) e^{-eps|y-x|} dy
  auto exact_error = [](double eps, double x) {
    auto seg = [&](double a) {  // int_0^a t*(eps/2)e^{-eps t} dt
      return 0.5 / eps * (1.0 - (1.0 + eps * a) * std::exp(-eps * a));
    };
    const double lo_atom = 0.5 * std::exp(-eps * x);
    const double hi_atom = 0.5 * std::exp(-eps * (1.0 - x));
    return lo_atom * x + hi_atom * (1.0 - x) + seg(x) + seg(1.0 - x);
  };
  for (double x : {0.0, 0.25, 0.5}) {
    const double grid_err = expected_error(t_laplace(1.0, x), kL1, x);
    CHECK(grid_err == doctest::Approx(exact_error(1.0, x)).epsilon(1e-4));
  }

  // the exact inverse-cdf sampler agrees with the grid distribution
  const MechanismSpec& spec = mechanism("t-laplace");
  const TruncatedDensity dist = t_laplace(2.0, 0.3);
  for (double u : {0.01, 0.2, 0.5, 0.77, 0.99}) {
    CHECK(spec.perturb(2.0, 0.3, u) ==
          doctest::Approx(dist.sample(u)).epsilon(1e-3));
  }
}

TEST_CASE("bounded laplace shape") {
  const PiecewiseDensity pdf = b_laplace(1.0, 0.0);
  CHECK(pdf.total_mass() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pdf.max_density() / pdf.min_positive_density() <=
        std::exp(1.0) * (1.0 + 1e-9));

  // the closed form uses the boundary normalizer; they agree at x = 0
  CHECK(expected_error(pdf, kL1, 0.0) ==
        doctest::Approx(b_laplace_expected_error(1.0, 0.0)).epsilon(2e-3));
  CHECK(b_laplace_expected_error(1.0, 0.0) ==
        doctest::Approx(0.4180).epsilon(1e-3));
  for (double x : {0.1, 0.3, 0.45})
    CHECK(b_laplace_expected_error(2.0, x) ==
          doctest::Approx(b_laplace_expected_error(2.0, 1.0 - x))
              .epsilon(1e-12));
}

TEST_CASE("privacy ratio bound across inputs") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::vector<std::string> names = {"ogpm",  "ogpm-circular", "ogpm-u",
                                          "pm",    "sw",            "pm-c",
                                          "sw-c",  "b-laplace"};
  for (const std::string& name : names) {
    const MechanismSpec& spec = mechanism(name);
    for (double eps : {0.4, 0.8, 1.0, 2.0, 4.0, 8.0}) {
      const double bound = std::exp(eps) * (1.0 + 1e-9);
      for (int pair = 0; pair < 20; ++pair) {
        const Interval& in = spec.input_domain;
        const double x1 = in.lo + unif(rng) * in.width();
        const double x2 = in.lo + unif(rng) * in.width();
        const PiecewiseDensity p1 = spec.pdf(eps, x1);
        const PiecewiseDensity p2 = spec.pdf(eps, x2);
        for (int i = 0; i < 200; ++i) {
          const double y =
              p1.domain().lo + (i + 0.519) / 200.0 * p1.domain().width();
          const double ratio = p1.density_at(y) / p2.density_at(y);
          CHECK(ratio <= bound);
        }
      }
    }
  }
}

TEST_CASE("classical optimal density dominates the compressed baselines") {
  for (double eps : {2.0, 4.0}) {
    const MechanismSpec& pmc = mechanism("pm-c");
    const MechanismSpec& swc = mechanism("sw-c");
    const MechanismSpec pmc_u = adapted_to(pmc, Interval::unit());
    for (int i = 0; i <= 200; ++i) {
      const double x = i / 200.0;
      const double og = expected_error(ogpm_classical(eps, x), kL1, x);
      const double pc = expected_error(pmc_u.pdf(eps, x), kL1, x);
      const double sc = expected_error(swc.pdf(eps, x), kL1, x);
      CHECK(og <= pc * (1.0 + 1e-9) + 1e-12);
      CHECK(og <= sc * (1.0 + 1e-9) + 1e-12);
    }
  }
}

TEST_CASE("worst-case error stays below the staircase formula") {
  for (double eps : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double worst =
        std::max(expected_error(ogpm_classical(eps, 0.0), kL1, 0.0),
                 expected_error(ogpm_classical(eps, 1.0), kL1, 1.0));
    CHECK(worst <= staircase_expected_error(eps));
  }
}

TEST_CASE("whole-domain error is maximal at the endpoints") {
  for (double eps : {0.5, 1.0, 2.0, 4.0}) {
    const double end = expected_error(ogpm_classical(eps, 0.0), kL1, 0.0);
    for (int i = 1; i < 100; ++i) {
      const double x = i / 100.0;
      CHECK(expected_error(ogpm_classical(eps, x), kL1, x) <= end + 1e-12);
    }
  }
}

TEST_CASE("closed-form squared error matches the exact integral") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 60; ++i) {
    const double eps = 0.2 + 8.0 * unif(rng);
    const double x = unif(rng);
    CHECK(mse_closed_form_classical(eps, x) ==
          doctest::Approx(expected_error(ogpm_classical(eps, x), kL2, x))
              .epsilon(1e-12));
  }
}
