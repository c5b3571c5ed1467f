#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "gpm/estimation.hpp"
#include "gpm/seeding.hpp"

using namespace gpm;

namespace {
const double kPi = kTwoPi / 2.0;

// pass-through mechanism used to check estimator consistency
MechanismSpec identity_spec(const Interval& domain) {
  MechanismSpec spec;
  spec.name = "identity";
  spec.input_domain = domain;
  spec.output_domain = [domain](double) { return domain; };
  spec.inverse_cdf = [](double, double x, double) { return x; };
  spec.distribution = [domain](double, double x) {
    // point mass approximated by a narrow uniform sliver; unused by perturb
    const double w = domain.width() * 1e-9;
    const double l = std::min(x, domain.hi - w);
    std::vector<Piece> pieces;
    if (l > domain.lo) pieces.push_back(Piece{0.0, domain.lo, l});
    pieces.push_back(Piece{1.0 / w, l, l + w});
    if (l + w < domain.hi) pieces.push_back(Piece{0.0, l + w, domain.hi});
    return TruncatedDensity(std::move(pieces), domain, 0.0, 0.0);
  };
  return spec;
}

std::string write_temp_csv(const std::string& name, const std::string& body) {
  const std::string path = std::string("/tmp/") + name;
  std::ofstream out(path);
  out << body;
  return path;
}
}  // namespace

TEST_CASE("csv loading and normalization") {
  const std::string path = write_temp_csv(
      "gpm_est_a.csv", "time,reading,label\n1,2,a\n2,4,b\n3,6,c\n");
  const Dataset unit = load_csv_dataset(path, "reading", Normalization::ToUnit);
  REQUIRE(unit.values.size() == 3);
  CHECK(unit.values[0] == doctest::Approx(0.0));
  CHECK(unit.values[1] == doctest::Approx(0.5));
  CHECK(unit.values[2] < 1.0);
  CHECK(unit.values[2] == doctest::Approx(1.0).epsilon(1e-12));

  const std::string rad = write_temp_csv("gpm_est_b.csv", "a\n-1.5707963267948966\n");
  const Dataset circ = load_csv_dataset(rad, "a", Normalization::ToCircle);
  CHECK(circ.values[0] == doctest::Approx(1.5 * kPi));
  CHECK(circ.domain.circular());

  // column selected by index
  const Dataset by_index = load_csv_dataset(path, "1", Normalization::ToUnit);
  CHECK(by_index.values.size() == 3);

  CHECK_THROWS_WITH_AS(load_csv_dataset(path, "missing", Normalization::None),
                       doctest::Contains("missing"), std::runtime_error);
  const std::string bad = write_temp_csv("gpm_est_c.csv", "v\n1\nnot_a_number\n");
  CHECK_THROWS_AS(load_csv_dataset(bad, "v", Normalization::None),
                  std::runtime_error);
  const std::string empty = write_temp_csv("gpm_est_d.csv", "v\n");
  CHECK_THROWS_AS(load_csv_dataset(empty, "v", Normalization::None),
                  std::runtime_error);
}

TEST_CASE("resultant-vector mean of angles") {
  std::vector<double> same(5, kPi / 2.0);
  CHECK(circular_mean(same).value() == doctest::Approx(kPi / 2.0));

  std::vector<double> wrap = {0.0, kTwoPi - 0.1};
  CHECK(circular_mean(wrap).value() ==
        doctest::Approx(kTwoPi - 0.05).epsilon(1e-9));

  std::vector<double> antipodal = {0.0, kPi};
  CHECK_FALSE(circular_mean(antipodal).has_value());

  // rotation equivariance
  std::vector<double> data = {0.3, 1.1, 2.9, 4.0, 5.5};
  const double base = circular_mean(data).value();
  for (double delta : {0.7, 3.0}) {
    std::vector<double> rotated;
    for (double a : data) rotated.push_back(wrap_angle(a + delta));
    CHECK(circular_mean(rotated).value() ==
          doctest::Approx(wrap_angle(base + delta)).epsilon(1e-9));
  }
}

TEST_CASE("distribution estimation is consistent under the identity") {
  Dataset data = synthetic_dataset("uniform", 2000, Interval::unit(), 3);
  const MechanismSpec id = identity_spec(Interval::unit());
  for (int k : {1, 10, 50}) {
    const DistributionEstimate est = estimate_distribution(data, id, 1.0, k, 9);
    CHECK(est.l1 == doctest::Approx(0.0));
  }

  Dataset single{{0.5}, Interval::unit(), "single"};
  const DistributionEstimate est = estimate_distribution(single, id, 1.0, 2, 9);
  CHECK(est.truth[0] == doctest::Approx(0.0));
  CHECK(est.truth[1] == doctest::Approx(1.0));

  Dataset empty{{}, Interval::unit(), "empty"};
  CHECK_THROWS_AS(estimate_distribution(empty, id, 1.0, 2, 9),
                  std::invalid_argument);
}

TEST_CASE("mean estimation under the identity is exact") {
  Dataset data{{kPi / 2.0, kPi / 2.0, kPi / 2.0}, Interval::circle(), "c"};
  const MeanEstimate est =
      estimate_mean(data, identity_spec(Interval::circle()), 1.0, 4);
  CHECK_FALSE(est.degenerate);
  CHECK(est.mu == doctest::Approx(kPi / 2.0));
  CHECK(est.abs_err == doctest::Approx(0.0));
}

TEST_CASE("distribution error shrinks as the budget grows") {
  Dataset data = synthetic_dataset("uniform", 3000, Interval::unit(), 21);
  const MechanismSpec& spec = mechanism("ogpm");
  double lo_eps = 0.0, hi_eps = 0.0;
  for (int t = 0; t < 20; ++t) {
    lo_eps += estimate_distribution(data, spec, 1.0, 50, trial_seed(5, t)).l1;
    hi_eps += estimate_distribution(data, spec, 8.0, 50, trial_seed(6, t)).l1;
  }
  CHECK(hi_eps < lo_eps);
}

TEST_CASE("aggregate unbiasedness of the mean-estimation mechanism") {
  const int n = 100000;
  Dataset data{std::vector<double>(n, 0.3), Interval::unit(), "point"};
  const MechanismSpec& spec = mechanism("ogpm-u");
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = spec.perturb(1.0, 0.3, unif(rng));
    sum += y;
    sumsq += y * y;
  }
  const double mean = sum / n;
  const double sd = std::sqrt((sumsq - n * mean * mean) / (n - 1));
  CHECK(std::abs(mean - 0.3) < 4.0 * sd / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("unbiased mechanism wins on concentrated data") {
  // data concentrated near the low end favors the enlarged-domain design
  std::mt19937_64 gen(99);
  std::normal_distribution<double> noise(0.1, 0.01);
  std::vector<double> values;
  for (int i = 0; i < 20000; ++i)
    values.push_back(std::clamp(noise(gen), 0.0, 0.999999));
  Dataset data{std::move(values), Interval::unit(), "concentrated"};

  double err_u = 0.0, err_b = 0.0;
  for (int t = 0; t < 60; ++t) {
    err_u += estimate_mean(data, mechanism("ogpm-u"), 1.0, trial_seed(3, t))
                 .abs_err;
    err_b += estimate_mean(data, mechanism("ogpm"), 1.0, trial_seed(3, t))
                 .abs_err;
  }
  CHECK(err_u < err_b);
}

TEST_CASE("circular mean estimation favors the wrap-aware mechanism") {
  const Dataset data = synthetic_dataset("vonmises", 5000, Interval::circle(), 6);
  double err_og = 0.0, err_sw = 0.0;
  for (int t = 0; t < 30; ++t) {
    err_og +=
        estimate_mean(data, mechanism("ogpm-circular"), 4.0, trial_seed(8, t))
            .abs_err;
    err_sw += estimate_mean(data, mechanism("sw-c"), 4.0, trial_seed(8, t))
                  .abs_err;
  }
  CHECK(err_og < err_sw);
}

TEST_CASE("experiment runs are deterministic and complete") {
  const std::string cfg_text =
      "mechanisms=ogpm,sw-c\n"
      "epsilons=1,2,4\n"
      "tasks=distribution,mean\n"
      "trials=5\n"
      "bins=20\n"
      "seed=42\n"
      "synthetic=uniform\n"
      "n=500\n"
      "domain=unit\n";
  std::istringstream a(cfg_text), b(cfg_text);
  const ExperimentConfig cfg ={ExperimentConfig::parse(a)};
  const std::vector<EstimationReport> r1 = run_experiment(cfg);
  const std::vector<EstimationReport> r2 =
      run_experiment(ExperimentConfig::parse(b));
  REQUIRE(r1.size() == 12);  // 2 mechanisms x 3 epsilons x 2 tasks
  REQUIRE(r2.size() == r1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) {
    CHECK(r1[i].error_mean == r2[i].error_mean);
    CHECK(r1[i].error_std == r2[i].error_std);
  }

  std::ostringstream os;
  write_csv(os, r1);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "mechanism,epsilon,task,error_mean,error_std,trials,seed");
}

TEST_CASE("config validation") {
  std::istringstream missing("epsilons=1\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(missing), std::invalid_argument);
  std::istringstream unknown("mechanisms=ogpm\nepsilons=1\nwat=1\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(unknown), std::invalid_argument);
  std::istringstream negative("mechanisms=ogpm\nepsilons=-1\n");
  CHECK_THROWS_AS(ExperimentConfig::parse(negative), std::invalid_argument);

  std::istringstream bad_name("mechanisms=nosuch\nepsilons=1\nn=10\ntrials=1\n");
  const ExperimentConfig cfg = ExperimentConfig::parse(bad_name);
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("synthetic generators respect their domains") {
  const Dataset g = synthetic_dataset("gaussian", 5000, Interval::unit(), 11);
  for (double v : g.values) CHECK((v >= 0.0 && v < 1.0));
  const Dataset vm = synthetic_dataset("vonmises", 5000, Interval::circle(), 12);
  for (double v : vm.values) CHECK((v >= 0.0 && v < kTwoPi));
  CHECK_THROWS_AS(synthetic_dataset("vonmises", 10, Interval::unit(), 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(synthetic_dataset("nope", 10, Interval::unit(), 1),
                  std::invalid_argument);
}
