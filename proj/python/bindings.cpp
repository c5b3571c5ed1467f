// Python bindings for the piecewise LDP mechanism library: the mechanism
// catalog, exact error analytics, the numerical solver and the estimation
// harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "gpm/analytics.hpp"
#include "gpm/estimation.hpp"
#include "gpm/mechanisms.hpp"
#include "gpm/polar.hpp"
#include "gpm/regression.hpp"
#include "gpm/seeding.hpp"
#include "gpm/solver.hpp"

namespace py = pybind11;

namespace {

gpm::ErrorMetric metric_from(const std::string& name) {
  if (name == "l1") return gpm::ErrorMetric{1};
  if (name == "l2") return gpm::ErrorMetric{2};
  throw std::invalid_argument("metric must be 'l1' or 'l2'");
}

gpm::Interval domain_from(const std::string& name) {
  if (name == "unit") return gpm::Interval::unit();
  if (name == "circle") return gpm::Interval::circle();
  throw std::invalid_argument("domain must be 'unit' or 'circle'");
}

std::vector<std::tuple<double, double, double>> piece_list(
    const gpm::PiecewiseDensity& pdf) {
  std::vector<std::tuple<double, double, double>> out;
  for (const gpm::Piece& p : pdf.pieces())
    out.emplace_back(p.density, p.left, p.right);
  return out;
}

py::dict solution_dict(const gpm::SolverSolution& sol) {
  py::dict d;
  d["pieces"] = piece_list(sol.pdf);
  d["objective"] = sol.objective;
  d["converged"] = sol.converged;
  d["iterations"] = sol.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(gpmldp, m) {
  m.doc() = "Optimal piecewise mechanisms for bounded numerical data under "
            "local differential privacy";

  py::class_<gpm::Interval>(m, "Interval")
      .def(py::init(&gpm::Interval::classical), py::arg("lo"), py::arg("hi"))
      .def_static("unit", &gpm::Interval::unit)
      .def_static("circle", &gpm::Interval::circle)
      .def_readonly("lo", &gpm::Interval::lo)
      .def_readonly("hi", &gpm::Interval::hi)
      .def_property_readonly("circular", &gpm::Interval::circular)
      .def("width", &gpm::Interval::width)
      .def("contains", &gpm::Interval::contains)
      .def("__repr__", [](const gpm::Interval& iv) {
        std::ostringstream os;
        os << "Interval(" << iv.lo << ", " << iv.hi
           << (iv.circular() ? ", circular)" : ")");
        return os.str();
      });

  py::class_<gpm::PiecewiseDensity>(m, "PiecewiseDensity")
      .def(py::init([](const std::vector<std::tuple<double, double, double>>&
                           pieces,
                       const gpm::Interval& domain,
                       std::optional<double> epsilon) {
             std::vector<gpm::Piece> ps;
             for (const auto& [d, l, r] : pieces)
               ps.push_back(gpm::Piece{d, l, r});
             return gpm::PiecewiseDensity(std::move(ps), domain, epsilon);
           }),
           py::arg("pieces"), py::arg("domain"),
           py::arg("epsilon") = std::nullopt)
      .def_property_readonly("pieces", &piece_list)
      .def_property_readonly("domain", &gpm::PiecewiseDensity::domain)
      .def_property_readonly("epsilon", &gpm::PiecewiseDensity::epsilon)
      .def("density_at", &gpm::PiecewiseDensity::density_at)
      .def("cdf", &gpm::PiecewiseDensity::cdf)
      .def("sample", &gpm::PiecewiseDensity::sample)
      .def("mean", &gpm::PiecewiseDensity::mean)
      .def("max_density", &gpm::PiecewiseDensity::max_density)
      .def("expected_error",
           [](const gpm::PiecewiseDensity& pdf, const std::string& metric,
              double x) {
             return gpm::expected_error(pdf, metric_from(metric), x);
           },
           py::arg("metric"), py::arg("x"));

  // mechanism catalog -------------------------------------------------------
  m.def("mechanism_names", &gpm::mechanism_names);
  m.def("make_density",
        [](const std::string& name, double eps, double x) {
          const gpm::MechanismSpec& spec = gpm::mechanism(name);
          if (!spec.pdf)
            throw std::invalid_argument(name + " has no pure density");
          return spec.pdf(eps, x);
        },
        py::arg("mechanism"), py::arg("epsilon"), py::arg("x"),
        "Per-input output density of a registered mechanism");
  m.def("perturb",
        [](const std::string& name, double eps,
           const std::vector<double>& values, std::uint64_t seed) {
          const gpm::MechanismSpec& spec = gpm::mechanism(name);
          std::mt19937_64 rng(seed);
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          std::vector<double> out;
          out.reserve(values.size());
          for (double x : values) out.push_back(spec.perturb(eps, x, unif(rng)));
          return out;
        },
        py::arg("mechanism"), py::arg("epsilon"), py::arg("values"),
        py::arg("seed"), "Perturb a list of raw values");
  m.def("staircase_expected_error", &gpm::staircase_expected_error,
        py::arg("epsilon"));
  m.def("b_laplace_expected_error", &gpm::b_laplace_expected_error,
        py::arg("epsilon"), py::arg("x"));

  // analytics ---------------------------------------------------------------
  m.def("whole_domain_error",
        [](const std::string& name, double eps, const std::string& metric,
           int grid) {
          return gpm::whole_domain_error(gpm::mechanism(name), eps,
                                         metric_from(metric), grid)
              .points;
        },
        py::arg("mechanism"), py::arg("epsilon"), py::arg("metric") = "l1",
        py::arg("grid") = 1001);
  m.def("worst_case_error",
        [](const std::string& name, double eps, const std::string& metric) {
          return gpm::worst_case_error(gpm::mechanism(name), eps,
                                       metric_from(metric));
        },
        py::arg("mechanism"), py::arg("epsilon"), py::arg("metric") = "l1");
  m.def("classical_mse", &gpm::mse_closed_form_classical, py::arg("epsilon"),
        py::arg("x"));
  m.def("circular_mse", &gpm::circular_mse_closed_form, py::arg("epsilon"));
  m.def("point_targeted",
        [](double eps, double x0, const std::string& metric) {
          const gpm::PointDesign d =
              gpm::point_targeted_probability(eps, x0, metric_from(metric));
          return std::make_pair(d.density, d.error);
        },
        py::arg("epsilon"), py::arg("x0"), py::arg("metric") = "l1",
        "Central density and error of the design minimizing the error at x0");

  // solver ------------------------------------------------------------------
  m.def("solve",
        [](int pieces, double eps, const std::string& metric, bool circular,
           std::optional<double> x, int starts, std::uint64_t seed) {
          gpm::SolverProblem problem;
          problem.domain =
              circular ? gpm::Interval::circle() : gpm::Interval::unit();
          problem.metric = metric_from(metric);
          problem.pieces = pieces;
          problem.epsilon = eps;
          problem.target_x = x;
          gpm::SolverOptions options;
          options.starts = starts;
          options.seed = seed;
          return solution_dict(gpm::solve_probabilities(problem, options));
        },
        py::arg("pieces"), py::arg("epsilon"), py::arg("metric") = "l1",
        py::arg("circular") = false, py::arg("x") = std::nullopt,
        py::arg("starts") = 48, py::arg("seed") = 0x9e3779b97f4a7c15ULL);
  m.def("merge_pieces", &gpm::merge_pieces, py::arg("density"));
  m.def("verify_optimal_m",
        [](int m_, int samples, const std::string& metric, bool circular,
           std::uint64_t seed, double eps_min, double eps_max) {
          const gpm::OptimalPieceReport rep = gpm::verify_optimal_m(
              circular ? gpm::Interval::circle() : gpm::Interval::unit(),
              metric_from(metric), m_, samples, {eps_min, eps_max}, seed);
          py::dict d;
          d["all_equal"] = rep.all_equal;
          d["samples"] = rep.samples;
          d["flagged"] = rep.flagged;
          std::vector<std::tuple<double, double, std::string>> fails;
          for (const auto& f : rep.failures)
            fails.emplace_back(f.epsilon, f.x, f.what);
          d["failures"] = fails;
          return d;
        },
        py::arg("m"), py::arg("samples") = 100, py::arg("metric") = "l1",
        py::arg("circular") = false, py::arg("seed") = 7,
        py::arg("eps_min") = 0.05, py::arg("eps_max") = 10.0);
  m.def("fit_closed_form",
        [](const std::vector<std::pair<double, double>>& samples,
           const std::string& feature) {
          gpm::FitFeature f;
          if (feature == "exp-half") f = gpm::FitFeature::ExpHalf;
          else if (feature == "affine") f = gpm::FitFeature::Affine;
          else if (feature == "power-law") f = gpm::FitFeature::PowerLaw;
          else throw std::invalid_argument("unknown feature: " + feature);
          const gpm::FitResult res = gpm::fit_closed_form(samples, f);
          py::dict d;
          d["beta"] = res.beta;
          d["max_residual"] = res.max_residual;
          d["ok"] = res.ok;
          return d;
        },
        py::arg("samples"), py::arg("feature") = "exp-half");

  // estimation --------------------------------------------------------------
  m.def("estimate_distribution",
        [](const std::vector<double>& values, const std::string& domain,
           const std::string& name, double eps, int bins, std::uint64_t seed) {
          gpm::Dataset data{values, domain_from(domain), "python"};
          const gpm::DistributionEstimate est = gpm::estimate_distribution(
              data, gpm::mechanism(name), eps, bins, seed);
          py::dict d;
          d["l1"] = est.l1;
          d["estimated"] = est.estimated;
          d["truth"] = est.truth;
          return d;
        },
        py::arg("values"), py::arg("domain"), py::arg("mechanism"),
        py::arg("epsilon"), py::arg("bins") = 50, py::arg("seed") = 1);
  m.def("estimate_mean",
        [](const std::vector<double>& values, const std::string& domain,
           const std::string& name, double eps, std::uint64_t seed) {
          gpm::Dataset data{values, domain_from(domain), "python"};
          const gpm::MeanEstimate est =
              gpm::estimate_mean(data, gpm::mechanism(name), eps, seed);
          py::dict d;
          d["mu_hat"] = est.mu_hat;
          d["mu"] = est.mu;
          d["abs_err"] = est.abs_err;
          d["degenerate"] = est.degenerate;
          return d;
        },
        py::arg("values"), py::arg("domain"), py::arg("mechanism"),
        py::arg("epsilon"), py::arg("seed") = 1);
  m.def("circular_mean",
        [](const std::vector<double>& angles) {
          return gpm::circular_mean(angles);
        },
        py::arg("angles"));

  // polar -------------------------------------------------------------------
  m.def("optimal_budget_split",
        [](double eps_total, double d) {
          const gpm::BudgetSplit s = gpm::optimal_budget_split(eps_total, d);
          return std::make_pair(s.eps_radius, s.eps_angle);
        },
        py::arg("eps_total"), py::arg("d") = 1.0);
  m.def("polar_split_objective", &gpm::polar_split_objective, py::arg("e1"),
        py::arg("eps_total"), py::arg("d") = 1.0);
  m.def("perturb_polar",
        [](double radius, double angle, double e1, double e2, double d,
           std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          const gpm::PolarPoint out = gpm::perturb_polar(
              gpm::PolarPoint{radius, angle},
              gpm::BudgetSplit{e1, e2, e1 + e2}, d, rng);
          return std::make_pair(out.radius, out.angle);
        },
        py::arg("radius"), py::arg("angle"), py::arg("eps_radius"),
        py::arg("eps_angle"), py::arg("d") = 1.0, py::arg("seed") = 1);
}
