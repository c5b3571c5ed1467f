// Command-line front end: error curves, worst-case sweeps, numerical solving
// of optimal piecewise mechanisms, piece-count verification, closed-form
// regression, estimation experiments, privacy-budget splitting and raw
// perturbation. All outputs are CSV; runs are deterministic under --seed.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "gpm/analytics.hpp"
#include "gpm/estimation.hpp"
#include "gpm/mechanisms.hpp"
#include "gpm/polar.hpp"
#include "gpm/regression.hpp"
#include "gpm/seeding.hpp"
#include "gpm/solver.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitSolver = 4;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

gpm::ErrorMetric parse_metric(const std::string& name) {
  if (name == "l1") return gpm::ErrorMetric{1};
  if (name == "l2") return gpm::ErrorMetric{2};
  throw CLI::ValidationError("--metric", "expected l1 or l2");
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// --out defaults to stdout
struct Output {
  std::ofstream file;
  std::ostream& stream(const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot write to " + path);
    return file;
  }
};

gpm::Interval parse_domain(const std::string& name) {
  if (name.empty() || name == "native") return gpm::Interval{};  // sentinel
  if (name == "unit") return gpm::Interval::unit();
  if (name == "circle") return gpm::Interval::circle();
  const auto colon = name.find(':');
  if (colon != std::string::npos) {
    return gpm::Interval::classical(std::stod(name.substr(0, colon)),
                                    std::stod(name.substr(colon + 1)));
  }
  throw CLI::ValidationError("--domain", "expected unit, circle, lo:hi or native");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal piecewise mechanisms for bounded numerical data "
               "under local differential privacy"};
  app.require_subcommand(1);

  // ---- curves ----
  auto* curves = app.add_subcommand("curves", "whole-domain error curves");
  std::string c_mechs = "ogpm,pm-c,sw-c";
  std::vector<double> c_eps{2.0};
  std::string c_metric = "l1", c_out, c_domain = "native";
  int c_grid = 1001;
  curves->add_option("--mechanisms", c_mechs, "comma-separated mechanism names");
  curves->add_option("--epsilon", c_eps, "privacy parameters")->delimiter(',');
  curves->add_option("--metric", c_metric, "l1 or l2");
  curves->add_option("--grid", c_grid, "grid points per curve");
  curves->add_option("--domain", c_domain, "unit, circle, lo:hi or native");
  curves->add_option("--out", c_out, "output CSV path (default stdout)");

  // ---- worst-case ----
  auto* worst = app.add_subcommand("worst-case", "worst-case error sweeps");
  std::string w_mechs = "ogpm,pm-c,sw-c";
  std::vector<double> w_eps{0.5, 1, 2, 4, 8};
  std::string w_metric = "l1", w_out, w_domain = "native";
  worst->add_option("--mechanisms", w_mechs, "comma-separated mechanism names");
  worst->add_option("--epsilon", w_eps, "privacy parameters")->delimiter(',');
  worst->add_option("--metric", w_metric, "l1 or l2");
  worst->add_option("--domain", w_domain, "unit, circle, lo:hi or native");
  worst->add_option("--out", w_out, "output CSV path (default stdout)");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "solve the optimal m-piece density");
  int s_m = 3;
  double s_eps = 1.0;
  std::string s_metric = "l1", s_out;
  double s_x = -1.0;
  bool s_circular = false;
  int s_starts = 48;
  std::uint64_t s_seed = 0x9e3779b97f4a7c15ULL;
  solve->add_option("--m", s_m, "piece count");
  solve->add_option("--epsilon", s_eps, "privacy parameter")->required();
  solve->add_option("--metric", s_metric, "l1 or l2");
  solve->add_option("--x", s_x, "target input (default: worst case)");
  solve->add_flag("--circular", s_circular, "solve on [0, 2*pi)");
  solve->add_option("--starts", s_starts, "multi-start count");
  solve->add_option("--seed", s_seed, "search seed");
  solve->add_option("--out", s_out, "output CSV path (default stdout)");

  // ---- verify-m ----
  auto* verify = app.add_subcommand("verify-m",
                                    "check that m pieces are enough");
  int v_m = 3, v_samples = 100;
  std::string v_metric = "l1";
  bool v_circular = false;
  std::uint64_t v_seed = 7;
  double v_eps_lo = 0.05, v_eps_hi = 10.0;
  std::string v_out;
  verify->add_option("--m", v_m, "piece count to verify");
  verify->add_option("--samples", v_samples, "Monte Carlo sample count");
  verify->add_option("--metric", v_metric, "l1 or l2");
  verify->add_flag("--circular", v_circular, "verify on [0, 2*pi)");
  verify->add_option("--seed", v_seed, "sampling seed");
  verify->add_option("--eps-min", v_eps_lo, "epsilon range lower end");
  verify->add_option("--eps-max", v_eps_hi, "epsilon range upper end");
  verify->add_option("--out", v_out, "report path (default stdout)");

  // ---- fit ----
  auto* fit = app.add_subcommand("fit", "regress solved values against epsilon");
  std::string f_feature = "exp-half", f_input, f_out, f_metric = "l1";
  int f_samples = 50;
  std::uint64_t f_seed = 11;
  double f_eps_lo = 0.1, f_eps_hi = 8.0;
  fit->add_option("--feature", f_feature, "exp-half, affine or power-law");
  fit->add_option("--input", f_input,
                  "CSV of epsilon,value pairs (default: solve fresh samples)");
  fit->add_option("--samples", f_samples, "solved samples when no input");
  fit->add_option("--metric", f_metric, "metric for fresh solves");
  fit->add_option("--seed", f_seed, "sampling seed");
  fit->add_option("--eps-min", f_eps_lo, "epsilon range lower end");
  fit->add_option("--eps-max", f_eps_hi, "epsilon range upper end");
  fit->add_option("--out", f_out, "report path (default stdout)");

  // ---- estimate ----
  auto* estimate = app.add_subcommand("estimate",
                                      "distribution/mean estimation sweep");
  std::string e_config, e_out;
  std::uint64_t e_seed = 0;
  bool e_seed_set = false;
  estimate->add_option("--config", e_config, "key=value experiment file")
      ->required();
  estimate->add_option("--seed", e_seed, "override the config seed")
      ->trigger_on_parse()
      ->each([&](const std::string&) { e_seed_set = true; });
  estimate->add_option("--out", e_out, "output CSV path (default stdout)");

  // ---- polar-split ----
  auto* polar = app.add_subcommand("polar-split",
                                   "optimal privacy budget split for polar data");
  double p_total = 1.0 + gpm::kTwoPi, p_d = 1.0;
  std::string p_out;
  int p_curve = 101;
  polar->add_option("--epsilon-total", p_total, "total privacy budget")
      ->required();
  polar->add_option("--d", p_d, "radius domain upper end");
  polar->add_option("--curve-points", p_curve, "points in the objective curve");
  polar->add_option("--out", p_out, "curve CSV path (default stdout)");

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "perturb a list of values");
  std::string m_name = "ogpm", m_values, m_out;
  double m_eps = 1.0;
  std::uint64_t m_seed = 1;
  sample->add_option("--mechanism", m_name, "registry name");
  sample->add_option("--epsilon", m_eps, "privacy parameter")->required();
  sample->add_option("--values", m_values, "comma-separated inputs")->required();
  sample->add_option("--seed", m_seed, "sampling seed");
  sample->add_option("--out", m_out, "output CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    Output out;

    if (*curves || *worst) {
      const bool is_curves = static_cast<bool>(*curves);
      const std::string mechs = is_curves ? c_mechs : w_mechs;
      const std::vector<double> epss = is_curves ? c_eps : w_eps;
      const gpm::ErrorMetric metric =
          parse_metric(is_curves ? c_metric : w_metric);
      const gpm::Interval domain =
          parse_domain(is_curves ? c_domain : w_domain);
      const bool native = domain == gpm::Interval{};

      std::vector<gpm::MechanismSpec> specs;
      for (const std::string& name : split_names(mechs)) {
        const gpm::MechanismSpec& spec = gpm::mechanism(name);
        specs.push_back(native ? spec : gpm::adapted_to(spec, domain));
      }
      std::ostream& os = out.stream(is_curves ? c_out : w_out);
      if (is_curves) {
        std::vector<gpm::ErrorCurve> all;
        for (const auto& spec : specs)
          for (double e : epss)
            all.push_back(gpm::whole_domain_error(spec, e, metric, c_grid));
        gpm::write_csv(os, all);
      } else {
        os << "mechanism,epsilon,metric,err\n";
        for (const auto& spec : specs)
          for (double e : epss)
            os << spec.name << ',' << fmt(e) << ',' << gpm::metric_name(metric)
               << ',' << fmt(gpm::worst_case_error(spec, e, metric)) << '\n';
      }
    } else if (*solve) {
      gpm::SolverProblem problem;
      problem.domain = s_circular ? gpm::Interval::circle() : gpm::Interval::unit();
      problem.metric = parse_metric(s_metric);
      problem.pieces = s_m;
      problem.epsilon = s_eps;
      if (s_x >= 0.0) problem.target_x = s_x;
      gpm::SolverOptions options;
      options.starts = s_starts;
      options.seed = s_seed;
      const gpm::SolverSolution sol = gpm::solve_probabilities(problem, options);
      std::ostream& os = out.stream(s_out);
      os << "piece_index,density,left,right\n";
      const auto& pieces = sol.pdf.pieces();
      for (std::size_t i = 0; i < pieces.size(); ++i)
        os << i << ',' << fmt(pieces[i].density) << ',' << fmt(pieces[i].left)
           << ',' << fmt(pieces[i].right) << '\n';
      std::cerr << "objective=" << fmt(sol.objective)
                << " converged=" << (sol.converged ? "true" : "false")
                << " evaluations=" << sol.iterations << '\n';
      if (!sol.converged) return kExitSolver;
    } else if (*verify) {
      const gpm::Interval domain =
          v_circular ? gpm::Interval::circle() : gpm::Interval::unit();
      const gpm::OptimalPieceReport report = gpm::verify_optimal_m(
          domain, parse_metric(v_metric), v_m, v_samples,
          {v_eps_lo, v_eps_hi}, v_seed);
      std::ostream& os = out.stream(v_out);
      os << (report.all_equal ? "PASS" : "FAIL") << ": " << v_m << " vs "
         << v_m + 1 << " pieces on " << report.samples << " samples ("
         << report.flagged << " flagged non-converged)\n";
      for (const auto& f : report.failures)
        os << "mismatch at epsilon=" << fmt(f.epsilon) << " x=" << fmt(f.x)
           << ": " << f.what << '\n';
      if (!report.all_equal) return kExitSolver;
    } else if (*fit) {
      std::vector<std::pair<double, double>> samples;
      if (!f_input.empty()) {
        std::ifstream in(f_input);
        if (!in) throw std::runtime_error("cannot open " + f_input);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty()) continue;
          std::stringstream ss(line);
          std::string a, b;
          if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
          try {
            samples.emplace_back(std::stod(a), std::stod(b));
          } catch (const std::exception&) {
            continue;  // header row
          }
        }
      } else {
        // solve the worst-case problem on fresh random epsilons and fit the
        // recovered high density
        std::mt19937_64 rng(f_seed);
        std::uniform_real_distribution<double> unif(f_eps_lo, f_eps_hi);
        for (int i = 0; i < f_samples; ++i) {
          gpm::SolverProblem problem;
          problem.metric = parse_metric(f_metric);
          problem.epsilon = unif(rng);
          const gpm::SolverSolution sol = gpm::solve_probabilities(problem);
          if (!sol.converged) return kExitSolver;
          samples.emplace_back(problem.epsilon, sol.pdf.max_density());
        }
      }
      gpm::FitFeature feature;
      if (f_feature == "exp-half") feature = gpm::FitFeature::ExpHalf;
      else if (f_feature == "affine") feature = gpm::FitFeature::Affine;
      else if (f_feature == "power-law") feature = gpm::FitFeature::PowerLaw;
      else throw CLI::ValidationError("--feature", "unknown feature " + f_feature);
      const gpm::FitResult res = gpm::fit_closed_form(samples, feature);
      std::ostream& os = out.stream(f_out);
      os << "feature,beta1,beta2,max_residual,ok\n"
         << f_feature << ',' << fmt(res.beta[0]) << ',' << fmt(res.beta[1])
         << ',' << fmt(res.max_residual) << ',' << (res.ok ? 1 : 0) << '\n';
      if (!res.ok) return kExitSolver;
    } else if (*estimate) {
      gpm::ExperimentConfig config = gpm::ExperimentConfig::load(e_config);
      if (e_seed_set) config.seed = e_seed;
      const std::vector<gpm::EstimationReport> reports =
          gpm::run_experiment(config);
      gpm::write_csv(out.stream(e_out), reports);
    } else if (*polar) {
      const gpm::BudgetSplit split = gpm::optimal_budget_split(p_total, p_d);
      std::cerr << "epsilon1=" << fmt(split.eps_radius)
                << " epsilon2=" << fmt(split.eps_angle)
                << " total=" << fmt(split.total) << '\n';
      std::ostream& os = out.stream(p_out);
      os << "epsilon1,total_error\n";
      for (int i = 0; i < p_curve; ++i) {
        const double e1 = std::min(p_total, p_total * i / (p_curve - 1));
        os << fmt(e1) << ','
           << fmt(gpm::polar_split_objective(e1, p_total, p_d)) << '\n';
      }
    } else if (*sample) {
      const gpm::MechanismSpec& spec = gpm::mechanism(m_name);
      if (!spec.sampleable())
        throw std::invalid_argument(m_name + " cannot be sampled");
      std::mt19937_64 rng(m_seed);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      std::ostream& os = out.stream(m_out);
      os << "input,output\n";
      for (const std::string& tok : split_names(m_values)) {
        const double x = std::stod(tok);
        os << fmt(x) << ',' << fmt(spec.perturb(m_eps, x, unif(rng))) << '\n';
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return 0;
}
