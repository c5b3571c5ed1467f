#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpm/mechanisms.hpp"

namespace gpm {

struct Dataset {
  std::vector<double> values;
  Interval domain = Interval::unit();
  std::string name;
};

enum class Normalization { ToUnit, ToCircle, None };

// Loads one numeric column (by header name, or 0-based index when the name
// is numeric) from a CSV file. ToUnit min-max normalizes into [0,1) with the
// maximum clamped just below 1; ToCircle wraps radians into [0, 2*pi).
Dataset load_csv_dataset(const std::string& path, const std::string& column,
                         Normalization normalize);

// Seeded generators used by the experiment harness and tests:
// "uniform", "gaussian" (clipped normal) or "vonmises" (two-component
// wrapped mixture, circular domains).
Dataset synthetic_dataset(const std::string& kind, int n,
                          const Interval& domain, std::uint64_t seed);

// Resultant-vector mean of angles; empty when the resultant length is
// below 1e-12 (direction undefined).
std::optional<double> circular_mean(std::span<const double> angles);

struct DistributionEstimate {
  std::vector<double> estimated;  // normalized histogram from perturbed data
  std::vector<double> truth;      // normalized histogram from raw data
  double l1{0.0};                 // sum of absolute bin differences
};

// Perturbs each value once, bins outputs over the data domain (out-of-domain
// outputs from enlarged-domain mechanisms clamp into the edge bins).
DistributionEstimate estimate_distribution(const Dataset& data,
                                           const MechanismSpec& spec,
                                           double eps, int bins,
                                           std::uint64_t seed);

struct MeanEstimate {
  double mu_hat{0.0};
  double mu{0.0};
  double abs_err{0.0};
  bool degenerate{false};  // circular resultant vanished
};

// Arithmetic means on classical domains, resultant-vector means on circular
// ones; the error is the distance under the domain's topology.
MeanEstimate estimate_mean(const Dataset& data, const MechanismSpec& spec,
                           double eps, std::uint64_t seed);

enum class Task { Distribution, Mean };

struct EstimationReport {
  std::string mechanism;
  double epsilon{0.0};
  Task task{Task::Distribution};
  double error_mean{0.0};
  double error_std{0.0};
  int trials{0};
  std::uint64_t seed{0};
};

// Plain-text key=value experiment description. Recognized keys:
//   mechanisms=ogpm,sw-c        epsilons=1,2,4      tasks=distribution,mean
//   trials=100                  bins=50             seed=1
//   synthetic=uniform|gaussian|vonmises             n=10000
//   domain=unit|circle
//   dataset=path.csv            column=name         normalize=unit|circle|none
struct ExperimentConfig {
  std::vector<std::string> mechanisms;
  std::vector<double> epsilons;
  std::vector<Task> tasks{Task::Distribution, Task::Mean};
  int trials{100};
  int bins{50};
  std::uint64_t seed{1};
  // dataset source: either a CSV path or a synthetic spec
  std::string dataset_path;
  std::string column;
  Normalization normalize{Normalization::None};
  std::string synthetic{"uniform"};
  int n{10000};
  Interval domain = Interval::unit();

  static ExperimentConfig parse(std::istream& is);
  static ExperimentConfig load(const std::string& path);
  Dataset make_dataset() const;
};

// Sweeps mechanisms x epsilons x tasks. Per-trial seeds are derived from the
// master seed and the trial index, so parallel and serial runs agree.
std::vector<EstimationReport> run_experiment(const ExperimentConfig& config);

// CSV with header: mechanism,epsilon,task,error_mean,error_std,trials,seed
void write_csv(std::ostream& os, std::span<const EstimationReport> reports);

std::string task_name(Task task);

}  // namespace gpm
