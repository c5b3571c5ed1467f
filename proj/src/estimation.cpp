#include "gpm/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gpm/seeding.hpp"

namespace gpm {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  return cells;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double perturb_value(const MechanismSpec& spec, double eps, double x,
                     std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return spec.perturb(eps, x, unif(rng));
}

}  // namespace

Dataset load_csv_dataset(const std::string& path, const std::string& column,
                         Normalization normalize) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset file: " + path);

  const std::vector<std::string> header = split_csv_line(line);
  std::size_t col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == column) col = i;
  if (col == header.size()) {
    // numeric column index fallback
    try {
      const int idx = std::stoi(column);
      if (idx >= 0 && static_cast<std::size_t>(idx) < header.size())
        col = static_cast<std::size_t>(idx);
    } catch (const std::exception&) {
    }
  }
  if (col == header.size())
    throw std::runtime_error("column not found in " + path + ": " + column);

  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (col >= cells.size())
      throw std::runtime_error("row " + std::to_string(row) +
                               " is missing column " + column);
    try {
      std::size_t used = 0;
      const double v = std::stod(cells[col], &used);
      if (!trim(cells[col].substr(used)).empty())
        throw std::invalid_argument("trailing characters");
      values.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error("non-numeric cell in row " +
                               std::to_string(row) + ": " + cells[col]);
    }
  }
  if (values.empty())
    throw std::runtime_error("no data rows in " + path);

  Dataset data;
  data.name = path + ":" + column;
  switch (normalize) {
    case Normalization::ToUnit: {
      const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
      const double lo = *mn, span = *mx - *mn;
      const double top = std::nextafter(1.0, 0.0);
      for (double& v : values)
        v = span > 0.0 ? std::min((v - lo) / span, top) : 0.0;
      data.domain = Interval::unit();
      break;
    }
    case Normalization::ToCircle:
      for (double& v : values) v = wrap_angle(v);
      data.domain = Interval::circle();
      break;
    case Normalization::None: {
      const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
      const double hi = *mx > *mn ? *mx : *mn + 1.0;
      data.domain = Interval::classical(*mn, std::nextafter(hi, 1e308));
      break;
    }
  }
  data.values = std::move(values);
  return data;
}

Dataset synthetic_dataset(const std::string& kind, int n,
                          const Interval& domain, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("dataset size must be >= 1");
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double top = std::nextafter(domain.hi, domain.lo);

  Dataset data;
  data.domain = domain;
  data.name = kind;
  data.values.reserve(static_cast<std::size_t>(n));
  if (kind == "uniform") {
    for (int i = 0; i < n; ++i)
      data.values.push_back(domain.lo + unif(rng) * domain.width());
  } else if (kind == "gaussian") {
    // clipped normal centered at 40% of the range
    const double mu = domain.lo + 0.4 * domain.width();
    const double sigma = 0.15 * domain.width();
    for (int i = 0; i < n; ++i)
      data.values.push_back(
          std::clamp(mu + sigma * normal(rng), domain.lo, top));
  } else if (kind == "vonmises") {
    if (!domain.circular())
      throw std::invalid_argument("vonmises data needs a circular domain");
    // two-component wrapped mixture concentrated near pi/2 and 5pi/4
    for (int i = 0; i < n; ++i) {
      const bool first = unif(rng) < 0.7;
      const double mu = first ? kTwoPi / 4.0 : 1.25 * kTwoPi / 2.0;
      const double sigma = first ? 0.4 : 0.7;
      data.values.push_back(wrap_angle(mu + sigma * normal(rng)));
    }
  } else {
    throw std::invalid_argument("unknown synthetic dataset: " + kind);
  }
  return data;
}

std::optional<double> circular_mean(std::span<const double> angles) {
  if (angles.empty()) return std::nullopt;
  double s = 0.0, c = 0.0;
  for (double a : angles) {
    s += std::sin(a);
    c += std::cos(a);
  }
  s /= static_cast<double>(angles.size());
  c /= static_cast<double>(angles.size());
  if (std::hypot(s, c) < 1e-12) return std::nullopt;
  return wrap_angle(std::atan2(s, c));
}

DistributionEstimate estimate_distribution(const Dataset& data,
                                           const MechanismSpec& spec,
                                           double eps, int bins,
                                           std::uint64_t seed) {
  if (data.values.empty()) throw std::invalid_argument("empty dataset");
  if (bins < 1) throw std::invalid_argument("bins must be >= 1");
  const MechanismSpec mech = adapted_to(spec, data.domain);

  std::mt19937_64 rng(seed);
  const double lo = data.domain.lo;
  const double w = data.domain.width();
  auto bin_of = [&](double v) {
    const int b = static_cast<int>(std::floor((v - lo) / w * bins));
    return std::clamp(b, 0, bins - 1);  // clamps enlarged-domain outputs
  };

  DistributionEstimate est;
  est.estimated.assign(static_cast<std::size_t>(bins), 0.0);
  est.truth.assign(static_cast<std::size_t>(bins), 0.0);
  for (double x : data.values) {
    est.truth[static_cast<std::size_t>(bin_of(x))] += 1.0;
    const double y = perturb_value(mech, eps, x, rng);
    est.estimated[static_cast<std::size_t>(bin_of(y))] += 1.0;
  }
  const double n = static_cast<double>(data.values.size());
  est.l1 = 0.0;
  for (int b = 0; b < bins; ++b) {
    est.estimated[static_cast<std::size_t>(b)] /= n;
    est.truth[static_cast<std::size_t>(b)] /= n;
    est.l1 += std::abs(est.estimated[static_cast<std::size_t>(b)] -
                       est.truth[static_cast<std::size_t>(b)]);
  }
  return est;
}

MeanEstimate estimate_mean(const Dataset& data, const MechanismSpec& spec,
                           double eps, std::uint64_t seed) {
  if (data.values.empty()) throw std::invalid_argument("empty dataset");
  const MechanismSpec mech = adapted_to(spec, data.domain);

  std::mt19937_64 rng(seed);
  std::vector<double> perturbed;
  perturbed.reserve(data.values.size());
  for (double x : data.values)
    perturbed.push_back(perturb_value(mech, eps, x, rng));

  MeanEstimate est;
  if (data.domain.circular()) {
    const auto mu = circular_mean(data.values);
    const auto mu_hat = circular_mean(perturbed);
    if (!mu || !mu_hat) {
      est.degenerate = true;
      return est;
    }
    est.mu = *mu;
    est.mu_hat = *mu_hat;
    est.abs_err = arc_distance(est.mu_hat, est.mu);
  } else {
    est.mu = std::accumulate(data.values.begin(), data.values.end(), 0.0) /
             static_cast<double>(data.values.size());
    est.mu_hat = std::accumulate(perturbed.begin(), perturbed.end(), 0.0) /
                 static_cast<double>(perturbed.size());
    est.abs_err = std::abs(est.mu_hat - est.mu);
  }
  return est;
}

ExperimentConfig ExperimentConfig::parse(std::istream& is) {
  ExperimentConfig cfg;
  cfg.mechanisms.clear();
  cfg.epsilons.clear();
  cfg.tasks.clear();
  std::string line;
  auto split_list = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  };
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "mechanisms") {
      cfg.mechanisms = split_list(val);
    } else if (key == "epsilons") {
      for (const std::string& s : split_list(val))
        cfg.epsilons.push_back(std::stod(s));
    } else if (key == "tasks") {
      for (const std::string& s : split_list(val)) {
        if (s == "distribution") cfg.tasks.push_back(Task::Distribution);
        else if (s == "mean") cfg.tasks.push_back(Task::Mean);
        else throw std::invalid_argument("unknown task: " + s);
      }
    } else if (key == "trials") {
      cfg.trials = std::stoi(val);
    } else if (key == "bins") {
      cfg.bins = std::stoi(val);
    } else if (key == "seed") {
      cfg.seed = std::stoull(val);
    } else if (key == "dataset") {
      cfg.dataset_path = val;
    } else if (key == "column") {
      cfg.column = val;
    } else if (key == "normalize") {
      if (val == "unit") cfg.normalize = Normalization::ToUnit;
      else if (val == "circle") cfg.normalize = Normalization::ToCircle;
      else if (val == "none") cfg.normalize = Normalization::None;
      else throw std::invalid_argument("unknown normalization: " + val);
    } else if (key == "synthetic") {
      cfg.synthetic = val;
    } else if (key == "n") {
      cfg.n = std::stoi(val);
    } else if (key == "domain") {
      if (val == "unit") cfg.domain = Interval::unit();
      else if (val == "circle") cfg.domain = Interval::circle();
      else throw std::invalid_argument("unknown domain: " + val);
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  if (cfg.mechanisms.empty())
    throw std::invalid_argument("config needs at least one mechanism");
  if (cfg.epsilons.empty())
    throw std::invalid_argument("config needs at least one epsilon");
  if (cfg.tasks.empty())
    cfg.tasks = {Task::Distribution, Task::Mean};
  for (double e : cfg.epsilons)
    if (!(e > 0.0)) throw std::invalid_argument("epsilons must be positive");
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse(in);
}

Dataset ExperimentConfig::make_dataset() const {
  if (!dataset_path.empty())
    return load_csv_dataset(dataset_path, column, normalize);
  return synthetic_dataset(synthetic, n, domain, splitmix64(seed));
}

std::vector<EstimationReport> run_experiment(const ExperimentConfig& config) {
  const Dataset data = config.make_dataset();
  // resolve names up front so a typo fails before any work is done
  for (const std::string& name : config.mechanisms) {
    const MechanismSpec& spec = mechanism(name);
    if (!spec.sampleable())
      throw std::invalid_argument(name + " cannot be used in experiments");
  }

  std::vector<EstimationReport> reports;
  for (const std::string& name : config.mechanisms) {
    const MechanismSpec& spec = mechanism(name);
    for (double eps : config.epsilons) {
      for (Task task : config.tasks) {
        std::vector<double> errs;
        errs.reserve(static_cast<std::size_t>(config.trials));
        for (int t = 0; t < config.trials; ++t) {
          const std::uint64_t s =
              trial_seed(config.seed, static_cast<std::uint64_t>(t));
          if (task == Task::Distribution) {
            errs.push_back(
                estimate_distribution(data, spec, eps, config.bins, s).l1);
          } else {
            const MeanEstimate est = estimate_mean(data, spec, eps, s);
            if (!est.degenerate) errs.push_back(est.abs_err);
          }
        }
        EstimationReport rep;
        rep.mechanism = name;
        rep.epsilon = eps;
        rep.task = task;
        rep.trials = static_cast<int>(errs.size());
        rep.seed = config.seed;
        if (!errs.empty()) {
          const double n = static_cast<double>(errs.size());
          rep.error_mean =
              std::accumulate(errs.begin(), errs.end(), 0.0) / n;
          double ss = 0.0;
          for (double e : errs) ss += (e - rep.error_mean) * (e - rep.error_mean);
          rep.error_std = errs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        }
        reports.push_back(std::move(rep));
      }
    }
  }
  return reports;
}

std::string task_name(Task task) {
  return task == Task::Distribution ? "distribution" : "mean";
}

void write_csv(std::ostream& os, std::span<const EstimationReport> reports) {
  char buf[40];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "mechanism,epsilon,task,error_mean,error_std,trials,seed\n";
  for (const EstimationReport& r : reports)
    os << r.mechanism << ',' << fmt(r.epsilon) << ',' << task_name(r.task)
       << ',' << fmt(r.error_mean) << ',' << fmt(r.error_std) << ','
       << r.trials << ',' << r.seed << '\n';
}

}  // namespace gpm
