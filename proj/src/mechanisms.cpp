#include "gpm/mechanisms.hpp"

#include <cmath>
#include <stdexcept>

namespace gpm {

namespace {

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("epsilon must be positive");
}

void require_in(const Interval& domain, double x, const char* who) {
  if (!domain.contains(x))
    throw std::domain_error(std::string(who) + ": x outside input domain");
}

// Central-interval half width of the classical optimal mechanism.
double classical_half_width(double eps) {
  return std::expm1(eps / 2.0) / (2.0 * std::expm1(eps));
}

// Laplace(mu, b) CDF.
double laplace_cdf(double y, double mu, double b) {
  const double t = (y - mu) / b;
  return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
}

// \int_0^y exp(-eps*|t-x|) dt for y, x in [0,1].
double blaplace_mass(double y, double x, double eps) {
  auto anti = [&](double v) {  // continuous antiderivative, anti(x) = 1/eps
    return v < x ? std::exp(-eps * (x - v)) / eps
                 : (2.0 - std::exp(-eps * (v - x))) / eps;
  };
  return anti(y) - anti(0.0);
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

PiecewiseDensity ogpm_classical(double eps, double x) {
  require_eps(eps);
  require_in(Interval::unit(), x, "ogpm_classical");
  const double p = std::exp(eps / 2.0);
  const double q = std::exp(-eps / 2.0);
  const double C = classical_half_width(eps);
  double l, r;
  if (x < C) {
    l = 0.0;
    r = 2.0 * C;
  } else if (x < 1.0 - C) {
    l = x - C;
    r = x + C;
  } else {
    l = 1.0 - 2.0 * C;
    r = 1.0;
  }
  return PiecewiseDensity(
      {Piece{q, 0.0, l}, Piece{p, l, r}, Piece{q, r, 1.0}}, Interval::unit(),
      eps);
}

PiecewiseDensity ogpm_circular(double eps, double x) {
  require_eps(eps);
  require_in(Interval::circle(), x, "ogpm_circular");
  x = wrap_angle(x);
  const double p = std::exp(eps / 2.0) / kTwoPi;
  const double q = p * std::exp(-eps);
  // half width pi * (e^{eps/2}-1) / (e^eps - 1), always < pi
  const double h = (kTwoPi / 2.0) * std::expm1(eps / 2.0) / std::expm1(eps);
  const double l = wrap_angle(x - h);
  const double r = wrap_angle(x + h);
  std::vector<Piece> pieces;
  if (l < r) {
    pieces = {Piece{q, 0.0, l}, Piece{p, l, r}, Piece{q, r, kTwoPi}};
  } else {
    // high arc wraps the 0/2*pi boundary
    pieces = {Piece{p, 0.0, r}, Piece{q, r, l}, Piece{p, l, kTwoPi}};
  }
  return PiecewiseDensity(std::move(pieces), Interval::circle(), eps);
}

PiecewiseDensity ogpm_unbiased(double eps, double x) {
  require_eps(eps);
  require_in(Interval::unit(), x, "ogpm_unbiased");
  const double C = (std::exp(eps / 2.0) + 1.0) / std::expm1(eps / 2.0);
  const double p = std::exp(eps / 2.0) / (2.0 * C + 1.0);
  const double q = p * std::exp(-eps);
  const double l = (C + 1.0) / 2.0 * x - (3.0 * C + 1.0) * (C - 1.0) / (4.0 * C);
  const double r = (C + 1.0) / 2.0 * x + (C + 1.0) * (C - 1.0) / (4.0 * C);
  const Interval out = Interval::classical(-C, C + 1.0);
  return PiecewiseDensity(
      {Piece{q, -C, l}, Piece{p, l, r}, Piece{q, r, C + 1.0}}, out, eps);
}

PiecewiseDensity pm(double eps, double x) {
  require_eps(eps);
  require_in(Interval::classical(-1.0, 1.0), x, "pm");
  const double C = (std::exp(eps / 2.0) + 1.0) / std::expm1(eps / 2.0);
  const double l = (C + 1.0) / 2.0 * x - (C - 1.0) / 2.0;
  const double r = l + (C - 1.0);
  // high level from normalization over [-C, C)
  const double p = 1.0 / ((C - 1.0) + (C + 1.0) * std::exp(-eps));
  const double q = p * std::exp(-eps);
  const Interval out = Interval::classical(-C, C);
  return PiecewiseDensity({Piece{q, -C, l}, Piece{p, l, r}, Piece{q, r, C}},
                          out, eps);
}

PiecewiseDensity sw(double eps, double x) {
  require_eps(eps);
  require_in(Interval::unit(), x, "sw");
  const double E = std::exp(eps);
  const double b = (eps * E - E + 1.0) / (2.0 * E * (E - 1.0 - eps));
  const double p = E / (2.0 * b * E + 1.0);
  const double q = 1.0 / (2.0 * b * E + 1.0);
  const Interval out = Interval::classical(-b, 1.0 + b);
  return PiecewiseDensity(
      {Piece{q, -b, x - b}, Piece{p, x - b, x + b}, Piece{q, x + b, 1.0 + b}},
      out, eps);
}

double staircase_expected_error(double eps) {
  require_eps(eps);
  return std::exp(eps / 2.0) / std::expm1(eps);
}

TruncatedDensity t_laplace(double eps, double x, int grid) {
  require_eps(eps);
  require_in(Interval::unit(), x, "t_laplace");
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  const double b = 1.0 / eps;
  // enlarged support wide enough that the missing tail mass is << 1e-9
  const double W = std::ceil(25.0 / eps);
  std::vector<Piece> pieces;
  pieces.reserve(static_cast<std::size_t>(grid) + 2);
  const double lo_tail = laplace_cdf(0.0, x, b) - laplace_cdf(-W, x, b);
  pieces.push_back(Piece{lo_tail / W, -W, 0.0});
  double prev_cdf = laplace_cdf(0.0, x, b);
  for (int i = 1; i <= grid; ++i) {
    const double r = static_cast<double>(i) / grid;
    const double c = laplace_cdf(r, x, b);
    pieces.push_back(Piece{(c - prev_cdf) * grid, (i - 1.0) / grid, r});
    prev_cdf = c;
  }
  const double hi_tail = laplace_cdf(1.0 + W, x, b) - laplace_cdf(1.0, x, b);
  pieces.push_back(Piece{hi_tail / W, 1.0, 1.0 + W});
  PiecewiseDensity full(std::move(pieces), Interval::classical(-W, 1.0 + W));
  return truncate(full, Interval::unit());
}

PiecewiseDensity b_laplace(double eps, double x, int grid) {
  require_eps(eps);
  require_in(Interval::unit(), x, "b_laplace");
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  const double total = blaplace_mass(1.0, x, eps);
  std::vector<Piece> pieces;
  pieces.reserve(static_cast<std::size_t>(grid));
  double prev = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double r = static_cast<double>(i) / grid;
    const double m = blaplace_mass(r, x, eps);
    pieces.push_back(Piece{(m - prev) / total * grid, (i - 1.0) / grid, r});
    prev = m;
  }
  return PiecewiseDensity(std::move(pieces), Interval::unit(), eps);
}

double b_laplace_expected_error(double eps, double x) {
  require_eps(eps);
  require_in(Interval::unit(), x, "b_laplace_expected_error");
  const double a = 1.0 - (1.0 + eps * x) * std::exp(-eps * x);
  const double c = 1.0 - (1.0 + eps * (1.0 - x)) * std::exp(-eps * (1.0 - x));
  return (a + c) / (eps * -std::expm1(-eps));
}

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

double MechanismSpec::perturb(double eps, double x, double u) const {
  if (inverse_cdf) return inverse_cdf(eps, x, u);
  if (!distribution)
    throw std::invalid_argument(name + " cannot be sampled");
  return distribution(eps, x).sample(u);
}

namespace {

MechanismSpec pure_spec(std::string name, Interval input, bool biased,
                        WorstCaseRule rule,
                        std::function<Interval(double)> out,
                        std::function<PiecewiseDensity(double, double)> pdf) {
  MechanismSpec spec;
  spec.name = std::move(name);
  spec.input_domain = input;
  spec.biased = biased;
  spec.worst_case = rule;
  spec.output_domain = std::move(out);
  spec.pdf = std::move(pdf);
  spec.distribution = [f = spec.pdf](double e, double x) {
    return TruncatedDensity::from_density(f(e, x));
  };
  return spec;
}

double t_laplace_inverse_cdf(double eps, double x, double u) {
  const double b = 1.0 / eps;
  const double y = u < 0.5 ? x + b * std::log(2.0 * u)
                           : x - b * std::log(2.0 * (1.0 - u));
  return std::min(std::max(y, 0.0), 1.0);
}

double b_laplace_inverse_cdf(double eps, double x, double u) {
  const double target = u * blaplace_mass(1.0, x, eps);
  const double below_x = blaplace_mass(x, x, eps);
  double y;
  if (target < below_x) {
    // exp(-eps(x-y))/eps - exp(-eps*x)/eps = target
    y = x + std::log(eps * target + std::exp(-eps * x)) / eps;
  } else {
    y = x - std::log1p(-eps * (target - below_x)) / eps;
  }
  return std::min(std::max(y, 0.0), 1.0);
}

std::map<std::string, MechanismSpec> build_registry() {
  std::map<std::string, MechanismSpec> reg;
  const Interval unit = Interval::unit();
  const Interval sym = Interval::classical(-1.0, 1.0);

  reg["ogpm"] = pure_spec(
      "ogpm", unit, /*biased=*/true, WorstCaseRule::Endpoints,
      [](double) { return Interval::unit(); }, ogpm_classical);

  reg["ogpm-circular"] = pure_spec(
      "ogpm-circular", Interval::circle(), /*biased=*/false,
      WorstCaseRule::AtPi, [](double) { return Interval::circle(); },
      ogpm_circular);

  reg["ogpm-u"] = pure_spec(
      "ogpm-u", unit, /*biased=*/false, WorstCaseRule::Endpoints,
      [](double e) {
        const double C = (std::exp(e / 2.0) + 1.0) / std::expm1(e / 2.0);
        return Interval::classical(-C, C + 1.0);
      },
      ogpm_unbiased);

  reg["pm"] = pure_spec(
      "pm", sym, /*biased=*/false, WorstCaseRule::Endpoints,
      [](double e) {
        const double C = (std::exp(e / 2.0) + 1.0) / std::expm1(e / 2.0);
        return Interval::classical(-C, C);
      },
      pm);

  reg["sw"] = pure_spec(
      "sw", unit, /*biased=*/true, WorstCaseRule::Endpoints,
      [](double e) {
        const double E = std::exp(e);
        const double b = (e * E - E + 1.0) / (2.0 * E * (E - 1.0 - e));
        return Interval::classical(-b, 1.0 + b);
      },
      sw);

  reg["pm-c"] = compress(reg["pm"], "pm-c");
  reg["sw-c"] = compress(reg["sw"], "sw-c");

  {
    MechanismSpec spec;
    spec.name = "t-pm";
    spec.input_domain = sym;
    spec.biased = true;
    spec.worst_case = WorstCaseRule::GridScan;
    spec.output_domain = [](double) { return Interval::classical(-1.0, 1.0); };
    spec.distribution = [](double e, double x) {
      return truncate(pm(e, x), Interval::classical(-1.0, 1.0));
    };
    reg["t-pm"] = spec;
  }
  {
    MechanismSpec spec;
    spec.name = "t-sw";
    spec.input_domain = unit;
    spec.biased = true;
    spec.worst_case = WorstCaseRule::GridScan;
    spec.output_domain = [](double) { return Interval::unit(); };
    spec.distribution = [](double e, double x) {
      return truncate(sw(e, x), Interval::unit());
    };
    reg["t-sw"] = spec;
  }
  {
    MechanismSpec spec;
    spec.name = "t-laplace";
    spec.input_domain = unit;
    spec.biased = true;
    spec.worst_case = WorstCaseRule::GridScan;
    spec.output_domain = [](double) { return Interval::unit(); };
    spec.distribution = [](double e, double x) { return t_laplace(e, x); };
    spec.inverse_cdf = t_laplace_inverse_cdf;
    reg["t-laplace"] = spec;
  }
  {
    MechanismSpec spec = pure_spec(
        "b-laplace", unit, /*biased=*/true, WorstCaseRule::GridScan,
        [](double) { return Interval::unit(); },
        [](double e, double x) { return b_laplace(e, x); });
    spec.inverse_cdf = b_laplace_inverse_cdf;  // exact shape, no grid
    reg["b-laplace"] = spec;
  }
  {
    MechanismSpec spec;
    spec.name = "staircase";
    spec.input_domain = unit;
    spec.biased = true;
    spec.worst_case = WorstCaseRule::Analytic;
    spec.output_domain = [](double) { return Interval::unit(); };
    spec.analytic_error = [](double e, const ErrorMetric& m) {
      if (m.power != 1)
        throw std::invalid_argument(
            "staircase: only the absolute-error formula is available");
      return staircase_expected_error(e);
    };
    reg["staircase"] = spec;
  }
  return reg;
}

}  // namespace

const std::map<std::string, MechanismSpec>& mechanism_registry() {
  static const std::map<std::string, MechanismSpec> reg = build_registry();
  return reg;
}

const MechanismSpec& mechanism(const std::string& name) {
  const auto& reg = mechanism_registry();
  auto it = reg.find(name);
  if (it == reg.end())
    throw std::invalid_argument("unknown mechanism: " + name);
  return it->second;
}

std::vector<std::string> mechanism_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : mechanism_registry()) names.push_back(name);
  return names;
}

MechanismSpec compress(const MechanismSpec& base, std::string name) {
  if (!base.pdf)
    throw std::invalid_argument("compress: base mechanism has no pure pdf");
  MechanismSpec spec;
  spec.name = name.empty() ? base.name + "-c" : std::move(name);
  spec.input_domain = base.input_domain;
  spec.biased = true;
  spec.worst_case = base.worst_case;
  spec.output_domain = [in = base.input_domain](double) { return in; };
  spec.pdf = [base_pdf = base.pdf, base_out = base.output_domain,
              in = base.input_domain](double e, double x) {
    return apply_transform(base_pdf(e, x), Transform::between(base_out(e), in));
  };
  spec.distribution = [f = spec.pdf](double e, double x) {
    return TruncatedDensity::from_density(f(e, x));
  };
  return spec;
}

MechanismSpec adapted_to(const MechanismSpec& spec,
                         const Interval& data_domain) {
  if (spec.input_domain == data_domain) return spec;
  if (spec.input_domain.circular())
    throw std::invalid_argument(spec.name +
                                ": circular mechanism cannot be re-domained");
  if (!spec.distribution)
    throw std::invalid_argument(spec.name + ": not adaptable");

  // Treat a circular target as the flattened classical range [0, 2*pi).
  const Interval target_cl =
      Interval::classical(data_domain.lo, data_domain.hi);
  const Transform g = Transform::between(target_cl, spec.input_domain);
  const Transform ginv = g.inverse();
  const bool retag_circular =
      data_domain.circular() &&
      spec.output_domain(1.0) == spec.input_domain;  // output stays in range

  MechanismSpec out;
  out.name = spec.name;
  out.input_domain = data_domain;
  out.biased = spec.biased;
  out.worst_case =
      data_domain.circular() ? WorstCaseRule::GridScan : spec.worst_case;
  out.output_domain = [spec, ginv](double e) {
    const Interval o = spec.output_domain(e);
    return Interval::classical(ginv(o.lo), ginv(o.hi));
  };
  if (spec.pdf) {
    out.pdf = [spec, g, ginv, retag_circular](double e, double x) {
      PiecewiseDensity mapped = apply_transform(spec.pdf(e, g(x)), ginv);
      if (!retag_circular) return mapped;
      return PiecewiseDensity(mapped.pieces(), Interval::circle(),
                              mapped.epsilon());
    };
    // sampling goes through the classical mapping; the values coincide
    out.distribution = [spec, g, ginv](double e, double x) {
      return TruncatedDensity::from_density(
          apply_transform(spec.pdf(e, g(x)), ginv));
    };
  } else {
    out.distribution = [spec, g, ginv](double e, double x) {
      const TruncatedDensity base = spec.distribution(e, g(x));
      std::vector<Piece> pieces;
      pieces.reserve(base.interior().size());
      for (const Piece& p : base.interior())
        pieces.push_back(Piece{p.density * g.scale, ginv(p.left), ginv(p.right)});
      const Interval dom = Interval::classical(ginv(base.domain().lo),
                                               ginv(base.domain().hi));
      return TruncatedDensity(std::move(pieces), dom, base.lo_atom(),
                              base.hi_atom());
    };
  }
  if (spec.inverse_cdf) {
    out.inverse_cdf = [f = spec.inverse_cdf, g, ginv](double e, double x,
                                                      double u) {
      return ginv(f(e, g(x), u));
    };
  }
  return out;
}

}  // namespace gpm
