#include "gpm/regression.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace gpm {

namespace {

struct Model {
  // value and Jacobian row of the feature at eps
  virtual double eval(double eps, const std::array<double, 2>& b) const = 0;
  virtual std::array<double, 2> grad(double eps,
                                     const std::array<double, 2>& b) const = 0;
  virtual ~Model() = default;
};

struct ExpHalfModel : Model {
  double eval(double e, const std::array<double, 2>& b) const override {
    return std::exp(b[0] * e) + b[1];
  }
  std::array<double, 2> grad(double e,
                             const std::array<double, 2>& b) const override {
    return {e * std::exp(b[0] * e), 1.0};
  }
};

struct PowerLawModel : Model {
  double eval(double e, const std::array<double, 2>& b) const override {
    return b[0] * std::pow(e, b[1]);
  }
  std::array<double, 2> grad(double e,
                             const std::array<double, 2>& b) const override {
    const double pw = std::pow(e, b[1]);
    return {pw, b[0] * pw * std::log(e)};
  }
};

double max_abs_residual(std::span<const std::pair<double, double>> samples,
                        const Model& model, const std::array<double, 2>& b) {
  double m = 0.0;
  for (const auto& [e, v] : samples)
    m = std::max(m, std::abs(model.eval(e, b) - v));
  return m;
}

// Linear least squares on (f1, f2) -> v; returns false when singular.
bool solve_2x2(double a11, double a12, double a22, double r1, double r2,
               double& x1, double& x2) {
  const double det = a11 * a22 - a12 * a12;
  const double scale = std::max({std::abs(a11), std::abs(a22), 1e-300});
  if (std::abs(det) < 1e-14 * scale * scale) return false;
  x1 = (a22 * r1 - a12 * r2) / det;
  x2 = (a11 * r2 - a12 * r1) / det;
  return true;
}

FitResult affine_fit(std::span<const std::pair<double, double>> samples) {
  double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
  for (const auto& [e, v] : samples) {
    a11 += e * e;
    a12 += e;
    a22 += 1.0;
    r1 += e * v;
    r2 += v;
  }
  FitResult res;
  double b1, b2;
  if (!solve_2x2(a11, a12, a22, r1, r2, b1, b2)) return res;
  res.beta = {b1, b2};
  res.ok = true;
  res.iterations = 1;
  double m = 0.0;
  for (const auto& [e, v] : samples) m = std::max(m, std::abs(b1 * e + b2 - v));
  res.max_residual = m;
  return res;
}

FitResult levenberg_fit(std::span<const std::pair<double, double>> samples,
                        const Model& model, std::array<double, 2> beta) {
  FitResult res;
  double lambda = 1e-3;
  double sse = 0.0;
  for (const auto& [e, v] : samples) {
    const double r = model.eval(e, beta) - v;
    sse += r * r;
  }
  for (int it = 0; it < 200; ++it) {
    res.iterations = it + 1;
    double a11 = 0, a12 = 0, a22 = 0, g1 = 0, g2 = 0;
    for (const auto& [e, v] : samples) {
      const auto j = model.grad(e, beta);
      const double r = model.eval(e, beta) - v;
      a11 += j[0] * j[0];
      a12 += j[0] * j[1];
      a22 += j[1] * j[1];
      g1 += j[0] * r;
      g2 += j[1] * r;
    }
    // reject a rank-deficient Jacobian before damping hides it
    {
      double probe1, probe2;
      if (!solve_2x2(a11, a12, a22, -g1, -g2, probe1, probe2))
        return res;  // singular system, ok stays false
    }
    double d1, d2;
    if (!solve_2x2(a11 + lambda * a11, a12, a22 + lambda * a22, -g1, -g2, d1,
                   d2))
      return res;
    std::array<double, 2> cand{beta[0] + d1, beta[1] + d2};
    double cand_sse = 0.0;
    bool finite = true;
    for (const auto& [e, v] : samples) {
      const double r = model.eval(e, cand) - v;
      if (!std::isfinite(r)) {
        finite = false;
        break;
      }
      cand_sse += r * r;
    }
    if (finite && cand_sse <= sse) {
      beta = cand;
      sse = cand_sse;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (std::hypot(d1, d2) < 1e-10) break;
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }
  res.beta = beta;
  res.ok = true;
  res.max_residual = max_abs_residual(samples, model, beta);
  return res;
}

}  // namespace

FitResult fit_closed_form(std::span<const std::pair<double, double>> samples,
                          FitFeature feature) {
  if (samples.size() < 3)
    throw std::invalid_argument("fit needs at least 3 samples");

  if (feature == FitFeature::Affine) return affine_fit(samples);

  if (feature == FitFeature::ExpHalf) {
    // initial rate from the largest-eps sample assuming b2 ~ 0
    auto it = std::max_element(
        samples.begin(), samples.end(),
        [](const auto& a, const auto& b) { return a.first < b.first; });
    double b1 = 0.3;
    if (it->second > 1.0 && it->first > 0.0)
      b1 = std::log(it->second) / it->first;
    return levenberg_fit(samples, ExpHalfModel{}, {b1, 0.0});
  }

  // power law: log-log least squares seed
  double a11 = 0, a12 = 0, a22 = 0, r1 = 0, r2 = 0;
  for (const auto& [e, v] : samples) {
    if (!(e > 0.0) || !(v > 0.0))
      throw std::invalid_argument("power-law fit needs positive samples");
    const double le = std::log(e), lv = std::log(v);
    a11 += 1.0;
    a12 += le;
    a22 += le * le;
    r1 += lv;
    r2 += le * lv;
  }
  double c0, c1;
  FitResult res;
  if (!solve_2x2(a11, a12, a22, r1, r2, c0, c1)) return res;
  return levenberg_fit(samples, PowerLawModel{}, {std::exp(c0), c1});
}

}  // namespace gpm
