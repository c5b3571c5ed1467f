#pragma once

#include <array>
#include <span>
#include <utility>

namespace gpm {

// Feature shapes for fitting solved mechanism parameters against epsilon.
enum class FitFeature {
  ExpHalf,   // f(e) = exp(b1 * e) + b2
  Affine,    // f(e) = b1 * e + b2
  PowerLaw,  // f(e) = b1 * e^b2
};

struct FitResult {
  std::array<double, 2> beta{0.0, 0.0};
  double max_residual{0.0};
  bool ok{false};
  int iterations{0};
};

// Nonlinear least squares (Gauss-Newton with Levenberg damping, parameter
// step tolerance 1e-10) on (epsilon, value) samples. Requires >= 3 samples;
// a singular normal system yields ok = false.
FitResult fit_closed_form(std::span<const std::pair<double, double>> samples,
                          FitFeature feature);

}  // namespace gpm
