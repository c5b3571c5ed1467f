#include "gpm/interval.hpp"

#include <cmath>

namespace gpm {

double wrap_angle(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod can land exactly on 2*pi after the correction
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

}  // namespace gpm
