#include "sparseloc/rng.hpp"

#include <cmath>
#include <numbers>

namespace sparseloc::rng {

double Stream::normal() {
  // u1 is mapped to (0, 1] so the logarithm is always finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sparseloc::rng
