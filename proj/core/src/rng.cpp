#include "tca/rng.hpp"

#include <cmath>

namespace tca {

double Rng::normal(double mu, double sigma) {
  // u1 in (0, 1] so the log argument is never zero.
  double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  double u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace tca
