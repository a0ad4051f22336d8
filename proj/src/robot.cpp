#include "swarmevo/robot.hpp"

#include <cmath>

namespace swarmevo {

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(radians, two_pi);  // [-pi, pi]
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

}  // namespace swarmevo
