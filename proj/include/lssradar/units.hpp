#pragma once

#include <cmath>

namespace lssradar {

// Propagation speed rounded per radar-equation convention; keeps a 12.5 MHz
// sweep at exactly 12 m range bins and a 10 GHz carrier at exactly 3 cm.
inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double wrap_angle(double rad) {
  double w = std::fmod(rad + kPi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w - kPi;
}

}  // namespace lssradar
