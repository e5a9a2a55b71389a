#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "lssradar/units.hpp"

namespace lssradar {

enum class ScatteringRegion { Rayleigh, Resonance, Optical };

inline double electrical_size(double radius_m, double wavelength_m) {
  if (radius_m <= 0.0 || wavelength_m <= 0.0)
    throw std::invalid_argument("electrical_size: radius and wavelength must be > 0");
  return kTwoPi * radius_m / wavelength_m;  // ka
}

inline ScatteringRegion scattering_region(double radius_m, double wavelength_m) {
  const double ka = electrical_size(radius_m, wavelength_m);
  if (ka < 0.5) return ScatteringRegion::Rayleigh;
  if (ka < 10.0) return ScatteringRegion::Resonance;
  return ScatteringRegion::Optical;
}

inline std::string to_string(ScatteringRegion r) {
  switch (r) {
    case ScatteringRegion::Rayleigh: return "rayleigh";
    case ScatteringRegion::Resonance: return "resonance";
    default: return "optical";
  }
}

namespace detail {

inline double rayleigh_norm_rcs(double ka) {  // sigma / (pi a^2)
  const double ka2 = ka * ka;
  return 9.0 * ka2 * ka2;
}

// Damped-oscillation fit to the creeping-wave interference pattern of a
// conducting sphere: 3.65 at ka = 1, decaying toward the optical limit.
inline double resonance_norm_rcs(double ka) {
  return 1.0 + 2.65 * std::exp(-0.55 * (ka - 1.0)) * std::cos(kPi * (ka - 1.0) / 1.3);
}

inline double smoothstep(double x) {
  x = x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x);
  return x * x * (3.0 - 2.0 * x);
}

// Region formulas disagree at the 0.5 and 10 boundaries, so the model
// crossfades on [0.5, 1] and [8, 10]; sigma stays continuous in a and lambda.
inline double norm_rcs(double ka) {
  if (ka < 0.5) return rayleigh_norm_rcs(ka);
  if (ka < 1.0) {
    const double w = smoothstep((ka - 0.5) / 0.5);
    return (1.0 - w) * rayleigh_norm_rcs(ka) + w * resonance_norm_rcs(ka);
  }
  if (ka < 8.0) return resonance_norm_rcs(ka);
  if (ka < 10.0) {
    const double w = smoothstep((ka - 8.0) / 2.0);
    return (1.0 - w) * resonance_norm_rcs(ka) + w;
  }
  return 1.0;
}

}  // namespace detail

inline double sphere_rcs(double radius_m, double wavelength_m) {
  const double ka = electrical_size(radius_m, wavelength_m);
  return kPi * radius_m * radius_m * detail::norm_rcs(ka);
}

// sigma / (pi a^2) as a function of electrical size alone; what the ka-sweep
// CSV prints.
inline double sphere_norm_rcs(double ka) {
  if (ka <= 0.0) throw std::invalid_argument("sphere_norm_rcs: ka must be > 0");
  return detail::norm_rcs(ka);
}

}  // namespace lssradar
