#pragma once

#include <string>
#include <vector>

#include "lssradar/scenario.hpp"

namespace lssradar::testing {

inline RadarParams reference_radar() {
  RadarParams r;
  r.carrier_frequency_hz = 10.0e9;
  r.wavelength_m = 0.03;
  r.prf_hz = 6400.0;
  r.pulses_per_cpi = 384;
  r.bandwidth_hz = 12.5e6;
  r.range_bins = 128;
  return r;
}

inline LinkBudget reference_budget() {
  LinkBudget b;
  b.transmit_power_w = 100.0;
  b.tx_gain = 52.15;
  b.rx_gain = 52.15;
  b.system_noise_temp_k = 500.0;
  b.noise_bandwidth_hz = 12.5e6;
  b.system_losses = 2.0;
  return b;
}

// Constant-radial-speed point target: starts at the given range on the x axis
// with 10 m of altitude and closes at `speed` for 60 s.
inline TargetModel point_target(const std::string& id, double range_m,
                                double speed_mps, double rcs_m2 = 0.05) {
  TargetModel t;
  t.id = id;
  t.category = "unknown";
  t.mean_rcs_m2 = rcs_m2;
  t.waypoints = {{0.0, {range_m, 0.0, 10.0}},
                 {60.0, {range_m - speed_mps * 60.0, 0.0, 10.0}}};
  return t;
}

inline BladeSet lifting_rotor(double length_m, double rate_hz,
                              double phase_rad = 0.0, double reflectivity = 0.45) {
  BladeSet bs;
  bs.count = 2;
  bs.length_m = length_m;
  bs.rate_rad_s = kTwoPi * rate_hz;
  bs.plane = BladePlane::Lifting;
  bs.phase_offset_rad = phase_rad;
  bs.reflectivity_scale = reflectivity;
  return bs;
}

inline TargetModel quad_target(const std::string& id, double range_m,
                               double speed_mps, double altitude_m = 60.0) {
  TargetModel t;
  t.id = id;
  t.category = "multi_rotor_drone";
  t.mean_rcs_m2 = 0.05;
  t.waypoints = {{0.0, {range_m, 0.0, altitude_m}},
                 {60.0, {range_m - speed_mps * 60.0, 0.0, altitude_m}}};
  for (int i = 0; i < 4; ++i)
    t.blade_sets.push_back(lifting_rotor(0.10, 110.0, 1.1 * i));
  return t;
}

inline Scenario reference_scenario(std::uint64_t seed = 1) {
  Scenario sc;
  sc.radar = reference_radar();
  sc.budget = reference_budget();
  sc.noise_seed = seed;
  return sc;
}

}  // namespace lssradar::testing
