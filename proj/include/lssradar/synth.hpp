#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lssradar/rng.hpp"
#include "lssradar/scenario.hpp"
#include "lssradar/units.hpp"

namespace lssradar {

// Wingbeat modulation applied to any target with flap_rate_hz > 0: amplitude
// index and peak body-speed excursion of the flap cycle.
inline constexpr double kFlapAmIndex = 0.3;
inline constexpr double kFlapSpeedExcursionMps = 2.0;

// Single-pulse SNR (dB) against unit-power receiver noise.
inline double single_pulse_snr(const LinkBudget& b, double wavelength_m, double rcs_m2,
                               double range_m) {
  if (range_m <= 0.0) throw std::invalid_argument("single_pulse_snr: range must be > 0");
  const double four_pi = 4.0 * kPi;
  const double num = b.transmit_power_w * b.tx_gain * b.rx_gain * wavelength_m *
                     wavelength_m * rcs_m2;
  const double den = four_pi * four_pi * four_pi * kBoltzmann * b.system_noise_temp_k *
                     b.noise_bandwidth_hz * b.system_losses * range_m * range_m *
                     range_m * range_m;
  return linear_to_db(num / den);
}

inline double blade_angle(const BladeSet& bs, int blade_index, double t) {
  const double w0 = bs.rate_rad_s;
  return bs.phase_offset_rad + kTwoPi * blade_index / bs.count +
         w0 * (t + 0.5 * bs.drift_per_s * t * t);
}

inline double blade_rate_at(const BladeSet& bs, double t) {
  return bs.rate_rad_s * (1.0 + bs.drift_per_s * t);
}

// Instantaneous micro-Doppler of the blade tip, on top of the body shift.
inline double micro_doppler_shift(const BladeSet& bs, double wavelength_m, double alpha,
                                  double beta, double body_doppler_hz, double t) {
  const double geom = std::cos(alpha) * std::cos(beta);
  return (bs.length_m / wavelength_m) * blade_rate_at(bs, t) * geom *
             std::cos(blade_angle(bs, 0, t)) +
         body_doppler_hz;
}

inline std::vector<double> blade_scatterer_radii(const BladeSet& bs) {
  std::vector<double> r(static_cast<std::size_t>(bs.scatterers_per_blade));
  for (int p = 1; p <= bs.scatterers_per_blade; ++p)
    r[static_cast<std::size_t>(p - 1)] = bs.length_m * p / bs.scatterers_per_blade;
  return r;
}

// Micro-motion phase of every scatterer in the set at time t, blade-major;
// the tip entry's d(phase)/dt / 2pi equals micro_doppler_shift with zero body
// term.
inline std::vector<double> blade_scatterer_phases(const BladeSet& bs, double wavelength_m,
                                                  double alpha, double beta, double t) {
  const double geom = std::cos(alpha) * std::cos(beta);
  const std::vector<double> radii = blade_scatterer_radii(bs);
  std::vector<double> phases;
  phases.reserve(static_cast<std::size_t>(bs.count) * radii.size());
  for (int b = 0; b < bs.count; ++b) {
    const double s = std::sin(blade_angle(bs, b, t));
    for (double rho : radii) phases.push_back(kTwoPi / wavelength_m * rho * geom * s);
  }
  return phases;
}

struct IqCube {
  int pulses = 0;
  int range_bins = 0;
  double t0 = 0.0;
  double prf_hz = 0.0;
  double range_bin_size_m = 0.0;
  double wavelength_m = 0.0;
  double beam_azimuth_rad = 0.0;
  std::vector<std::complex<double>> data;  // pulse-major [p * range_bins + b]
  std::vector<std::string> excluded_targets;  // "<id>: <reason>"
  std::vector<std::string> aliased_targets;   // Doppler content wraps prf/2

  std::complex<double>& at(int p, int b) {
    return data[static_cast<std::size_t>(p) * range_bins + b];
  }
  std::complex<double> at(int p, int b) const {
    return data[static_cast<std::size_t>(p) * range_bins + b];
  }
};

struct SynthOptions {
  bool noise = true;
  std::optional<std::uint64_t> seed_override;
  std::map<std::string, double> snr_override_db;  // per target id
};

// One coherent processing interval of complex baseband, unit noise power per
// cell; target amplitudes carry the link-budget SNR.
inline IqCube synth_cpi(const Scenario& sc, double t0, const SynthOptions& opt = {}) {
  const RadarParams& radar = sc.radar;
  const int np = radar.pulses_per_cpi;
  const int nb = radar.range_bins;

  IqCube cube;
  cube.pulses = np;
  cube.range_bins = nb;
  cube.t0 = t0;
  cube.prf_hz = radar.prf_hz;
  cube.range_bin_size_m = radar.range_bin_size_m();
  cube.wavelength_m = radar.wavelength_m;
  cube.beam_azimuth_rad = radar.beam_azimuth_at(t0);
  cube.data.assign(static_cast<std::size_t>(np) * nb, {});

  const std::uint64_t base_seed = opt.seed_override.value_or(sc.noise_seed);
  const std::int64_t cpi_index = std::llround(t0 * radar.prf_hz / np);
  const std::uint64_t cpi_seed = mix_seed(base_seed, static_cast<std::uint64_t>(cpi_index));

  if (opt.noise) {
    GaussianGen gen(mix_seed(cpi_seed, 0x01));
    for (auto& c : cube.data) c = gen.complex_unit();
  }

  if (sc.clutter.enabled) {
    // Zero-Doppler-centered clutter: a few random sinusoids per range bin with
    // Gaussian-drawn Doppler offsets reproduce the configured spectral spread.
    constexpr int kComponents = 12;
    const double cnr = db_to_linear(sc.clutter.clutter_to_noise_db);
    const double sigma_f = 2.0 * sc.clutter.doppler_spread_mps / radar.wavelength_m;
    for (int r = 0; r < nb; ++r) {
      GaussianGen cg(mix_seed(mix_seed(cpi_seed, 0x02), static_cast<std::uint64_t>(r)));
      double freq[kComponents];
      std::complex<double> amp[kComponents];
      for (int m = 0; m < kComponents; ++m) {
        freq[m] = cg.normal() * sigma_f;
        amp[m] = cg.complex_unit() * std::sqrt(cnr / kComponents);
      }
      for (int p = 0; p < np; ++p) {
        const double t = p / radar.prf_hz;
        std::complex<double> c{};
        for (int m = 0; m < kComponents; ++m)
          c += amp[m] * std::polar(1.0, kTwoPi * freq[m] * t);
        cube.at(p, r) += c;
      }
    }
  }

  for (const auto& target : sc.targets) {
    const TargetState st = target_state_at(target, radar, t0);
    if (st.range_m > radar.unambiguous_range_m()) {
      cube.excluded_targets.push_back(target.id + ": beyond unambiguous range");
      continue;
    }
    const int bin = static_cast<int>(std::floor(st.range_m / cube.range_bin_size_m));
    if (bin < 0 || bin >= nb) {
      cube.excluded_targets.push_back(target.id + ": beyond range window");
      continue;
    }

    double snr_db;
    if (auto it = opt.snr_override_db.find(target.id); it != opt.snr_override_db.end()) {
      snr_db = it->second;
    } else {
      snr_db = single_pulse_snr(sc.budget, radar.wavelength_m, target.mean_rcs_m2,
                                st.range_m);
    }
    const double amp = std::sqrt(db_to_linear(snr_db));
    const double f_bd = 2.0 * st.radial_speed_mps / radar.wavelength_m;
    const double phi0 = -2.0 * kTwoPi * st.range_m / radar.wavelength_m;

    const double flap = target.flap_rate_hz;
    const double fm_index =
        flap > 0.0 ? (2.0 * kFlapSpeedExcursionMps / radar.wavelength_m) / flap : 0.0;

    double max_offset_hz = flap > 0.0 ? 2.0 * kFlapSpeedExcursionMps / radar.wavelength_m
                                      : 0.0;

    for (int p = 0; p < np; ++p) {
      const double tau = p / radar.prf_hz;
      const double t_abs = t0 + tau;
      double scale = amp;
      double phase = phi0 + kTwoPi * f_bd * tau;
      if (flap > 0.0) {
        const double cyc = kTwoPi * flap * t_abs;
        scale *= 1.0 + kFlapAmIndex * std::cos(cyc);
        phase += fm_index * std::sin(cyc);
      }
      cube.at(p, bin) += std::polar(scale, phase);
    }

    if (target.appendage) {
      const double ap_range = st.range_m + target.appendage->offset_m;
      const int ap_bin = static_cast<int>(std::floor(ap_range / cube.range_bin_size_m));
      if (ap_bin >= 0 && ap_bin < nb) {
        const double ap_amp = amp * std::sqrt(target.appendage->reflectivity);
        const double ap_phi =
            phi0 - 2.0 * kTwoPi * target.appendage->offset_m / radar.wavelength_m;
        for (int p = 0; p < np; ++p) {
          const double tau = p / radar.prf_hz;
          cube.at(p, ap_bin) += std::polar(ap_amp, ap_phi + kTwoPi * f_bd * tau);
        }
      }
    }

    for (const auto& bs : target.blade_sets) {
      if (st.range_m < 1e-9) break;
      const LosAngles angles = los_geometry(radar, st, bs.plane);
      const double geom = angles.cos_product();
      const std::vector<double> radii = blade_scatterer_radii(bs);
      const double scat_amp =
          amp * std::sqrt(bs.reflectivity_scale /
                          (bs.count * static_cast<double>(radii.size())));
      max_offset_hz = std::max(max_offset_hz,
                               std::fabs((bs.length_m / radar.wavelength_m) *
                                         blade_rate_at(bs, t0) * geom));
      for (int p = 0; p < np; ++p) {
        const double tau = p / radar.prf_hz;
        const double t_abs = t0 + tau;
        const double base = phi0 + kTwoPi * f_bd * tau;
        std::complex<double> sum{};
        for (int b = 0; b < bs.count; ++b) {
          const double sin_th = std::sin(blade_angle(bs, b, t_abs));
          for (double rho : radii)
            sum += std::polar(scat_amp, base + kTwoPi / radar.wavelength_m * rho *
                                                   geom * sin_th);
        }
        cube.at(p, bin) += sum;
      }
    }

    if (std::fabs(f_bd) + max_offset_hz > radar.prf_hz / 2.0)
      cube.aliased_targets.push_back(target.id);
  }
  return cube;
}

}  // namespace lssradar
