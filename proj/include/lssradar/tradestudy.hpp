#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lssradar/atr.hpp"
#include "lssradar/detect.hpp"
#include "lssradar/dsp.hpp"
#include "lssradar/scenario.hpp"
#include "lssradar/synth.hpp"
#include "lssradar/units.hpp"

namespace lssradar {

// ------------------------------------------------------------- pure calculators

// Range at which the target reaches the required single-pulse SNR; exact
// inverse of single_pulse_snr.
inline double detection_range(const LinkBudget& b, double wavelength_m, double rcs_m2,
                              double snr_required_db) {
  if (wavelength_m <= 0.0 || rcs_m2 <= 0.0)
    throw std::invalid_argument("detection_range: wavelength and rcs must be > 0");
  if (b.transmit_power_w <= 0.0 || b.tx_gain <= 0.0 || b.rx_gain <= 0.0 ||
      b.system_noise_temp_k <= 0.0 || b.noise_bandwidth_hz <= 0.0 ||
      b.system_losses < 1.0)
    throw std::invalid_argument("detection_range: incomplete link budget");
  const double num = b.transmit_power_w * b.tx_gain * b.rx_gain * wavelength_m *
                     wavelength_m * rcs_m2;
  const double den = std::pow(4.0 * kPi, 3) * kBoltzmann * b.system_noise_temp_k *
                     b.noise_bandwidth_hz * b.system_losses *
                     db_to_linear(snr_required_db);
  return std::pow(num / den, 0.25);
}

// r1 = r0 * ((sigma1/sigma0) * (snr0/snr1))^(1/4)
inline double scale_range(double r0_m, double sigma0_m2, double snr0_db,
                          double sigma1_m2, double snr1_db) {
  if (r0_m <= 0.0 || sigma0_m2 <= 0.0 || sigma1_m2 <= 0.0)
    throw std::invalid_argument("scale_range: inputs must be > 0");
  const double ratio =
      (sigma1_m2 / sigma0_m2) * db_to_linear(snr0_db) / db_to_linear(snr1_db);
  return r0_m * std::pow(ratio, 0.25);
}

struct LatencyBudget {
  double drl_radar_ms = 0.0;
  double srl_eo_ms = 0.0;
  double rrl_eo_ms = 0.0;
  double t_com_ms = 0.0;
  double total_ms = 0.0;
};

inline LatencyBudget latency_budget(double drl_ms, double srl_ms, double rrl_ms,
                                    double t_com_ms) {
  if (drl_ms < 0.0 || srl_ms < 0.0 || rrl_ms < 0.0 || t_com_ms < 0.0)
    throw std::invalid_argument("latency_budget: components must be >= 0");
  return {drl_ms, srl_ms, rrl_ms, t_com_ms, drl_ms + srl_ms + rrl_ms + t_com_ms};
}

struct SensorResolution {
  double wavelength_m = 0.0;
  double aperture_m = 0.0;
  double angular_resolution_rad = 0.0;
};

inline double angular_resolution(double wavelength_m, double aperture_m) {
  if (wavelength_m <= 0.0 || aperture_m <= 0.0)
    throw std::invalid_argument("angular_resolution: inputs must be > 0");
  return 1.22 * wavelength_m / aperture_m;
}

inline SensorResolution sensor_resolution(double wavelength_m, double aperture_m) {
  return {wavelength_m, aperture_m, angular_resolution(wavelength_m, aperture_m)};
}

inline double alert_time(double range_m, double speed_mps) {
  if (speed_mps <= 0.0) throw std::invalid_argument("alert_time: speed must be > 0");
  if (range_m < 0.0) throw std::invalid_argument("alert_time: range must be >= 0");
  return range_m / speed_mps;
}

// ------------------------------------------------------------------ dwell sweep

struct DwellPoint {
  int pulses = 0;
  double cpi_ms = 0.0;
  double micro_body_ratio = 0.0;
  bool micro_detectable = false;
};

// Runs synthesis and feature extraction on the first bladed target across a
// list of CPI lengths. Detectability asks whether the spectral sideband
// detector fires outside the target's own body cell.
inline std::vector<DwellPoint> dwell_sweep(const Scenario& sc,
                                           const std::vector<int>& pulse_counts,
                                           const SynthOptions& synth_opt = {},
                                           const ClassifierConfig& cls = {},
                                           const DscrOptions& dscr = {}) {
  if (pulse_counts.empty())
    throw std::invalid_argument("dwell_sweep: pulse count list is empty");
  const TargetModel* bladed = nullptr;
  for (const TargetModel& t : sc.targets)
    if (!t.blade_sets.empty()) {
      bladed = &t;
      break;
    }
  if (bladed == nullptr)
    throw std::invalid_argument("dwell_sweep: scenario has no bladed target");

  std::vector<DwellPoint> rows;
  rows.reserve(pulse_counts.size());
  for (int np : pulse_counts) {
    if (np < 8) throw std::invalid_argument("dwell_sweep: pulse counts must be >= 8");
    Scenario run = sc;
    run.radar.pulses_per_cpi = np;

    const IqCube cube = synth_cpi(run, 0.0, synth_opt);
    const RangeDopplerMap map = range_doppler(cube, Window::Hann);

    const TargetState st = target_state_at(*bladed, run.radar, 0.0);
    const int rbin = static_cast<int>(std::floor(st.range_m / map.range_bin_size_m));
    if (rbin < 0 || rbin >= map.range_bins)
      throw std::invalid_argument("dwell_sweep: bladed target outside the range window");

    Detection det;
    det.range_bin = rbin;
    det.range_m = rbin * map.range_bin_size_m;
    det.t0 = cube.t0;

    const Spectrogram sg = spectrogram_at(cube, rbin);
    const FeatureVector f =
        extract_features(det, sg, map, run.radar, run.budget, cls);

    int body = 0;
    for (int d = 1; d < map.doppler_bins; ++d)
      if (map.at(rbin, d) > map.at(rbin, body)) body = d;
    bool detectable = false;
    for (const Detection& hit : dscr_detect(map, dscr))
      if (hit.range_bin == rbin && std::abs(hit.doppler_bin - body) > 1) {
        detectable = true;
        break;
      }

    DwellPoint row;
    row.pulses = np;
    row.cpi_ms = 1e3 * np / run.radar.prf_hz;
    row.micro_body_ratio = f.micro_body_ratio;
    row.micro_detectable = detectable;
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------- dwell adaption

struct DwellStep {
  double cpi_ms = 0.0;
  double ratio = 0.0;
};

// Multiplicative hill climb on the sideband/body ratio. The step factor is
// carried in the history itself (the spacing of the last two dwells); an
// improving move keeps it, a worsening move reverses and shrinks it halfway
// toward 1, so the sequence settles onto a unimodal optimum.
inline double adapt_dwell(const std::vector<DwellStep>& history) {
  if (history.empty()) throw std::invalid_argument("adapt_dwell: history is empty");
  const auto clamp = [](double cpi) { return std::min(200.0, std::max(1.0, cpi)); };

  const DwellStep& last = history.back();
  if (history.size() == 1) return clamp(last.cpi_ms * 1.5);

  const DwellStep& prev = history[history.size() - 2];
  if (last.cpi_ms == prev.cpi_ms) return clamp(last.cpi_ms);

  const bool went_up = last.cpi_ms > prev.cpi_ms;
  const double factor = went_up ? last.cpi_ms / prev.cpi_ms : prev.cpi_ms / last.cpi_ms;
  const bool improved = last.ratio > prev.ratio;
  if (improved) return clamp(went_up ? last.cpi_ms * factor : last.cpi_ms / factor);

  const double shrunk = 1.0 + 0.5 * (factor - 1.0);
  return clamp(went_up ? last.cpi_ms / shrunk : last.cpi_ms * shrunk);
}

}  // namespace lssradar
