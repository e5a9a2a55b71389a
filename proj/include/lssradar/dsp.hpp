#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "lssradar/fft.hpp"
#include "lssradar/synth.hpp"
#include "lssradar/units.hpp"

namespace lssradar {

enum class Window { Rect, Hann };

inline std::vector<double> window_taps(Window w, int n) {
  std::vector<double> taps(static_cast<std::size_t>(n), 1.0);
  if (w == Window::Hann)
    for (int i = 0; i < n; ++i)
      taps[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(kTwoPi * i / n);
  return taps;
}

struct RangeDopplerMap {
  int range_bins = 0;
  int doppler_bins = 0;
  double t0 = 0.0;
  double prf_hz = 0.0;
  double range_bin_size_m = 0.0;
  double wavelength_m = 0.0;
  double beam_azimuth_rad = 0.0;
  double noise_floor_db = 0.0;
  double coherent_gain_db = 0.0;  // on-bin SNR gain of the slow-time window
  std::vector<double> power;  // linear, range-major [r * doppler_bins + d]

  double& at(int r, int d) { return power[static_cast<std::size_t>(r) * doppler_bins + d]; }
  double at(int r, int d) const {
    return power[static_cast<std::size_t>(r) * doppler_bins + d];
  }
  double db(int r, int d) const { return linear_to_db(at(r, d) + 1e-300); }
  double doppler_bin_frequency(int d) const {
    return centered_bin_frequency(d, doppler_bins, prf_hz);
  }
  int zero_doppler_bin() const { return doppler_bins / 2; }
  double noise_floor_linear() const { return db_to_linear(noise_floor_db); }
};

// Median of exponentially distributed cell powers is mean * ln 2; the floor
// estimate inverts that so it tracks mean noise power while staying robust to
// targets occupying a few cells.
inline double noise_floor_from_powers(std::vector<double> powers) {
  if (powers.empty()) throw std::invalid_argument("noise floor: empty map");
  const std::size_t mid = powers.size() / 2;
  std::nth_element(powers.begin(), powers.begin() + static_cast<long>(mid), powers.end());
  const double median = powers[mid];
  return linear_to_db(median / std::log(2.0) + 1e-300);
}

// Doppler DFT along slow time, one transform per range bin, DC centered.
inline RangeDopplerMap range_doppler(const IqCube& cube, Window window = Window::Hann) {
  const int np = cube.pulses;
  const int nb = cube.range_bins;
  RangeDopplerMap map;
  map.range_bins = nb;
  map.doppler_bins = np;
  map.t0 = cube.t0;
  map.prf_hz = cube.prf_hz;
  map.range_bin_size_m = cube.range_bin_size_m;
  map.wavelength_m = cube.wavelength_m;
  map.beam_azimuth_rad = cube.beam_azimuth_rad;
  map.power.resize(static_cast<std::size_t>(nb) * np);

  const std::vector<double> taps = window_taps(window, np);
  double tap_sum = 0.0;
  double tap_sq = 0.0;
  for (double w : taps) {
    tap_sum += w;
    tap_sq += w * w;
  }
  map.coherent_gain_db = linear_to_db(tap_sum * tap_sum / tap_sq);
  std::vector<std::complex<double>> col(static_cast<std::size_t>(np));
  for (int r = 0; r < nb; ++r) {
    for (int p = 0; p < np; ++p)
      col[static_cast<std::size_t>(p)] = cube.at(p, r) * taps[static_cast<std::size_t>(p)];
    fft_forward(col.data(), np);
    fft_shift(col.data(), np);
    for (int d = 0; d < np; ++d) map.at(r, d) = std::norm(col[static_cast<std::size_t>(d)]);
  }
  map.noise_floor_db = noise_floor_from_powers(map.power);
  return map;
}

struct Spectrogram {
  int frames = 0;
  int freq_bins = 0;
  int window = 0;
  int hop = 0;
  int range_bin = -1;  // source range bin; -1 when built from a bare series
  double t0 = 0.0;
  double prf_hz = 0.0;
  std::vector<double> power;  // linear, frame-major [f * freq_bins + k]

  double at(int f, int k) const {
    return power[static_cast<std::size_t>(f) * freq_bins + k];
  }
  double frequency(int k) const { return centered_bin_frequency(k, freq_bins, prf_hz); }
  double frame_time(int f) const { return t0 + (f * hop + window / 2) / prf_hz; }
};

// Hann-windowed STFT of one slow-time series, zero-padded for finer bin
// spacing; frames = floor((n - window) / hop) + 1.
inline Spectrogram spectrogram(const std::vector<std::complex<double>>& series,
                               double prf_hz, double t0, int window, int hop,
                               int zero_pad = 4) {
  const int n = static_cast<int>(series.size());
  if (window < 2 || window > n) throw std::invalid_argument("spectrogram: bad window");
  if (hop < 1) throw std::invalid_argument("spectrogram: bad hop");
  if (zero_pad < 1) throw std::invalid_argument("spectrogram: bad zero_pad");

  Spectrogram sg;
  sg.window = window;
  sg.hop = hop;
  sg.t0 = t0;
  sg.prf_hz = prf_hz;
  sg.frames = (n - window) / hop + 1;
  sg.freq_bins = window * zero_pad;
  sg.power.resize(static_cast<std::size_t>(sg.frames) * sg.freq_bins);

  const std::vector<double> taps = window_taps(Window::Hann, window);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(sg.freq_bins));
  for (int f = 0; f < sg.frames; ++f) {
    std::fill(buf.begin(), buf.end(), std::complex<double>{});
    for (int i = 0; i < window; ++i)
      buf[static_cast<std::size_t>(i)] =
          series[static_cast<std::size_t>(f * hop + i)] * taps[static_cast<std::size_t>(i)];
    fft_forward(buf.data(), sg.freq_bins);
    fft_shift(buf.data(), sg.freq_bins);
    for (int k = 0; k < sg.freq_bins; ++k)
      sg.power[static_cast<std::size_t>(f) * sg.freq_bins + k] =
          std::norm(buf[static_cast<std::size_t>(k)]);
  }
  return sg;
}

// Slow-time series of one range bin, the spectrogram's usual input.
inline std::vector<std::complex<double>> range_bin_series(const IqCube& cube, int bin) {
  std::vector<std::complex<double>> s(static_cast<std::size_t>(cube.pulses));
  for (int p = 0; p < cube.pulses; ++p) s[static_cast<std::size_t>(p)] = cube.at(p, bin);
  return s;
}

// Spectrogram of one range bin with the defaults used by the pipeline:
// window = pulses/4, hop = window/2, 4x zero padding.
inline Spectrogram spectrogram_at(const IqCube& cube, int bin, int window = 0,
                                  int hop = 0, int zero_pad = 4) {
  if (bin < 0 || bin >= cube.range_bins)
    throw std::invalid_argument("spectrogram_at: range bin out of bounds");
  if (window <= 0) window = std::max(2, cube.pulses / 4);
  if (hop <= 0) hop = std::max(1, window / 2);
  Spectrogram sg = spectrogram(range_bin_series(cube, bin), cube.prf_hz, cube.t0,
                               window, hop, zero_pad);
  sg.range_bin = bin;
  return sg;
}

struct Resolutions {
  double range_m = 0.0;
  double doppler_hz = 0.0;
  double velocity_mps = 0.0;
};

inline Resolutions resolutions(const RadarParams& radar) {
  Resolutions r;
  r.range_m = kSpeedOfLight / (2.0 * radar.bandwidth_hz);
  r.doppler_hz = radar.prf_hz / radar.pulses_per_cpi;  // = 1 / CPI
  r.velocity_mps = r.doppler_hz * radar.wavelength_m / 2.0;
  return r;
}

// Doppler split between scatterers separated across-range on a rotating body.
inline double cross_range_separation(double delta_cross_range_m, double omega_rad_s,
                                     double wavelength_m) {
  return 2.0 * delta_cross_range_m * omega_rad_s / wavelength_m;
}

}  // namespace lssradar
