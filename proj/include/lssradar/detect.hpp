#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lssradar/dsp.hpp"
#include "lssradar/units.hpp"

namespace lssradar {

// Single-pulse SNR a nonfluctuating target needs for better-than-even and for
// 95% detection; also the thresholds of the fixed-threshold detector mode.
inline constexpr double kSnrDetect50Db = 13.1;
inline constexpr double kSnrDetect95Db = 16.8;

enum class DetectorKind { Snr, Dscr };

inline std::string to_string(DetectorKind k) {
  return k == DetectorKind::Snr ? "snr" : "dscr";
}

struct Detection {
  int range_bin = 0;
  int doppler_bin = 0;
  double range_m = 0.0;
  double radial_speed_mps = 0.0;
  double snr_db = 0.0;
  std::optional<double> dscr_db;
  double t0 = 0.0;
  double beam_azimuth_rad = 0.0;
  DetectorKind detector = DetectorKind::Snr;
};

inline double measure_snr(const RangeDopplerMap& map, int range_bin, int doppler_bin) {
  return map.db(range_bin, doppler_bin) - map.noise_floor_db;
}

struct CfarOptions {
  double pfa = 1e-5;
  int guard = 2;
  int train = 16;                  // total training cells, split across both sides
  int notch_halfwidth_bins = -1;   // exclude |doppler - DC| <= this; <0 disables
  bool merge_local_maxima = true;
};

struct DscrOptions {
  double threshold_db = 3.0;
  int notch_halfwidth_bins = 2;  // clutter estimation zone around zero Doppler
  bool merge_local_maxima = true;
};

namespace detail {

inline bool is_local_max(const RangeDopplerMap& map, int r, int d) {
  const double v = map.at(r, d);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dd = -1; dd <= 1; ++dd) {
      if (dr == 0 && dd == 0) continue;
      const int rr = r + dr;
      const int cc = d + dd;
      if (rr < 0 || rr >= map.range_bins || cc < 0 || cc >= map.doppler_bins) continue;
      if (map.at(rr, cc) > v) return false;
    }
  }
  return true;
}

inline Detection make_detection(const RangeDopplerMap& map, int r, int d,
                                DetectorKind kind) {
  Detection det;
  det.range_bin = r;
  det.doppler_bin = d;
  det.range_m = r * map.range_bin_size_m;
  det.radial_speed_mps = map.doppler_bin_frequency(d) * map.wavelength_m / 2.0;
  det.snr_db = measure_snr(map, r, d);
  det.t0 = map.t0;
  det.beam_azimuth_rad = map.beam_azimuth_rad;
  det.detector = kind;
  return det;
}

}  // namespace detail

// Cell-averaging CFAR, training along range at fixed Doppler. Near the map
// edges the window shrinks and the scale factor is recomputed from the cells
// actually available, keeping the per-cell false-alarm rate at pfa.
inline std::vector<Detection> cfar_detect(const RangeDopplerMap& map,
                                          const CfarOptions& opt = {}) {
  if (!(opt.pfa > 0.0 && opt.pfa < 1.0))
    throw std::invalid_argument("cfar_detect: pfa must be in (0, 1)");
  if (opt.train < 4) throw std::invalid_argument("cfar_detect: train must be >= 4");
  if (opt.guard < 0) throw std::invalid_argument("cfar_detect: guard must be >= 0");

  const int half = opt.train / 2;
  const int dc = map.zero_doppler_bin();
  std::vector<double> alpha_by_count(static_cast<std::size_t>(2 * half) + 1, 0.0);
  for (int n = 1; n <= 2 * half; ++n)
    alpha_by_count[static_cast<std::size_t>(n)] =
        n * (std::pow(opt.pfa, -1.0 / n) - 1.0);

  std::vector<Detection> hits;
  for (int d = 0; d < map.doppler_bins; ++d) {
    if (opt.notch_halfwidth_bins >= 0 && std::abs(d - dc) <= opt.notch_halfwidth_bins)
      continue;
    for (int r = 0; r < map.range_bins; ++r) {
      double sum = 0.0;
      int n = 0;
      for (int k = opt.guard + 1; k <= opt.guard + half; ++k) {
        if (r - k >= 0) {
          sum += map.at(r - k, d);
          ++n;
        }
        if (r + k < map.range_bins) {
          sum += map.at(r + k, d);
          ++n;
        }
      }
      if (n == 0) continue;
      if (map.at(r, d) > alpha_by_count[static_cast<std::size_t>(n)] * (sum / n)) {
        if (!opt.merge_local_maxima || detail::is_local_max(map, r, d))
          hits.push_back(detail::make_detection(map, r, d, DetectorKind::Snr));
      }
    }
  }
  return hits;
}

// Fixed-threshold detection against the estimated noise floor.
inline std::vector<Detection> fixed_threshold_detect(const RangeDopplerMap& map,
                                                     double threshold_db = kSnrDetect50Db,
                                                     int notch_halfwidth_bins = -1,
                                                     bool merge_local_maxima = true) {
  const int dc = map.zero_doppler_bin();
  std::vector<Detection> hits;
  for (int d = 0; d < map.doppler_bins; ++d) {
    if (notch_halfwidth_bins >= 0 && std::abs(d - dc) <= notch_halfwidth_bins) continue;
    for (int r = 0; r < map.range_bins; ++r) {
      if (measure_snr(map, r, d) > threshold_db) {
        if (!merge_local_maxima || detail::is_local_max(map, r, d))
          hits.push_back(detail::make_detection(map, r, d, DetectorKind::Snr));
      }
    }
  }
  return hits;
}

// Doppler-to-signal-clutter-ratio detector: compares cells outside the
// zero-Doppler notch against the clutter level measured inside it, per range
// bin. Catches rotor sidebands sitting above clutter that a fixed SNR
// threshold would reject.
inline std::vector<Detection> dscr_detect(const RangeDopplerMap& map,
                                          const DscrOptions& opt = {}) {
  if (opt.notch_halfwidth_bins < 0)
    throw std::invalid_argument("dscr_detect: notch_halfwidth_bins must be >= 0");
  const int dc = map.zero_doppler_bin();
  std::vector<Detection> hits;
  for (int r = 0; r < map.range_bins; ++r) {
    double clutter = 0.0;
    int n = 0;
    for (int d = dc - opt.notch_halfwidth_bins; d <= dc + opt.notch_halfwidth_bins; ++d) {
      if (d < 0 || d >= map.doppler_bins) continue;
      clutter += map.at(r, d);
      ++n;
    }
    if (n == 0) continue;
    const double clutter_db = linear_to_db(clutter / n + 1e-300);
    for (int d = 0; d < map.doppler_bins; ++d) {
      if (std::abs(d - dc) <= opt.notch_halfwidth_bins) continue;
      const double margin = map.db(r, d) - clutter_db;
      if (margin > opt.threshold_db) {
        if (!opt.merge_local_maxima || detail::is_local_max(map, r, d)) {
          Detection det = detail::make_detection(map, r, d, DetectorKind::Dscr);
          det.dscr_db = margin;
          hits.push_back(det);
        }
      }
    }
  }
  return hits;
}

}  // namespace lssradar
