#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lssradar/detect.hpp"
#include "lssradar/dsp.hpp"
#include "lssradar/scenario.hpp"
#include "lssradar/synth.hpp"
#include "lssradar/units.hpp"

namespace lssradar {

enum class CategoryKind {
  MultiRotorDrone,
  FixedWingDrone,
  VtolHybridDrone,
  LargeBird,
  SmallBird,
  Vehicle,
  Ship,
  Helicopter,
  Pedestrian,
  Clutter,
  Unknown,
};

inline std::string to_string(CategoryKind k) {
  switch (k) {
    case CategoryKind::MultiRotorDrone: return "multi_rotor_drone";
    case CategoryKind::FixedWingDrone: return "fixed_wing_drone";
    case CategoryKind::VtolHybridDrone: return "vtol_hybrid_drone";
    case CategoryKind::LargeBird: return "large_bird";
    case CategoryKind::SmallBird: return "small_bird";
    case CategoryKind::Vehicle: return "vehicle";
    case CategoryKind::Ship: return "ship";
    case CategoryKind::Helicopter: return "helicopter";
    case CategoryKind::Pedestrian: return "pedestrian";
    case CategoryKind::Clutter: return "clutter";
    case CategoryKind::Unknown: return "unknown";
  }
  return "unknown";
}

inline CategoryKind category_from_string(const std::string& s) {
  static const std::map<std::string, CategoryKind> names{
      {"multi_rotor_drone", CategoryKind::MultiRotorDrone},
      {"fixed_wing_drone", CategoryKind::FixedWingDrone},
      {"vtol_hybrid_drone", CategoryKind::VtolHybridDrone},
      {"large_bird", CategoryKind::LargeBird},
      {"small_bird", CategoryKind::SmallBird},
      {"vehicle", CategoryKind::Vehicle},
      {"ship", CategoryKind::Ship},
      {"helicopter", CategoryKind::Helicopter},
      {"pedestrian", CategoryKind::Pedestrian},
      {"clutter", CategoryKind::Clutter},
      {"unknown", CategoryKind::Unknown},
  };
  const auto it = names.find(s);
  return it == names.end() ? CategoryKind::Unknown : it->second;
}

struct TargetCategory {
  CategoryKind kind = CategoryKind::Unknown;
  double confidence = 0.0;
};

struct FeatureVector {
  double body_speed_mps = 0.0;
  double rcs_estimate_m2 = 0.0;
  double micro_body_ratio = 0.0;   // sideband energy above the gate / body energy
  bool md_present = false;
  double md_bandwidth_hz = 0.0;    // spectral support beyond the body line
  double jem_spacing_hz = 0.0;     // 0 unless >= 3 lines agree on one interval
  int jem_line_count = 0;
  double rotation_rate_estimate_hz = 0.0;
  int blade_count_estimate = 0;    // 0 = unknown
  double blade_length_estimate_m = 0.0;  // lower bound, unit geometry factor
  double flap_rate_estimate_hz = 0.0;
  bool appendage_flag = false;
  // Band structure of the sidebands; drives the lifting/puller split.
  double far_band_ratio = 0.0;
  double near_band_ratio = 0.0;
  double near_band_spacing_hz = 0.0;  // comb interval inside the near band
  int near_band_line_count = 0;
  int near_band_gap_bins = 0;  // median spacing of gated bins near the body
  double frame_ratio_cv = 0.0;  // sideband/body flicker across STFT frames
};

struct KineticFeatures {
  double mean_speed_mps = 0.0;
  double speed_variance = 0.0;
  double heading_change_rate_rad_s = 0.0;
  double acceleration_mps2 = 0.0;
  double track_duration_s = 0.0;
};

struct TracePoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
};

// ------------------------------------------------------------- configuration

struct ClassifierConfig {
  double md_min_ratio = 0.01;
  double md_min_zscore = 4.0;
  double band_gate_db = 8.0;
  double far_band_min_offset_hz = 600.0;
  double far_band_min_ratio = 0.05;
  double near_band_min_ratio = 0.02;
  int puller_min_lines = 3;
  int puller_min_gap_bins = 2;
  double puller_min_spacing_hz = 25.0;
  double puller_max_spacing_hz = 120.0;
  double rotation_min_hz = 40.0;
  int default_blade_count = 2;
  double flap_max_hz = 20.0;
  double bird_max_bandwidth_hz = 250.0;
  double appendage_min_fraction = 0.12;
  int appendage_span_bins = 8;
  double ship_min_rcs_m2 = 10.0;
  double ship_max_speed_mps = 12.0;
  double helicopter_min_blade_length_m = 1.0;
  double helicopter_min_bandwidth_hz = 2500.0;
  int notch_halfwidth_bins = 2;
  double lifting_min_ratio_cv = 0.35;
  double puller_max_ratio_cv = 0.25;
};

inline ClassifierConfig classifier_config_from_json(const nlohmann::json& j) {
  ClassifierConfig c;
  auto num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number())
      throw std::runtime_error(std::string("classifier config: ") + key +
                               " must be a number");
    out = j[key].get<double>();
  };
  auto integer = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer())
      throw std::runtime_error(std::string("classifier config: ") + key +
                               " must be an integer");
    out = j[key].get<int>();
  };
  num("md_min_ratio", c.md_min_ratio);
  num("md_min_zscore", c.md_min_zscore);
  num("band_gate_db", c.band_gate_db);
  num("far_band_min_offset_hz", c.far_band_min_offset_hz);
  num("far_band_min_ratio", c.far_band_min_ratio);
  num("near_band_min_ratio", c.near_band_min_ratio);
  integer("puller_min_lines", c.puller_min_lines);
  integer("puller_min_gap_bins", c.puller_min_gap_bins);
  num("puller_min_spacing_hz", c.puller_min_spacing_hz);
  num("puller_max_spacing_hz", c.puller_max_spacing_hz);
  num("rotation_min_hz", c.rotation_min_hz);
  integer("default_blade_count", c.default_blade_count);
  num("flap_max_hz", c.flap_max_hz);
  num("bird_max_bandwidth_hz", c.bird_max_bandwidth_hz);
  num("appendage_min_fraction", c.appendage_min_fraction);
  integer("appendage_span_bins", c.appendage_span_bins);
  num("ship_min_rcs_m2", c.ship_min_rcs_m2);
  num("ship_max_speed_mps", c.ship_max_speed_mps);
  num("helicopter_min_blade_length_m", c.helicopter_min_blade_length_m);
  num("helicopter_min_bandwidth_hz", c.helicopter_min_bandwidth_hz);
  integer("notch_halfwidth_bins", c.notch_halfwidth_bins);
  num("lifting_min_ratio_cv", c.lifting_min_ratio_cv);
  num("puller_max_ratio_cv", c.puller_max_ratio_cv);
  if (c.default_blade_count < 1)
    throw std::runtime_error("classifier config: default_blade_count must be >= 1");
  if (c.md_min_ratio < 0.0 || c.flap_max_hz <= 0.0)
    throw std::runtime_error("classifier config: thresholds must be non-negative");
  return c;
}

inline ClassifierConfig load_classifier_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("classifier config: ") + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("classifier config: expected an object");
  return classifier_config_from_json(j);
}

inline std::string serialize_classifier_config(const ClassifierConfig& c) {
  nlohmann::ordered_json j;
  j["md_min_ratio"] = c.md_min_ratio;
  j["md_min_zscore"] = c.md_min_zscore;
  j["band_gate_db"] = c.band_gate_db;
  j["far_band_min_offset_hz"] = c.far_band_min_offset_hz;
  j["far_band_min_ratio"] = c.far_band_min_ratio;
  j["near_band_min_ratio"] = c.near_band_min_ratio;
  j["puller_min_lines"] = c.puller_min_lines;
  j["puller_min_gap_bins"] = c.puller_min_gap_bins;
  j["puller_min_spacing_hz"] = c.puller_min_spacing_hz;
  j["puller_max_spacing_hz"] = c.puller_max_spacing_hz;
  j["rotation_min_hz"] = c.rotation_min_hz;
  j["default_blade_count"] = c.default_blade_count;
  j["flap_max_hz"] = c.flap_max_hz;
  j["bird_max_bandwidth_hz"] = c.bird_max_bandwidth_hz;
  j["appendage_min_fraction"] = c.appendage_min_fraction;
  j["appendage_span_bins"] = c.appendage_span_bins;
  j["ship_min_rcs_m2"] = c.ship_min_rcs_m2;
  j["ship_max_speed_mps"] = c.ship_max_speed_mps;
  j["helicopter_min_blade_length_m"] = c.helicopter_min_blade_length_m;
  j["helicopter_min_bandwidth_hz"] = c.helicopter_min_bandwidth_hz;
  j["notch_halfwidth_bins"] = c.notch_halfwidth_bins;
  j["lifting_min_ratio_cv"] = c.lifting_min_ratio_cv;
  j["puller_max_ratio_cv"] = c.puller_max_ratio_cv;
  return j.dump(2) + "\n";
}

// ------------------------------------------------------------ line structure

struct JemEstimate {
  double spacing_hz = 0.0;
  int line_count = 0;  // comb members when validated, else 1 or 0
};

// Equally spaced spectral lines: peaks at least 6 dB over the floor, spacing
// accepted when at least three of them agree on the interval to within a bin.
inline JemEstimate jem_line_spacing(const std::vector<double>& power,
                                    double bin_spacing_hz,
                                    double noise_floor_linear) {
  JemEstimate est;
  const int n = static_cast<int>(power.size());
  if (n < 8 || bin_spacing_hz <= 0.0 || noise_floor_linear <= 0.0) return est;

  const double gate = noise_floor_linear * db_to_linear(6.0);
  std::vector<int> peaks;
  for (int i = 0; i < n; ++i) {
    if (power[static_cast<std::size_t>(i)] < gate) continue;
    bool is_peak = true;
    for (int k = std::max(0, i - 2); k <= std::min(n - 1, i + 2) && is_peak; ++k) {
      if (k != i && power[static_cast<std::size_t>(k)] > power[static_cast<std::size_t>(i)])
        is_peak = false;
    }
    if (is_peak) peaks.push_back(i);
  }

  if (peaks.size() < 3) {
    est.line_count = peaks.empty() ? 0 : 1;
    return est;
  }

  std::vector<double> gaps;
  for (std::size_t i = 1; i < peaks.size(); ++i)
    gaps.push_back(static_cast<double>(peaks[i] - peaks[i - 1]));
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  const double median =
      m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);

  int agreeing = 0;
  for (double g : gaps)
    if (std::abs(g - median) <= 1.0) ++agreeing;
  if (agreeing < 2) {
    est.line_count = 1;
    return est;
  }
  est.spacing_hz = median * bin_spacing_hz;
  est.line_count = agreeing + 1;
  return est;
}

// L = f_excursion * lambda / (omega * cos(alpha) * cos(beta)); the excursion is
// the one-sided Doppler reach of the blade-tip line.
inline double invert_blade_length(double peak_excursion_hz, double rotation_rate_rad_s,
                                  double wavelength_m, double alpha_rad,
                                  double beta_rad) {
  if (rotation_rate_rad_s <= 0.0)
    throw std::invalid_argument("invert_blade_length: rotation rate must be > 0");
  if (wavelength_m <= 0.0)
    throw std::invalid_argument("invert_blade_length: wavelength must be > 0");
  if (peak_excursion_hz < 0.0)
    throw std::invalid_argument("invert_blade_length: excursion must be >= 0");
  const double geom = std::cos(alpha_rad) * std::cos(beta_rad);
  if (std::abs(geom) < 1e-9)
    throw std::domain_error("invert_blade_length: geometry unobservable");
  return peak_excursion_hz * wavelength_m / (rotation_rate_rad_s * std::abs(geom));
}

// ------------------------------------------------------------ trace features

inline KineticFeatures kinetic_features(const std::vector<TracePoint>& points) {
  if (points.size() < 3)
    throw std::invalid_argument("kinetic_features: insufficient trace (need 3 points)");
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].t <= points[i - 1].t)
      throw std::invalid_argument("kinetic_features: times must be strictly increasing");

  const std::size_t ns = points.size() - 1;
  std::vector<double> speed(ns);
  std::vector<double> heading(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    const double dt = points[i + 1].t - points[i].t;
    const double dx = points[i + 1].x - points[i].x;
    const double dy = points[i + 1].y - points[i].y;
    speed[i] = std::hypot(dx, dy) / dt;
    heading[i] = std::atan2(dy, dx);
  }

  KineticFeatures k;
  for (double v : speed) k.mean_speed_mps += v;
  k.mean_speed_mps /= static_cast<double>(ns);
  for (double v : speed) k.speed_variance += (v - k.mean_speed_mps) * (v - k.mean_speed_mps);
  k.speed_variance /= static_cast<double>(ns);

  double rate_sum = 0.0;
  double accel_sum = 0.0;
  for (std::size_t i = 0; i + 1 < ns; ++i) {
    const double dt = 0.5 * (points[i + 2].t - points[i].t);
    rate_sum += std::abs(wrap_angle(heading[i + 1] - heading[i])) / dt;
    accel_sum += std::abs(speed[i + 1] - speed[i]) / dt;
  }
  k.heading_change_rate_rad_s = rate_sum / static_cast<double>(ns - 1);
  k.acceleration_mps2 = accel_sum / static_cast<double>(ns - 1);
  k.track_duration_s = points.back().t - points.front().t;
  return k;
}

// --------------------------------------------------------- feature extraction

namespace detail {

inline double invert_rcs(const LinkBudget& b, double wavelength_m,
                         double single_pulse_snr_db, double range_m) {
  if (range_m <= 0.0) return 0.0;
  const double num = std::pow(4.0 * kPi, 3) * kBoltzmann * b.system_noise_temp_k *
                     b.noise_bandwidth_hz * b.system_losses * std::pow(range_m, 4.0);
  const double den = b.transmit_power_w * b.tx_gain * b.rx_gain *
                     wavelength_m * wavelength_m;
  return db_to_linear(single_pulse_snr_db) * num / den;
}

// Power of the body line summed per STFT frame over a band wide enough to hold
// any frequency modulation, so wander does not masquerade as amplitude change.
inline std::vector<double> body_line_sequence(const Spectrogram& sg, double f_body_hz,
                                              double halfwidth_hz) {
  std::vector<double> s(static_cast<std::size_t>(sg.frames), 0.0);
  for (int f = 0; f < sg.frames; ++f) {
    double sum = 0.0;
    for (int k = 0; k < sg.freq_bins; ++k)
      if (std::abs(sg.frequency(k) - f_body_hz) <= halfwidth_hz) sum += sg.at(f, k);
    s[static_cast<std::size_t>(f)] = sum;
  }
  return s;
}

inline double flap_rate_from_sequence(const std::vector<double>& s, double frame_rate_hz,
                                      double flap_max_hz) {
  const int n = static_cast<int>(s.size());
  if (n < 16 || frame_rate_hz <= 0.0) return 0.0;
  const double duration = n / frame_rate_hz;
  if (duration < 2.0 / flap_max_hz) return 0.0;

  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= n;

  double best_mag = 0.0;
  double best_hz = 0.0;
  std::vector<double> mags;
  for (double f = 0.5; f <= flap_max_hz + 1e-9; f += 0.125) {
    std::complex<double> acc{};
    for (int i = 0; i < n; ++i) {
      const double ph = -kTwoPi * f * i / frame_rate_hz;
      acc += (s[static_cast<std::size_t>(i)] - mean) *
             std::complex<double>(std::cos(ph), std::sin(ph));
    }
    const double mag = std::abs(acc);
    mags.push_back(mag);
    if (mag > best_mag) {
      best_mag = mag;
      best_hz = f;
    }
  }
  std::nth_element(mags.begin(), mags.begin() + static_cast<long>(mags.size() / 2),
                   mags.end());
  const double median = mags[mags.size() / 2];
  return best_mag > 4.0 * median ? best_hz : 0.0;
}

}  // namespace detail

// Signature features of one detection, from its range bin's Doppler spectrum
// (the map row) and STFT. Band energies are noise-floor-subtracted and only
// counted where significant, so they stay near zero on bladeless targets.
inline FeatureVector extract_features(const Detection& det, const Spectrogram& sg,
                                      const RangeDopplerMap& map,
                                      const RadarParams& radar,
                                      const LinkBudget& budget,
                                      const ClassifierConfig& cfg = {}) {
  if (det.range_bin < 0 || det.range_bin >= map.range_bins)
    throw std::out_of_range("extract_features: detection range bin outside map");
  if (sg.range_bin != det.range_bin)
    throw std::invalid_argument(
        "extract_features: spectrogram is for range bin " +
        std::to_string(sg.range_bin) + " but the detection is in bin " +
        std::to_string(det.range_bin));

  const int nd = map.doppler_bins;
  const double bin_hz = map.prf_hz / nd;
  const double floor_lin = map.noise_floor_linear();
  const int dc = map.zero_doppler_bin();

  std::vector<double> row(static_cast<std::size_t>(nd));
  for (int d = 0; d < nd; ++d) row[static_cast<std::size_t>(d)] = map.at(det.range_bin, d);

  int body = 0;
  for (int d = 1; d < nd; ++d)
    if (row[static_cast<std::size_t>(d)] > row[static_cast<std::size_t>(body)]) body = d;
  const double f_body = map.doppler_bin_frequency(body);

  FeatureVector f;
  f.body_speed_mps = f_body * map.wavelength_m / 2.0;

  const double measured_snr_db = map.db(det.range_bin, body) - map.noise_floor_db;
  f.rcs_estimate_m2 = detail::invert_rcs(
      budget, radar.wavelength_m, measured_snr_db - map.coherent_gain_db, det.range_m);

  const auto in_notch = [&](int d) { return std::abs(d - dc) <= cfg.notch_halfwidth_bins; };
  const auto in_body = [&](int d) { return std::abs(d - body) <= 1; };

  double e_body = 0.0;
  for (int d = std::max(0, body - 1); d <= std::min(nd - 1, body + 1); ++d)
    e_body += row[static_cast<std::size_t>(d)] - floor_lin;
  e_body = std::max(e_body, 1e-300);

  const double gate = floor_lin * db_to_linear(cfg.band_gate_db);
  double e_out = 0.0, e_gated = 0.0, e_far = 0.0, e_near = 0.0;
  int n_out = 0, n_far = 0, n_near = 0;
  double zf_num = 0.0, zn_num = 0.0;
  std::vector<char> gated(static_cast<std::size_t>(nd), 0);
  for (int d = 0; d < nd; ++d) {
    if (in_body(d) || in_notch(d)) continue;
    const double p = row[static_cast<std::size_t>(d)];
    const double ex = p - floor_lin;
    const double off = std::abs(map.doppler_bin_frequency(d) - f_body);
    e_out += ex;
    ++n_out;
    const bool far = off >= cfg.far_band_min_offset_hz;
    if (far) {
      zf_num += ex;
      ++n_far;
    } else {
      zn_num += ex;
      ++n_near;
    }
    if (p > gate) {
      gated[static_cast<std::size_t>(d)] = 1;
      e_gated += ex;
      if (far)
        e_far += ex;
      else
        e_near += ex;
    }
  }

  const JemEstimate jem = jem_line_spacing(row, bin_hz, floor_lin);
  f.jem_spacing_hz = jem.spacing_hz;
  f.jem_line_count = jem.line_count;
  // Comb interval inside the near band alone: a propeller's tight line set
  // survives here even when wide-excursion lifting lines dominate the far band.
  {
    int lo = nd, hi = -1;
    for (int d = 0; d < nd; ++d) {
      if (std::abs(map.doppler_bin_frequency(d) - f_body) < cfg.far_band_min_offset_hz) {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }
    if (hi - lo + 1 >= 8) {
      std::vector<double> near_band(row.begin() + lo, row.begin() + hi + 1);
      const JemEstimate nb = jem_line_spacing(near_band, bin_hz, floor_lin);
      f.near_band_spacing_hz = nb.spacing_hz;
      f.near_band_line_count = nb.line_count;
    }
  }
  // Bandwidth as the reach of the gated band that stays connected to the
  // body line: the walk outward tolerates gaps up to the row's own comb
  // interval, so a line set chains to its edge while an isolated noise bin
  // beyond the band cannot extend it.
  {
    std::vector<int> near_gated;
    for (int d = 0; d < nd; ++d)
      if (gated[static_cast<std::size_t>(d)] &&
          std::abs(map.doppler_bin_frequency(d) - f_body) < cfg.far_band_min_offset_hz)
        near_gated.push_back(d);
    int median_gap = 0;
    if (near_gated.size() >= 2) {
      std::vector<int> diffs(near_gated.size() - 1);
      for (std::size_t i = 1; i < near_gated.size(); ++i)
        diffs[i - 1] = near_gated[i] - near_gated[i - 1];
      const auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
      std::nth_element(diffs.begin(), mid, diffs.end());
      median_gap = *mid;
    }
    f.near_band_gap_bins = median_gap;
    const double comb_hz = std::max(f.jem_spacing_hz, f.near_band_spacing_hz);
    const int gap_bins = std::min(
        std::max({3, static_cast<int>(std::ceil(1.25 * comb_hz / bin_hz)),
                  2 * median_gap}),
        nd / 8);
    for (const int step : {-1, +1}) {
      int last = body;
      for (int d = body + step; d >= 0 && d < nd; d += step) {
        if (std::abs(d - last) > gap_bins) break;
        if (!gated[static_cast<std::size_t>(d)]) continue;
        last = d;
        const double off = std::abs(map.doppler_bin_frequency(d) - f_body);
        if (off > f.md_bandwidth_hz) f.md_bandwidth_hz = off;
      }
    }
  }
  if (jem.spacing_hz > 0.0) {
    f.blade_count_estimate = cfg.default_blade_count;
    f.rotation_rate_estimate_hz = jem.spacing_hz / f.blade_count_estimate;
    if (f.md_bandwidth_hz > 0.0)
      f.blade_length_estimate_m = invert_blade_length(
          f.md_bandwidth_hz, kTwoPi * f.rotation_rate_estimate_hz, radar.wavelength_m,
          0.0, 0.0);
  }

  const double z_out = n_out > 0 ? e_out / (std::sqrt(double(n_out)) * floor_lin) : 0.0;
  const double z_far = n_far > 0 ? zf_num / (std::sqrt(double(n_far)) * floor_lin) : 0.0;
  const double z_near = n_near > 0 ? zn_num / (std::sqrt(double(n_near)) * floor_lin) : 0.0;

  f.micro_body_ratio = std::max(0.0, e_gated) / e_body;
  const double z_best = std::max({z_out, z_far, z_near});
  f.md_present = f.micro_body_ratio >= cfg.md_min_ratio && z_best >= cfg.md_min_zscore;
  if (z_far >= cfg.md_min_zscore) f.far_band_ratio = std::max(0.0, e_far) / e_body;
  if (z_near >= cfg.md_min_zscore) f.near_band_ratio = std::max(0.0, e_near) / e_body;



  // Trailing appendage: a scatterer that holds station in Doppler while the
  // body line wanders with the flap cycle. A qualifying frequency bin stays
  // above the gate in every short-time frame yet sits clear of the dominant
  // line in most of them; a lone wandering line leaves no such bin, and a
  // steady bladeless return is its own dominant line everywhere.
  if (sg.frames >= 3) {
    const double sg_floor = noise_floor_from_powers(sg.power);
    const double natural_bin_hz = sg.prf_hz / sg.window;
    const double span_hz =
        std::max(cfg.appendage_span_bins * bin_hz,
                 f.md_bandwidth_hz + 2.0 * natural_bin_hz);
    std::vector<int> in_span;
    for (int k = 0; k < sg.freq_bins; ++k)
      if (std::abs(sg.frequency(k) - f_body) <= span_hz) in_span.push_back(k);

    std::vector<double> argmax_hz(static_cast<std::size_t>(sg.frames));
    std::vector<double> gate_fr(static_cast<std::size_t>(sg.frames));
    for (int fr = 0; fr < sg.frames; ++fr) {
      double peak = 0.0, peak_hz = 0.0;
      for (int k : in_span)
        if (sg.at(fr, k) > peak) {
          peak = sg.at(fr, k);
          peak_hz = sg.frequency(k);
        }
      argmax_hz[static_cast<std::size_t>(fr)] = peak_hz;
      gate_fr[static_cast<std::size_t>(fr)] =
          std::max(sg_floor * db_to_linear(cfg.band_gate_db),
                   cfg.appendage_min_fraction * peak);
    }
    for (int k : in_span) {
      bool always_on = true;
      int clear = 0;
      for (int fr = 0; fr < sg.frames; ++fr) {
        if (sg.at(fr, k) < gate_fr[static_cast<std::size_t>(fr)]) {
          always_on = false;
          break;
        }
        if (std::abs(sg.frequency(k) - argmax_hz[static_cast<std::size_t>(fr)]) >
            1.2 * natural_bin_hz)
          ++clear;
      }
      if (always_on && clear >= (2 * sg.frames + 4) / 5) {
        f.appendage_flag = true;
        break;
      }
    }
  }

  // Flap: amplitude modulation of the body line across STFT frames.
  if (sg.frames >= 2) {
    const double natural_bin_hz = sg.prf_hz / sg.window;
    const double halfwidth =
        std::max(f.md_bandwidth_hz, natural_bin_hz) + natural_bin_hz;
    const std::vector<double> seq = detail::body_line_sequence(sg, f_body, halfwidth);
    f.flap_rate_estimate_hz =
        detail::flap_rate_from_sequence(seq, sg.prf_hz / sg.hop, cfg.flap_max_hz);

    // Per-frame sideband/body flicker: blade flashes make it ragged, a steady
    // propeller keeps it flat.
    const double notch_hz = cfg.notch_halfwidth_bins * bin_hz;
    std::vector<double> ratios;
    for (int fr = 0; fr < sg.frames; ++fr) {
      double b = 0.0, o = 0.0;
      for (int k = 0; k < sg.freq_bins; ++k) {
        const double fk = sg.frequency(k);
        if (std::abs(fk) <= notch_hz && std::abs(f_body) > notch_hz) continue;
        if (std::abs(fk - f_body) <= natural_bin_hz)
          b += sg.at(fr, k);
        else
          o += sg.at(fr, k);
      }
      if (b > 0.0) ratios.push_back(o / b);
    }
    if (ratios.size() >= 2) {
      double mean = 0.0;
      for (double r : ratios) mean += r;
      mean /= static_cast<double>(ratios.size());
      double var = 0.0;
      for (double r : ratios) var += (r - mean) * (r - mean);
      var /= static_cast<double>(ratios.size());
      if (mean > 0.0) f.frame_ratio_cv = std::sqrt(var) / mean;
    }
  }

  return f;
}

// ------------------------------------------------------------- rule tree

// Deterministic rule tree over the signature features; confidence is the
// fraction of fired rules that voted for the winning category.
inline TargetCategory classify(const FeatureVector& f,
                               const std::optional<KineticFeatures>& k = std::nullopt,
                               const ClassifierConfig& cfg = {}) {
  const bool puller_comb = f.near_band_spacing_hz >= cfg.puller_min_spacing_hz &&
                           f.near_band_spacing_hz <= cfg.puller_max_spacing_hz &&
                           f.near_band_line_count >= cfg.puller_min_lines &&
                           f.near_band_gap_bins >= cfg.puller_min_gap_bins &&
                           f.near_band_ratio >= cfg.near_band_min_ratio;
  const bool puller = f.md_present && puller_comb;

  // A whole-row comb interval below the rotor floor argues against lifting
  // rotors unless a propeller comb explains it.
  bool lifting = f.md_present && f.far_band_ratio >= cfg.far_band_min_ratio;
  if (lifting && !puller && f.rotation_rate_estimate_hz > 0.0 &&
      f.rotation_rate_estimate_hz < cfg.rotation_min_hz)
    lifting = false;

  const bool heli_length =
      f.blade_length_estimate_m > cfg.helicopter_min_blade_length_m;
  const bool heli_span =
      f.md_present && f.md_bandwidth_hz >= cfg.helicopter_min_bandwidth_hz;
  const bool bird = f.md_present && !lifting && !puller && f.md_bandwidth_hz > 0.0 &&
                    f.md_bandwidth_hz <= cfg.bird_max_bandwidth_hz;
  const bool flapper = f.flap_rate_estimate_hz > 0.0 &&
                       f.flap_rate_estimate_hz <= cfg.flap_max_hz;
  const bool ship = !f.md_present && f.rcs_estimate_m2 >= cfg.ship_min_rcs_m2 &&
                    std::abs(f.body_speed_mps) <= cfg.ship_max_speed_mps;
  const bool ship_kinetic = k.has_value() && !f.md_present &&
                            f.rcs_estimate_m2 >= cfg.ship_min_rcs_m2 &&
                            k->mean_speed_mps <= cfg.ship_max_speed_mps;

  CategoryKind kind = CategoryKind::Unknown;
  if (heli_length || heli_span)
    kind = CategoryKind::Helicopter;
  else if (lifting && puller)
    kind = CategoryKind::VtolHybridDrone;
  else if (lifting)
    kind = CategoryKind::MultiRotorDrone;
  else if (puller)
    kind = CategoryKind::FixedWingDrone;
  else if (bird)
    kind = f.appendage_flag ? CategoryKind::LargeBird : CategoryKind::SmallBird;
  else if (ship || ship_kinetic)
    kind = CategoryKind::Ship;

  if (kind == CategoryKind::Unknown) return {CategoryKind::Unknown, 0.0};

  const CategoryKind drone_kind = lifting && puller ? CategoryKind::VtolHybridDrone
                                  : lifting         ? CategoryKind::MultiRotorDrone
                                                    : CategoryKind::FixedWingDrone;
  const CategoryKind bird_kind =
      f.appendage_flag ? CategoryKind::LargeBird : CategoryKind::SmallBird;

  std::map<CategoryKind, int> votes;
  int total = 0;
  const auto vote = [&](bool fired, CategoryKind c) {
    if (!fired) return;
    ++votes[c];
    ++total;
  };
  vote(heli_length, CategoryKind::Helicopter);
  vote(heli_span, CategoryKind::Helicopter);
  vote(lifting, drone_kind);
  vote(puller, drone_kind);
  vote(lifting && f.jem_spacing_hz > 0.0 &&
           f.rotation_rate_estimate_hz >= cfg.rotation_min_hz,
       drone_kind);
  vote(lifting && f.frame_ratio_cv >= cfg.lifting_min_ratio_cv, drone_kind);
  vote(puller && !lifting && f.frame_ratio_cv > 0.0 &&
           f.frame_ratio_cv <= cfg.puller_max_ratio_cv,
       drone_kind);
  vote(bird, bird_kind);
  vote(bird && flapper, bird_kind);
  vote(ship, CategoryKind::Ship);
  vote(ship_kinetic, CategoryKind::Ship);

  return {kind, total > 0 ? static_cast<double>(votes[kind]) / total : 0.0};
}

}  // namespace lssradar
