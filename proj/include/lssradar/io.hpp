#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lssradar/atr.hpp"
#include "lssradar/detect.hpp"
#include "lssradar/dsp.hpp"
#include "lssradar/synth.hpp"
#include "lssradar/track.hpp"
#include "lssradar/tradestudy.hpp"

namespace lssradar {

// Six significant digits everywhere a number leaves the library.
inline std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace detail

// ------------------------------------------------------------------ CSV writers

inline void write_detections_csv(std::ostream& out,
                                 const std::vector<Detection>& dets) {
  out << "t0,beam_az,range_m,speed_mps,snr_db,dscr_db,detector\n";
  for (const Detection& d : dets) {
    out << fmt6(d.t0) << ',' << fmt6(d.beam_azimuth_rad) << ',' << fmt6(d.range_m)
        << ',' << fmt6(d.radial_speed_mps) << ',' << fmt6(d.snr_db) << ',';
    if (d.dscr_db) out << fmt6(*d.dscr_db);
    out << ',' << to_string(d.detector) << '\n';
  }
}

inline void write_tracks_csv_header(std::ostream& out) {
  out << "frame,t,track_id,x,y,speed,category,confidence,drt_ms\n";
}

inline void write_tracks_csv_rows(std::ostream& out, const FramePicture& frame) {
  for (const Track& tr : frame.tracks) {
    const double speed = std::hypot(tr.state.vx, tr.state.vy);
    out << frame.frame_index << ',' << fmt6(frame.t0) << ',' << tr.id << ','
        << fmt6(tr.state.x) << ',' << fmt6(tr.state.y) << ',' << fmt6(speed) << ','
        << to_string(tr.fused_label.kind) << ',' << fmt6(tr.fused_label.confidence)
        << ',' << fmt6(frame.drt_ms) << '\n';
  }
}

inline void write_classifications_csv_header(std::ostream& out) {
  out << "track_id,t,category,confidence,body_speed_mps,rcs_estimate_m2,"
         "micro_body_ratio,md_present,md_bandwidth_hz,jem_spacing_hz,"
         "jem_line_count,rotation_rate_estimate_hz,blade_count_estimate,"
         "blade_length_estimate_m,flap_rate_estimate_hz,appendage_flag\n";
}

inline void write_classification_csv_row(std::ostream& out, int track_id, double t,
                                         const TargetCategory& cat,
                                         const FeatureVector& f) {
  out << track_id << ',' << fmt6(t) << ',' << to_string(cat.kind) << ','
      << fmt6(cat.confidence) << ',' << fmt6(f.body_speed_mps) << ','
      << fmt6(f.rcs_estimate_m2) << ',' << fmt6(f.micro_body_ratio) << ','
      << (f.md_present ? 1 : 0) << ',' << fmt6(f.md_bandwidth_hz) << ','
      << fmt6(f.jem_spacing_hz) << ',' << f.jem_line_count << ','
      << fmt6(f.rotation_rate_estimate_hz) << ',' << f.blade_count_estimate << ','
      << fmt6(f.blade_length_estimate_m) << ',' << fmt6(f.flap_rate_estimate_hz)
      << ',' << (f.appendage_flag ? 1 : 0) << '\n';
}

inline void write_sweep_csv(std::ostream& out, const std::vector<DwellPoint>& rows) {
  out << "cpi_ms,micro_body_ratio,micro_detectable\n";
  for (const DwellPoint& r : rows)
    out << fmt6(r.cpi_ms) << ',' << fmt6(r.micro_body_ratio) << ','
        << (r.micro_detectable ? 1 : 0) << '\n';
}

// ---------------------------------------------------------------- frame stream

inline nlohmann::ordered_json frame_to_json(const FramePicture& frame) {
  nlohmann::ordered_json j;
  j["frame"] = frame.frame_index;
  j["t0"] = frame.t0;
  j["drt_ms"] = frame.drt_ms;

  nlohmann::ordered_json dets = nlohmann::ordered_json::array();
  for (const ClassifiedDetection& cd : frame.detections) {
    nlohmann::ordered_json d;
    d["track_id"] = cd.track_id;
    d["range_m"] = cd.detection.range_m;
    d["speed_mps"] = cd.detection.radial_speed_mps;
    d["snr_db"] = cd.detection.snr_db;
    if (cd.detection.dscr_db) d["dscr_db"] = *cd.detection.dscr_db;
    d["detector"] = to_string(cd.detection.detector);
    d["category"] = to_string(cd.category.kind);
    d["confidence"] = cd.category.confidence;
    dets.push_back(std::move(d));
  }
  j["detections"] = std::move(dets);

  nlohmann::ordered_json trks = nlohmann::ordered_json::array();
  for (const Track& tr : frame.tracks) {
    nlohmann::ordered_json t;
    t["id"] = tr.id;
    t["x"] = tr.state.x;
    t["y"] = tr.state.y;
    t["vx"] = tr.state.vx;
    t["vy"] = tr.state.vy;
    t["misses"] = tr.misses;
    t["category"] = to_string(tr.fused_label.kind);
    t["confidence"] = tr.fused_label.confidence;
    trks.push_back(std::move(t));
  }
  j["tracks"] = std::move(trks);

  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < frame.timing.stages.size(); ++i) {
    nlohmann::ordered_json s;
    s["stage"] = frame.timing.stages[i].stage;
    s["t_ms"] = frame.timing.stages[i].t_ms;
    stages.push_back(std::move(s));
  }
  j["timing"] = std::move(stages);
  return j;
}

inline void write_frame_jsonl(std::ostream& out, const FramePicture& frame) {
  out << frame_to_json(frame).dump() << '\n';
}

// ------------------------------------------------------------- matrix products

// CSV with an axis header row and an axis leader column; values in dB.
inline void write_rd_map_csv(std::ostream& out, const RangeDopplerMap& map) {
  out << "range_m\\doppler_hz";
  for (int d = 0; d < map.doppler_bins; ++d)
    out << ',' << fmt6(map.doppler_bin_frequency(d));
  out << '\n';
  for (int r = 0; r < map.range_bins; ++r) {
    out << fmt6(r * map.range_bin_size_m);
    for (int d = 0; d < map.doppler_bins; ++d) out << ',' << fmt6(map.db(r, d));
    out << '\n';
  }
}

inline void write_spectrogram_csv(std::ostream& out, const Spectrogram& sg) {
  out << "t_s\\freq_hz";
  for (int k = 0; k < sg.freq_bins; ++k) out << ',' << fmt6(sg.frequency(k));
  out << '\n';
  for (int f = 0; f < sg.frames; ++f) {
    out << fmt6(sg.frame_time(f));
    for (int k = 0; k < sg.freq_bins; ++k)
      out << ',' << fmt6(linear_to_db(std::max(sg.at(f, k), 1e-300)));
    out << '\n';
  }
}

namespace detail {

// 16-bit big-endian P5, dB-domain, normalized floor -> 0, peak -> 65535.
inline void write_pgm16(std::ostream& out, int rows, int cols,
                        const std::vector<double>& db_row_major) {
  double lo = db_row_major.empty() ? 0.0 : db_row_major[0];
  double hi = lo;
  for (double v : db_row_major) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P5\n" << cols << ' ' << rows << "\n65535\n";
  for (double v : db_row_major) {
    const double unit = (v - lo) / span;
    const auto level = static_cast<std::uint16_t>(std::lround(unit * 65535.0));
    const char bytes[2] = {static_cast<char>(level >> 8),
                           static_cast<char>(level & 0xff)};
    out.write(bytes, 2);
  }
}

}  // namespace detail

inline void write_rd_map_pgm(std::ostream& out, const RangeDopplerMap& map) {
  std::vector<double> db(static_cast<std::size_t>(map.range_bins) * map.doppler_bins);
  for (int r = 0; r < map.range_bins; ++r)
    for (int d = 0; d < map.doppler_bins; ++d)
      db[static_cast<std::size_t>(r) * map.doppler_bins + d] = map.db(r, d);
  detail::write_pgm16(out, map.range_bins, map.doppler_bins, db);
}

inline void write_spectrogram_pgm(std::ostream& out, const Spectrogram& sg) {
  std::vector<double> db(static_cast<std::size_t>(sg.frames) * sg.freq_bins);
  for (int f = 0; f < sg.frames; ++f)
    for (int k = 0; k < sg.freq_bins; ++k)
      db[static_cast<std::size_t>(f) * sg.freq_bins + k] =
          linear_to_db(std::max(sg.at(f, k), 1e-300));
  detail::write_pgm16(out, sg.frames, sg.freq_bins, db);
}

// --------------------------------------------------------------- raw IQ dumps

// Interleaved re,im float32 little-endian, pulse-major, with a JSON sidecar
// describing the axes.
inline void write_cube_f32(const std::string& path, const IqCube& cube) {
  std::ofstream raw = detail::open_out(path, true);
  std::vector<float> buf;
  buf.reserve(cube.data.size() * 2);
  for (const std::complex<double>& z : cube.data) {
    buf.push_back(static_cast<float>(z.real()));
    buf.push_back(static_cast<float>(z.imag()));
  }
  raw.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!raw) throw std::runtime_error("cannot write " + path);

  nlohmann::ordered_json meta;
  meta["pulses"] = cube.pulses;
  meta["range_bins"] = cube.range_bins;
  meta["t0"] = cube.t0;
  meta["prf_hz"] = cube.prf_hz;
  meta["range_bin_size_m"] = cube.range_bin_size_m;
  meta["wavelength_m"] = cube.wavelength_m;
  meta["beam_azimuth_rad"] = cube.beam_azimuth_rad;
  meta["dtype"] = "complex64-interleaved-le";
  meta["layout"] = "pulse-major";
  std::ofstream side = detail::open_out(path + ".json");
  side << meta.dump(2) << '\n';
}

}  // namespace lssradar
