#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "lssradar/atr.hpp"
#include "lssradar/detect.hpp"

namespace lssradar {

struct TrackState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

struct Track {
  int id = 0;
  TrackState state;
  double last_update_t = 0.0;
  int misses = 0;
  std::vector<TracePoint> points;
  std::vector<TargetCategory> per_scan_labels;
  TargetCategory fused_label;
  std::vector<double> drt_history_ms;
};

inline void predict_xy(const Track& tr, double t, double& x, double& y) {
  const double dt = t - tr.last_update_t;
  x = tr.state.x + tr.state.vx * dt;
  y = tr.state.y + tr.state.vy * dt;
}

inline void detection_xy(const Detection& det, double& x, double& y) {
  x = det.range_m * std::cos(det.beam_azimuth_rad);
  y = det.range_m * std::sin(det.beam_azimuth_rad);
}

// ----------------------------------------------------------------- labelling

// Majority vote over the most recent `window` labels; ties go to the kind seen
// most recently; the returned confidence is the winning share of the window.
inline TargetCategory tai_label(const std::vector<TargetCategory>& labels,
                                int window = 10) {
  if (labels.empty()) return {CategoryKind::Unknown, 0.0};
  const std::size_t n = labels.size();
  const std::size_t start = n > static_cast<std::size_t>(window)
                                ? n - static_cast<std::size_t>(window)
                                : 0;
  std::map<CategoryKind, int> counts;
  std::map<CategoryKind, std::size_t> last_seen;
  for (std::size_t i = start; i < n; ++i) {
    ++counts[labels[i].kind];
    last_seen[labels[i].kind] = i;
  }
  CategoryKind best = labels.back().kind;
  int best_count = 0;
  std::size_t best_recent = 0;
  for (const auto& [kind, count] : counts) {
    // An unclassified scan is an abstention, not a vote against the others.
    if (kind == CategoryKind::Unknown && counts.size() > 1) continue;
    const std::size_t recent = last_seen[kind];
    if (count > best_count || (count == best_count && recent > best_recent)) {
      best = kind;
      best_count = count;
      best_recent = recent;
    }
  }
  // The hybrid call subsumes the plain multirotor one: its propulsor comb
  // fades in and out with aspect, so steady repeats outrank a bare majority.
  if (best == CategoryKind::MultiRotorDrone) {
    const auto it = counts.find(CategoryKind::VtolHybridDrone);
    if (it != counts.end() &&
        5 * it->second >= 2 * static_cast<int>(n - start))
      best = CategoryKind::VtolHybridDrone;
  }
  return {best, static_cast<double>(best_count) / static_cast<double>(n - start)};
}

inline void record_label(Track& tr, const TargetCategory& label, int tai_window = 10) {
  tr.per_scan_labels.push_back(label);
  tr.fused_label = tai_label(tr.per_scan_labels, tai_window);
}

// ---------------------------------------------------------------- estimation

// g-h filter step: extrapolate, then blend the position residual into the
// position (gain g) and velocity (gain h / dt) states.
inline Track gh_update(Track tr, const Detection& det, double g, double h, double dt) {
  if (!(g >= 0.0 && g <= 1.0)) throw std::invalid_argument("gh_update: g must be in [0, 1]");
  if (!(h >= 0.0 && h <= 2.0)) throw std::invalid_argument("gh_update: h must be in [0, 2]");
  if (!(dt > 0.0)) throw std::invalid_argument("gh_update: dt must be > 0");

  const double px = tr.state.x + tr.state.vx * dt;
  const double py = tr.state.y + tr.state.vy * dt;
  double mx = 0.0, my = 0.0;
  detection_xy(det, mx, my);
  const double rx = mx - px;
  const double ry = my - py;
  tr.state.x = px + g * rx;
  tr.state.y = py + g * ry;
  tr.state.vx += (h / dt) * rx;
  tr.state.vy += (h / dt) * ry;
  tr.last_update_t = det.t0;
  return tr;
}

// ---------------------------------------------------------------- assignment

struct Association {
  std::vector<std::pair<int, int>> assigned;  // (detection index, track index)
  std::vector<int> unassigned_detections;
  std::vector<int> unassigned_tracks;
};

// Greedy nearest-neighbor gating on predicted positions. Candidate pairs are
// ranked globally by distance before committing, so the result does not depend
// on the order detections or tracks arrive in.
inline Association associate(const std::vector<Detection>& detections,
                             const std::vector<Track>& tracks, double gate_radius_m) {
  if (!(gate_radius_m > 0.0))
    throw std::invalid_argument("associate: gate radius must be > 0");

  std::vector<std::tuple<double, int, int>> candidates;
  for (int di = 0; di < static_cast<int>(detections.size()); ++di) {
    double dx = 0.0, dy = 0.0;
    detection_xy(detections[static_cast<std::size_t>(di)], dx, dy);
    for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti) {
      double px = 0.0, py = 0.0;
      predict_xy(tracks[static_cast<std::size_t>(ti)],
                 detections[static_cast<std::size_t>(di)].t0, px, py);
      const double dist = std::hypot(dx - px, dy - py);
      if (dist <= gate_radius_m) candidates.emplace_back(dist, di, ti);
    }
  }
  std::sort(candidates.begin(), candidates.end());

  Association out;
  std::vector<bool> det_used(detections.size(), false);
  std::vector<bool> trk_used(tracks.size(), false);
  for (const auto& [dist, di, ti] : candidates) {
    (void)dist;
    if (det_used[static_cast<std::size_t>(di)] || trk_used[static_cast<std::size_t>(ti)])
      continue;
    det_used[static_cast<std::size_t>(di)] = true;
    trk_used[static_cast<std::size_t>(ti)] = true;
    out.assigned.emplace_back(di, ti);
  }
  for (int di = 0; di < static_cast<int>(detections.size()); ++di)
    if (!det_used[static_cast<std::size_t>(di)]) out.unassigned_detections.push_back(di);
  for (int ti = 0; ti < static_cast<int>(tracks.size()); ++ti)
    if (!trk_used[static_cast<std::size_t>(ti)]) out.unassigned_tracks.push_back(ti);
  return out;
}

// ------------------------------------------------------------------ lifecycle

struct TrackerOptions {
  double gate_radius_m = 50.0;
  double g = 0.5;
  double h = 0.1;
  int max_misses = 3;  // retire after more than this many consecutive misses
  double spawn_exclusion_m = 30.0;
  int tai_window = 10;
};

struct TrackStore {
  std::vector<Track> tracks;
  int next_id = 1;
};

// One frame of track maintenance: associate, filter, label, spawn, retire.
// Returns the track id each detection ended up in, index-aligned with the
// detections argument.
inline std::vector<int> advance_tracks(TrackStore& store,
                                       const std::vector<Detection>& detections,
                                       const std::vector<TargetCategory>& labels,
                                       double frame_drt_ms,
                                       const TrackerOptions& opt = {}) {
  if (labels.size() != detections.size())
    throw std::invalid_argument("advance_tracks: one label per detection required");

  const Association assoc = associate(detections, store.tracks, opt.gate_radius_m);
  std::vector<int> det_track_ids(detections.size(), -1);

  for (const auto& [di, ti] : assoc.assigned) {
    Track& tr = store.tracks[static_cast<std::size_t>(ti)];
    const Detection& det = detections[static_cast<std::size_t>(di)];
    const double dt = det.t0 - tr.last_update_t;
    if (dt > 0.0) tr = gh_update(std::move(tr), det, opt.g, opt.h, dt);
    tr.misses = 0;
    tr.points.push_back(
        {det.t0, tr.state.x, tr.state.y, std::hypot(tr.state.vx, tr.state.vy)});
    record_label(tr, labels[static_cast<std::size_t>(di)], opt.tai_window);
    tr.drt_history_ms.push_back(frame_drt_ms);
    det_track_ids[static_cast<std::size_t>(di)] = tr.id;
  }

  for (int ti : assoc.unassigned_tracks)
    ++store.tracks[static_cast<std::size_t>(ti)].misses;

  for (int di : assoc.unassigned_detections) {
    const Detection& det = detections[static_cast<std::size_t>(di)];
    // A leftover detection hugging a live track is a split return off the same
    // body, not a second target; spawning here would shadow the real track.
    double dx = 0.0, dy = 0.0;
    detection_xy(det, dx, dy);
    bool shadowed = false;
    for (const Track& tr : store.tracks)
      if (std::hypot(tr.state.x - dx, tr.state.y - dy) < opt.spawn_exclusion_m) {
        shadowed = true;
        break;
      }
    if (shadowed) continue;
    Track tr;
    tr.id = store.next_id++;
    detection_xy(det, tr.state.x, tr.state.y);
    // Approaching targets carry positive radial speed; seed the velocity along
    // the line of sight until a second update pins the heading.
    tr.state.vx = -det.radial_speed_mps * std::cos(det.beam_azimuth_rad);
    tr.state.vy = -det.radial_speed_mps * std::sin(det.beam_azimuth_rad);
    tr.last_update_t = det.t0;
    tr.points.push_back({det.t0, tr.state.x, tr.state.y, std::abs(det.radial_speed_mps)});
    record_label(tr, labels[static_cast<std::size_t>(di)], opt.tai_window);
    tr.drt_history_ms.push_back(frame_drt_ms);
    det_track_ids[static_cast<std::size_t>(di)] = tr.id;
    store.tracks.push_back(std::move(tr));
  }

  store.tracks.erase(std::remove_if(store.tracks.begin(), store.tracks.end(),
                                    [&](const Track& tr) {
                                      return tr.misses > opt.max_misses;
                                    }),
                     store.tracks.end());
  return det_track_ids;
}

// --------------------------------------------------------------- DRT account

struct StageStamp {
  std::string stage;
  double t_ms = 0.0;
};

struct DrtBreakdown {
  std::vector<StageStamp> stages;
  std::vector<double> deltas_ms;  // stage-to-stage lags
  double drt_ms = 0.0;            // display minus echo
};

inline DrtBreakdown drt_accounting(const std::vector<StageStamp>& stamps) {
  if (stamps.empty()) throw std::invalid_argument("drt_accounting: no stage stamps");
  for (std::size_t i = 1; i < stamps.size(); ++i)
    if (stamps[i].t_ms < stamps[i - 1].t_ms)
      throw std::invalid_argument("drt_accounting: stage timestamps must be monotone (" +
                                  stamps[i].stage + " precedes " + stamps[i - 1].stage +
                                  ")");
  DrtBreakdown out;
  out.stages = stamps;
  for (std::size_t i = 1; i < stamps.size(); ++i)
    out.deltas_ms.push_back(stamps[i].t_ms - stamps[i - 1].t_ms);
  out.drt_ms = stamps.back().t_ms - stamps.front().t_ms;
  return out;
}

// -------------------------------------------------------------- frame output

struct ClassifiedDetection {
  Detection detection;
  TargetCategory category;
  FeatureVector features;
  int track_id = -1;
};

struct FramePicture {
  int frame_index = 0;
  double t0 = 0.0;
  std::vector<ClassifiedDetection> detections;
  std::vector<Track> tracks;
  DrtBreakdown timing;
  double drt_ms = 0.0;
};

}  // namespace lssradar
