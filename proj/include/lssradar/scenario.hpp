#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lssradar/scattering.hpp"
#include "lssradar/units.hpp"

namespace lssradar {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RadarParams {
  double carrier_frequency_hz = 0.0;
  double wavelength_m = 0.0;
  double prf_hz = 0.0;
  int pulses_per_cpi = 0;
  double bandwidth_hz = 0.0;
  int range_bins = 0;
  double beam_azimuth_rad = 0.0;
  double scan_rate_rad_s = 0.0;
  Vec3 position_m{};

  double range_bin_size_m() const { return kSpeedOfLight / (2.0 * bandwidth_hz); }
  double cpi_seconds() const { return pulses_per_cpi / prf_hz; }
  double unambiguous_range_m() const { return kSpeedOfLight / (2.0 * prf_hz); }
  double beam_azimuth_at(double t) const {
    return wrap_angle(beam_azimuth_rad + scan_rate_rad_s * t);
  }
};

struct LinkBudget {
  double transmit_power_w = 0.0;
  double tx_gain = 0.0;   // linear
  double rx_gain = 0.0;   // linear
  double system_noise_temp_k = 0.0;
  double noise_bandwidth_hz = 0.0;
  double system_losses = 1.0;  // linear, >= 1
};

enum class BladePlane { Lifting, Puller };

struct BladeSet {
  int count = 2;
  double length_m = 0.0;
  double rate_rad_s = 0.0;
  BladePlane plane = BladePlane::Lifting;
  double phase_offset_rad = 0.0;
  double reflectivity_scale = 0.3;  // fraction of body RCS across the set
  double drift_per_s = 0.0;         // fractional rotation-rate drift
  int scatterers_per_blade = 8;
};

struct Appendage {
  double offset_m = 0.0;       // trailing distance behind the body
  double reflectivity = 0.0;   // fraction of body RCS
};

struct Waypoint {
  double t = 0.0;
  Vec3 position{};
};

struct TargetModel {
  std::string id;
  std::string category;  // truth label used for scoring, not by the pipeline
  double mean_rcs_m2 = 0.0;
  std::optional<double> sphere_radius_m;
  std::vector<Waypoint> waypoints;
  std::vector<BladeSet> blade_sets;
  double flap_rate_hz = 0.0;
  std::optional<Appendage> appendage;
};

struct ClutterParams {
  bool enabled = false;
  double clutter_to_noise_db = 0.0;
  double doppler_spread_mps = 0.0;
};

struct Scenario {
  RadarParams radar;
  LinkBudget budget;
  ClutterParams clutter;
  std::vector<TargetModel> targets;
  std::uint64_t noise_seed = 0;
};

struct TargetState {
  Vec3 position{};
  Vec3 velocity{};
  double radial_speed_mps = 0.0;  // positive toward the radar
  double range_m = 0.0;
  double azimuth_rad = 0.0;
};

struct LosAngles {
  double alpha = 0.0;  // in-plane angle of the LOS projection
  double beta = 0.0;   // angle between the LOS and the blade plane
  double cos_product() const { return std::cos(alpha) * std::cos(beta); }
};

// ---------------------------------------------------------------- kinematics

inline TargetState target_state_at(const TargetModel& target, const RadarParams& radar,
                                   double t) {
  const auto& wp = target.waypoints;
  Vec3 pos{};
  Vec3 vel{};
  if (wp.size() == 1 || t < wp.front().t) {
    pos = wp.front().position;
  } else if (t >= wp.back().t) {
    pos = wp.back().position;
  } else {
    for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
      if (t < wp[i + 1].t) {
        const double dt = wp[i + 1].t - wp[i].t;
        const double f = (t - wp[i].t) / dt;
        const Vec3 d = wp[i + 1].position - wp[i].position;
        pos = wp[i].position + d * f;
        vel = d * (1.0 / dt);
        break;
      }
    }
  }
  TargetState s;
  s.position = pos;
  s.velocity = vel;
  const Vec3 rel = pos - radar.position_m;
  s.range_m = rel.norm();
  s.azimuth_rad = std::atan2(rel.y, rel.x);
  if (s.range_m > 0.0) {
    const Vec3 u = rel * (1.0 / s.range_m);
    s.radial_speed_mps = -vel.dot(u);
  }
  return s;
}

// ------------------------------------------------------------- LOS geometry

// Lifting planes are horizontal; puller planes are vertical with their normal
// along the velocity vector (falls back to +x for a hovering target). alpha is
// measured from +x for lifting planes and from the up direction for pullers.
inline LosAngles los_geometry(const RadarParams& radar, const TargetState& state,
                              BladePlane plane) {
  const Vec3 rel = state.position - radar.position_m;
  const double range = rel.norm();
  if (range < 1e-9)
    throw ScenarioError("los_geometry: range is zero (los_defined)");
  const Vec3 u = rel * (1.0 / range);

  Vec3 n{0.0, 0.0, 1.0};
  Vec3 ref{1.0, 0.0, 0.0};
  if (plane == BladePlane::Puller) {
    const double vmag = state.velocity.norm();
    n = vmag > 1e-9 ? state.velocity * (1.0 / vmag) : Vec3{1.0, 0.0, 0.0};
    Vec3 up{0.0, 0.0, 1.0};
    ref = up - n * up.dot(n);
    if (ref.norm() < 1e-9) ref = Vec3{1.0, 0.0, 0.0} - n * n.x;
    ref = ref * (1.0 / ref.norm());
  }

  LosAngles a;
  const double s = std::clamp(u.dot(n), -1.0, 1.0);
  a.beta = std::asin(std::fabs(s));
  const Vec3 p = u - n * u.dot(n);
  if (p.norm() < 1e-12) {
    a.alpha = 0.0;  // LOS along the plane normal; in-plane angle degenerate
  } else {
    const Vec3 e2 = n.cross(ref);
    a.alpha = std::atan2(p.dot(e2), p.dot(ref));
  }
  return a;
}

// ------------------------------------------------------------------ JSON I/O

namespace detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what,
                              const std::string& invariant) {
  throw ScenarioError("scenario: " + where + ": " + what + " (" + invariant + ")");
}

inline int line_of_offset(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

inline double req_num(const nlohmann::json& j, const std::string& where,
                      const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    fail(where + "." + key, "missing or non-numeric", "required_field");
  return j[key].get<double>();
}

inline double opt_num(const nlohmann::json& j, const std::string& key, double dflt) {
  return j.contains(key) ? j[key].get<double>() : dflt;
}

}  // namespace detail

inline Scenario load_scenario(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("scenario: JSON parse error near line " +
                        std::to_string(detail::line_of_offset(text, e.byte)) + ": " +
                        e.what());
  }
  using detail::fail;
  using detail::opt_num;
  using detail::req_num;

  Scenario sc;
  if (!j.contains("radar")) fail("radar", "missing object", "required_field");
  const auto& jr = j["radar"];
  auto& r = sc.radar;
  r.carrier_frequency_hz = req_num(jr, "radar", "carrier_frequency_hz");
  if (r.carrier_frequency_hz <= 0.0)
    fail("radar.carrier_frequency_hz", "must be > 0", "carrier_positive");
  const double derived_wl = kSpeedOfLight / r.carrier_frequency_hz;
  r.wavelength_m = opt_num(jr, "wavelength_m", derived_wl);
  if (std::fabs(r.wavelength_m - derived_wl) > 1e-6 * derived_wl)
    fail("radar.wavelength_m", "inconsistent with carrier_frequency_hz",
         "wavelength_consistent");
  r.prf_hz = req_num(jr, "radar", "prf_hz");
  if (r.prf_hz <= 0.0) fail("radar.prf_hz", "must be > 0", "prf_positive");
  r.pulses_per_cpi = static_cast<int>(req_num(jr, "radar", "pulses_per_cpi"));
  if (r.pulses_per_cpi < 2)
    fail("radar.pulses_per_cpi", "must be >= 2", "pulses_per_cpi_min");
  r.bandwidth_hz = req_num(jr, "radar", "bandwidth_hz");
  if (r.bandwidth_hz <= 0.0) fail("radar.bandwidth_hz", "must be > 0", "bandwidth_positive");
  r.range_bins = static_cast<int>(req_num(jr, "radar", "range_bins"));
  if (r.range_bins < 1) fail("radar.range_bins", "must be >= 1", "range_bins_min");
  r.beam_azimuth_rad = opt_num(jr, "beam_azimuth_rad", 0.0);
  r.scan_rate_rad_s = opt_num(jr, "scan_rate_rad_s", 0.0);
  if (jr.contains("position_m")) {
    const auto& p = jr["position_m"];
    if (!p.is_array() || p.size() != 3)
      fail("radar.position_m", "must be [x,y,z]", "position_shape");
    r.position_m = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  }

  if (!j.contains("budget")) fail("budget", "missing object", "required_field");
  const auto& jb = j["budget"];
  auto& b = sc.budget;
  b.transmit_power_w = req_num(jb, "budget", "transmit_power_w");
  b.tx_gain = req_num(jb, "budget", "tx_gain");
  b.rx_gain = req_num(jb, "budget", "rx_gain");
  b.system_noise_temp_k = req_num(jb, "budget", "system_noise_temp_k");
  b.noise_bandwidth_hz = req_num(jb, "budget", "noise_bandwidth_hz");
  b.system_losses = req_num(jb, "budget", "system_losses");
  if (b.transmit_power_w <= 0 || b.tx_gain <= 0 || b.rx_gain <= 0 ||
      b.system_noise_temp_k <= 0 || b.noise_bandwidth_hz <= 0)
    fail("budget", "all budget terms must be > 0", "budget_positive");
  if (b.system_losses < 1.0)
    fail("budget.system_losses", "must be >= 1", "losses_at_least_unity");

  if (j.contains("clutter")) {
    const auto& jc = j["clutter"];
    sc.clutter.enabled = jc.value("enabled", true);
    sc.clutter.clutter_to_noise_db = opt_num(jc, "clutter_to_noise_db", 0.0);
    sc.clutter.doppler_spread_mps = opt_num(jc, "doppler_spread_mps", 0.0);
    if (sc.clutter.doppler_spread_mps < 0.0)
      fail("clutter.doppler_spread_mps", "must be >= 0", "spread_nonnegative");
  }

  sc.noise_seed = j.value("noise_seed", std::uint64_t{0});

  if (!j.contains("targets") || !j["targets"].is_array())
    fail("targets", "missing array", "required_field");
  std::set<std::string> ids;
  for (const auto& jt : j["targets"]) {
    TargetModel t;
    t.id = jt.value("id", "");
    const std::string where = "targets[" + t.id + "]";
    if (t.id.empty()) fail("targets[].id", "missing or empty", "id_nonempty");
    if (!ids.insert(t.id).second) fail(where + ".id", "duplicate id", "id_unique");
    t.category = jt.value("category", "Unknown");

    const bool has_rcs = jt.contains("rcs_m2");
    const bool has_sphere = jt.contains("sphere_radius_m");
    if (has_rcs == has_sphere)
      fail(where, "exactly one of rcs_m2 / sphere_radius_m required", "rcs_xor_sphere");
    if (has_sphere) {
      t.sphere_radius_m = req_num(jt, where, "sphere_radius_m");
      if (*t.sphere_radius_m <= 0.0)
        fail(where + ".sphere_radius_m", "must be > 0", "radius_positive");
      t.mean_rcs_m2 = sphere_rcs(*t.sphere_radius_m, r.wavelength_m);
    } else {
      t.mean_rcs_m2 = req_num(jt, where, "rcs_m2");
      if (t.mean_rcs_m2 <= 0.0) fail(where + ".rcs_m2", "must be > 0", "rcs_positive");
    }

    if (!jt.contains("waypoints") || !jt["waypoints"].is_array() ||
        jt["waypoints"].empty())
      fail(where + ".waypoints", "need at least one [t,x,y,z] row", "waypoints_min");
    double prev_t = -1e300;
    for (const auto& w : jt["waypoints"]) {
      if (!w.is_array() || w.size() != 4)
        fail(where + ".waypoints", "rows must be [t,x,y,z]", "waypoint_shape");
      Waypoint wp{w[0].get<double>(),
                  {w[1].get<double>(), w[2].get<double>(), w[3].get<double>()}};
      if (wp.t <= prev_t)
        fail(where + ".waypoints", "times must be strictly increasing",
             "waypoints_increasing");
      prev_t = wp.t;
      t.waypoints.push_back(wp);
    }

    if (jt.contains("blades")) {
      for (const auto& jbl : jt["blades"]) {
        BladeSet bs;
        bs.count = static_cast<int>(req_num(jbl, where + ".blades", "count"));
        if (bs.count < 1) fail(where + ".blades.count", "must be >= 1", "blade_count_min");
        bs.length_m = req_num(jbl, where + ".blades", "length_m");
        if (bs.length_m <= 0.0)
          fail(where + ".blades.length_m", "must be > 0", "blade_length_positive");
        const double rate_hz = req_num(jbl, where + ".blades", "rate_hz");
        if (rate_hz < 0.0) fail(where + ".blades.rate_hz", "must be >= 0", "rate_nonnegative");
        bs.rate_rad_s = rate_hz * kTwoPi;
        const std::string plane = jbl.value("plane", "lifting");
        if (plane == "lifting") {
          bs.plane = BladePlane::Lifting;
        } else if (plane == "puller") {
          bs.plane = BladePlane::Puller;
        } else {
          fail(where + ".blades.plane", "must be lifting|puller", "plane_enum");
        }
        bs.phase_offset_rad = opt_num(jbl, "phase_offset_rad", 0.0);
        bs.reflectivity_scale = opt_num(jbl, "reflectivity_scale", 0.3);
        if (bs.reflectivity_scale <= 0.0 || bs.reflectivity_scale > 1.0)
          fail(where + ".blades.reflectivity_scale", "must be in (0, 1]",
               "reflectivity_range");
        bs.drift_per_s = opt_num(jbl, "drift_per_s", 0.0);
        bs.scatterers_per_blade =
            static_cast<int>(opt_num(jbl, "scatterers_per_blade", 8));
        if (bs.scatterers_per_blade < 1)
          fail(where + ".blades.scatterers_per_blade", "must be >= 1",
               "scatterers_min");
        t.blade_sets.push_back(bs);
      }
    }

    t.flap_rate_hz = opt_num(jt, "flap_rate_hz", 0.0);
    if (t.flap_rate_hz < 0.0)
      fail(where + ".flap_rate_hz", "must be >= 0", "flap_nonnegative");

    if (jt.contains("appendage")) {
      const auto& ja = jt["appendage"];
      Appendage ap;
      ap.offset_m = req_num(ja, where + ".appendage", "offset_m");
      ap.reflectivity = req_num(ja, where + ".appendage", "reflectivity");
      if (ap.offset_m <= 0.0)
        fail(where + ".appendage.offset_m", "must be > 0", "appendage_offset_positive");
      if (ap.reflectivity <= 0.0 || ap.reflectivity > 1.0)
        fail(where + ".appendage.reflectivity", "must be in (0, 1]",
             "appendage_reflectivity_range");
      t.appendage = ap;
    }
    sc.targets.push_back(std::move(t));
  }
  return sc;
}

inline std::string serialize_scenario(const Scenario& sc) {
  nlohmann::ordered_json j;
  const auto& r = sc.radar;
  j["radar"] = {{"carrier_frequency_hz", r.carrier_frequency_hz},
                {"wavelength_m", r.wavelength_m},
                {"prf_hz", r.prf_hz},
                {"pulses_per_cpi", r.pulses_per_cpi},
                {"bandwidth_hz", r.bandwidth_hz},
                {"range_bins", r.range_bins},
                {"beam_azimuth_rad", r.beam_azimuth_rad},
                {"scan_rate_rad_s", r.scan_rate_rad_s},
                {"position_m", {r.position_m.x, r.position_m.y, r.position_m.z}}};
  const auto& b = sc.budget;
  j["budget"] = {{"transmit_power_w", b.transmit_power_w},
                 {"tx_gain", b.tx_gain},
                 {"rx_gain", b.rx_gain},
                 {"system_noise_temp_k", b.system_noise_temp_k},
                 {"noise_bandwidth_hz", b.noise_bandwidth_hz},
                 {"system_losses", b.system_losses}};
  j["clutter"] = {{"enabled", sc.clutter.enabled},
                  {"clutter_to_noise_db", sc.clutter.clutter_to_noise_db},
                  {"doppler_spread_mps", sc.clutter.doppler_spread_mps}};
  j["noise_seed"] = sc.noise_seed;
  j["targets"] = nlohmann::ordered_json::array();
  for (const auto& t : sc.targets) {
    nlohmann::ordered_json jt;
    jt["id"] = t.id;
    jt["category"] = t.category;
    if (t.sphere_radius_m) {
      jt["sphere_radius_m"] = *t.sphere_radius_m;
    } else {
      jt["rcs_m2"] = t.mean_rcs_m2;
    }
    jt["waypoints"] = nlohmann::ordered_json::array();
    for (const auto& w : t.waypoints)
      jt["waypoints"].push_back({w.t, w.position.x, w.position.y, w.position.z});
    jt["blades"] = nlohmann::ordered_json::array();
    for (const auto& bs : t.blade_sets) {
      jt["blades"].push_back(
          {{"count", bs.count},
           {"length_m", bs.length_m},
           {"rate_hz", bs.rate_rad_s / kTwoPi},
           {"plane", bs.plane == BladePlane::Lifting ? "lifting" : "puller"},
           {"phase_offset_rad", bs.phase_offset_rad},
           {"reflectivity_scale", bs.reflectivity_scale},
           {"drift_per_s", bs.drift_per_s},
           {"scatterers_per_blade", bs.scatterers_per_blade}});
    }
    jt["flap_rate_hz"] = t.flap_rate_hz;
    if (t.appendage)
      jt["appendage"] = {{"offset_m", t.appendage->offset_m},
                         {"reflectivity", t.appendage->reflectivity}};
    j["targets"].push_back(jt);
  }
  return j.dump(2) + "\n";
}

}  // namespace lssradar
