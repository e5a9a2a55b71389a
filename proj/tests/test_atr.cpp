#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lssradar/atr.hpp"
#include "lssradar/detect.hpp"
#include "lssradar/dsp.hpp"
#include "lssradar/synth.hpp"
#include "support/fixtures.hpp"

using namespace lssradar;
using Catch::Approx;

namespace {

struct Probe {
  Detection detection;
  FeatureVector features;
  TargetCategory category;
};

Probe probe_target(const TargetModel& target, std::uint64_t seed, double t0 = 0.0,
                   std::optional<double> snr_override_db = std::nullopt) {
  Scenario sc = testing::reference_scenario(seed);
  sc.targets.push_back(target);
  SynthOptions opt;
  if (snr_override_db) opt.snr_override_db[target.id] = *snr_override_db;
  const IqCube cube = synth_cpi(sc, t0, opt);
  const RangeDopplerMap map = range_doppler(cube);
  const int want = static_cast<int>(
      std::floor(target_state_at(target, sc.radar, t0).range_m / 12.0));

  Probe p;
  double best = -1.0;
  for (const Detection& d : cfar_detect(map))
    if (std::abs(d.range_bin - want) <= 1 && d.snr_db > best) {
      best = d.snr_db;
      p.detection = d;
    }
  REQUIRE(best > 0.0);
  const Spectrogram sg = spectrogram_at(cube, p.detection.range_bin);
  p.features = extract_features(p.detection, sg, map, sc.radar, sc.budget);
  p.category = classify(p.features);
  return p;
}

TargetModel frozen_heron() {
  TargetModel t;
  t.id = "heron";
  t.category = "large_bird";
  t.mean_rcs_m2 = 0.08;
  t.flap_rate_hz = 4.0;
  t.appendage = Appendage{0.5, 0.4};
  t.waypoints = {{0.0, {448.0, 0.0, 40.0}}, {40.0, {48.0, 0.0, 40.0}}};
  return t;
}

TargetModel frozen_starling() {
  TargetModel t;
  t.id = "starling";
  t.category = "small_bird";
  t.mean_rcs_m2 = 0.02;
  t.flap_rate_hz = 7.0;
  t.waypoints = {{0.0, {379.0, 0.0, 30.0}}, {40.0, {59.0, 0.0, 30.0}}};
  return t;
}

TargetModel single_rotor(int blades, double length_m, double rate_hz) {
  TargetModel t = testing::point_target("rotor", 500.0, 10.0, 0.05);
  BladeSet bs;
  bs.count = blades;
  bs.length_m = length_m;
  bs.rate_rad_s = kTwoPi * rate_hz;
  bs.plane = BladePlane::Lifting;
  bs.reflectivity_scale = 0.5;
  bs.scatterers_per_blade = 16;
  t.blade_sets.push_back(bs);
  return t;
}

}  // namespace

TEST_CASE("comb interval estimator reads synthetic line sets") {
  const double bin_hz = 6400.0 / 384.0;
  std::vector<double> row(384, 1.0);
  for (int i = 60; i <= 60 + 9 * 12; i += 12) row[static_cast<std::size_t>(i)] = 50.0;

  const JemEstimate est = jem_line_spacing(row, bin_hz, 1.0);
  CHECK(est.spacing_hz == Approx(12.0 * bin_hz));
  CHECK(est.line_count == 10);

  SECTION("the estimate is scale invariant") {
    std::vector<double> loud = row;
    for (double& v : loud) v *= 1e6;
    const JemEstimate big = jem_line_spacing(loud, bin_hz, 1e6);
    CHECK(big.spacing_hz == Approx(est.spacing_hz));
    CHECK(big.line_count == est.line_count);
  }
  SECTION("fewer than three lines yields no interval") {
    std::vector<double> sparse(384, 1.0);
    sparse[100] = 50.0;
    sparse[150] = 50.0;
    const JemEstimate none = jem_line_spacing(sparse, bin_hz, 1.0);
    CHECK(none.spacing_hz == 0.0);
    CHECK(none.line_count == 1);
  }
  SECTION("degenerate inputs return the empty estimate") {
    CHECK(jem_line_spacing(std::vector<double>(4, 1.0), bin_hz, 1.0).line_count == 0);
    CHECK(jem_line_spacing(row, 0.0, 1.0).line_count == 0);
    CHECK(jem_line_spacing(row, bin_hz, 0.0).line_count == 0);
  }
}

TEST_CASE("rotor comb spacing tracks blade count times rotation rate") {
  const double bin_hz = 6400.0 / 384.0;
  for (int blades : {2, 3, 4}) {
    const Probe p = probe_target(single_rotor(blades, 0.10, 80.0), 8, 0.0, 3.0);
    CHECK(p.features.jem_spacing_hz == Approx(blades * 80.0).margin(bin_hz));
    CHECK(p.features.jem_line_count >= 3);
  }
}

TEST_CASE("blade length inverts from the doppler excursion") {
  SECTION("the algebra round-trips exactly") {
    const double L = 0.15;
    const double omega = kTwoPi * 40.0;
    const double excursion = (L / 0.03) * omega * std::cos(0.2) * std::cos(0.3);
    CHECK(invert_blade_length(excursion, omega, 0.03, 0.2, 0.3) == Approx(L));
  }
  SECTION("measured excursion recovers the true length within 15 percent") {
    const TargetModel rotor = single_rotor(3, 0.10, 80.0);
    const Probe p = probe_target(rotor, 8, 0.0, 3.0);
    const TargetState st = target_state_at(rotor, testing::reference_radar(), 0.0);
    const LosAngles los =
        los_geometry(testing::reference_radar(), st, BladePlane::Lifting);
    const double L = invert_blade_length(p.features.md_bandwidth_hz,
                                         kTwoPi * 80.0, 0.03, los.alpha, los.beta);
    CHECK(L == Approx(0.10).epsilon(0.15));
  }
  SECTION("invalid inputs are rejected") {
    CHECK_THROWS_AS(invert_blade_length(100.0, 0.0, 0.03, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(invert_blade_length(100.0, 10.0, 0.0, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(invert_blade_length(-1.0, 10.0, 0.03, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(invert_blade_length(100.0, 10.0, 0.03, kPi / 2.0, 0.0),
                    std::domain_error);
  }
}

TEST_CASE("kinetic features summarize a trace") {
  SECTION("circular orbit") {
    std::vector<TracePoint> pts;
    const double R = 100.0;
    const double omega = 0.05;
    for (int i = 0; i <= 60; ++i) {
      const double t = static_cast<double>(i);
      pts.push_back({t, R * std::cos(omega * t), R * std::sin(omega * t),
                     R * omega});
    }
    const KineticFeatures k = kinetic_features(pts);
    CHECK(k.mean_speed_mps == Approx(R * omega).epsilon(0.02));
    CHECK(k.heading_change_rate_rad_s == Approx(omega).epsilon(0.02));
    CHECK(k.speed_variance < 1e-6);
    CHECK(k.acceleration_mps2 < 1e-3);
    CHECK(k.track_duration_s == Approx(60.0));
  }
  SECTION("straight run has no turning") {
    std::vector<TracePoint> pts;
    for (int i = 0; i < 10; ++i)
      pts.push_back({static_cast<double>(i), 5.0 * i, 0.0, 5.0});
    const KineticFeatures k = kinetic_features(pts);
    CHECK(k.mean_speed_mps == Approx(5.0));
    CHECK(k.heading_change_rate_rad_s == Approx(0.0).margin(1e-12));
  }
  SECTION("insufficient or disordered traces are rejected") {
    CHECK_THROWS_AS(kinetic_features({{0, 0, 0, 0}, {1, 1, 0, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kinetic_features({{0, 0, 0, 0}, {1, 1, 0, 1}, {1, 2, 0, 1}}),
                    std::invalid_argument);
  }
}

TEST_CASE("wingbeat rate reads out of the body-line modulation") {
  SECTION("synthetic amplitude modulation") {
    const double frame_rate = 100.0;
    std::vector<double> s(200);
    for (std::size_t i = 0; i < s.size(); ++i)
      s[i] = 10.0 + 3.0 * std::cos(kTwoPi * 4.0 * i / frame_rate);
    CHECK(detail::flap_rate_from_sequence(s, frame_rate, 20.0) == Approx(4.0).margin(0.13));

    CHECK(detail::flap_rate_from_sequence(std::vector<double>(8, 1.0), frame_rate,
                                          20.0) == 0.0);
    CHECK(detail::flap_rate_from_sequence(std::vector<double>(200, 5.0), frame_rate,
                                          20.0) == 0.0);
  }
  SECTION("long-dwell bird readout") {
    Scenario sc = testing::reference_scenario(4);
    sc.radar.pulses_per_cpi = 4096;
    TargetModel bird = testing::point_target("bird", 500.0, 9.0, 0.01);
    bird.flap_rate_hz = 4.0;
    sc.targets.push_back(bird);
    SynthOptions opt;
    opt.snr_override_db["bird"] = 0.0;
    const IqCube cube = synth_cpi(sc, 0.0, opt);
    const Spectrogram sg = spectrogram_at(cube, 41, 256, 64);
    const double f_body =
        2.0 * target_state_at(bird, sc.radar, 0.0).radial_speed_mps / 0.03;
    const std::vector<double> seq = detail::body_line_sequence(sg, f_body, 150.0);
    REQUIRE(static_cast<int>(seq.size()) == sg.frames);
    CHECK(detail::flap_rate_from_sequence(seq, 6400.0 / 64.0, 20.0) ==
          Approx(4.0).margin(0.5));
  }
}

TEST_CASE("feature extraction reads the reference targets") {
  SECTION("quadrotor") {
    const Probe p = probe_target(testing::quad_target("quad", 500.0, 8.0), 6);
    CHECK(p.features.md_present);
    CHECK(p.features.micro_body_ratio > 0.5);
    CHECK(p.features.body_speed_mps == Approx(8.0).margin(0.15));
    CHECK(p.features.rcs_estimate_m2 > 0.02);
    CHECK(p.features.rcs_estimate_m2 < 0.10);
    CHECK(p.category.kind == CategoryKind::MultiRotorDrone);
  }
  SECTION("ship") {
    TargetModel ship;
    ship.id = "ship";
    ship.category = "ship";
    ship.mean_rcs_m2 = 20.0;
    ship.waypoints = {{0.0, {1200.0, 0.0, 0.0}}, {40.0, {960.0, 0.0, 0.0}}};
    const Probe p = probe_target(ship, 4);
    CHECK_FALSE(p.features.md_present);
    CHECK(p.features.rcs_estimate_m2 == Approx(20.0).epsilon(0.25));
    CHECK(p.features.body_speed_mps == Approx(6.0).margin(0.13));
    CHECK(p.category.kind == CategoryKind::Ship);
  }
  SECTION("large bird carries the trailing-leg flag") {
    const Probe p = probe_target(frozen_heron(), 4);
    CHECK(p.features.md_present);
    CHECK(p.features.md_bandwidth_hz > 0.0);
    CHECK(p.features.md_bandwidth_hz <= 250.0);
    CHECK(p.features.appendage_flag);
    CHECK(p.category.kind == CategoryKind::LargeBird);
  }
  SECTION("small bird") {
    const Probe p = probe_target(frozen_starling(), 4);
    CHECK(p.features.md_present);
    CHECK(p.features.md_bandwidth_hz <= 250.0);
    CHECK_FALSE(p.features.appendage_flag);
    CHECK(p.category.kind == CategoryKind::SmallBird);
  }
  SECTION("propeller comb reads as fixed wing") {
    TargetModel fw;
    fw.id = "fw";
    fw.category = "fixed_wing_drone";
    fw.mean_rcs_m2 = 0.25;
    fw.waypoints = {{0.0, {632.0, 0.0, 150.0}}, {40.0, {122.8, 509.2, 150.0}}};
    BladeSet prop;
    prop.count = 2;
    prop.length_m = 0.28;
    prop.rate_rad_s = kTwoPi * 27.0;
    prop.plane = BladePlane::Puller;
    fw.blade_sets.push_back(prop);
    const Probe p = probe_target(fw, 4);
    CHECK(p.features.near_band_spacing_hz >= 25.0);
    CHECK(p.features.near_band_spacing_hz <= 120.0);
    CHECK(p.features.near_band_gap_bins >= 2);
    CHECK(p.features.far_band_ratio < 0.05);
    CHECK(p.category.kind == CategoryKind::FixedWingDrone);
  }
  SECTION("lifting rotors plus a puller prop reads as vtol hybrid") {
    TargetModel vt;
    vt.id = "vt";
    vt.category = "vtol_hybrid_drone";
    vt.mean_rcs_m2 = 0.4;
    vt.waypoints = {{0.0, {794.0, 0.0, 100.0}}, {40.0, {370.0, 424.0, 100.0}}};
    for (int i = 0; i < 4; ++i) {
      BladeSet l;
      l.count = 2;
      l.length_m = 0.1;
      l.rate_rad_s = kTwoPi * 105.0;
      l.plane = BladePlane::Lifting;
      l.phase_offset_rad = 0.9 * i;
      vt.blade_sets.push_back(l);
    }
    BladeSet prop;
    prop.count = 2;
    prop.length_m = 0.28;
    prop.rate_rad_s = kTwoPi * 27.0;
    prop.plane = BladePlane::Puller;
    vt.blade_sets.push_back(prop);
    const Probe p = probe_target(vt, 4);
    CHECK(p.features.far_band_ratio >= 0.05);
    CHECK(p.features.near_band_ratio >= 0.02);
    CHECK(p.category.kind == CategoryKind::VtolHybridDrone);
  }
}

TEST_CASE("classifier decision table") {
  ClassifierConfig cfg;

  SECTION("bladeless, slow, large: ship") {
    FeatureVector f;
    f.rcs_estimate_m2 = 50.0;
    f.body_speed_mps = 8.0;
    const TargetCategory c = classify(f, std::nullopt, cfg);
    CHECK(c.kind == CategoryKind::Ship);
    CHECK(c.confidence == Approx(1.0));

    KineticFeatures k;
    k.mean_speed_mps = 8.0;
    CHECK(classify(f, k, cfg).kind == CategoryKind::Ship);

    f.body_speed_mps = 20.0;
    CHECK(classify(f, std::nullopt, cfg).kind == CategoryKind::Unknown);
  }
  SECTION("whole-row sidebands with fast rotation: multirotor") {
    FeatureVector f;
    f.md_present = true;
    f.micro_body_ratio = 0.8;
    f.far_band_ratio = 0.3;
    f.jem_spacing_hz = 220.0;
    f.rotation_rate_estimate_hz = 110.0;
    f.frame_ratio_cv = 0.5;
    f.md_bandwidth_hz = 2000.0;
    const TargetCategory c = classify(f, std::nullopt, cfg);
    CHECK(c.kind == CategoryKind::MultiRotorDrone);
    CHECK(c.confidence == Approx(1.0));
  }
  SECTION("sub-rotor comb interval demotes the lifting claim to bird") {
    FeatureVector f;
    f.md_present = true;
    f.micro_body_ratio = 0.5;
    f.far_band_ratio = 0.1;
    f.jem_spacing_hz = 30.0;
    f.rotation_rate_estimate_hz = 15.0;  // below any real rotor
    f.md_bandwidth_hz = 150.0;
    CHECK(classify(f, std::nullopt, cfg).kind == CategoryKind::SmallBird);
  }
  SECTION("near-band comb alone: fixed wing") {
    FeatureVector f;
    f.md_present = true;
    f.micro_body_ratio = 0.3;
    f.near_band_spacing_hz = 54.0;
    f.near_band_line_count = 4;
    f.near_band_gap_bins = 3;
    f.near_band_ratio = 0.1;
    f.frame_ratio_cv = 0.1;
    const TargetCategory c = classify(f, std::nullopt, cfg);
    CHECK(c.kind == CategoryKind::FixedWingDrone);
    CHECK(c.confidence == Approx(1.0));
  }
  SECTION("near comb and far band together: vtol hybrid") {
    FeatureVector f;
    f.md_present = true;
    f.micro_body_ratio = 0.6;
    f.far_band_ratio = 0.3;
    f.near_band_spacing_hz = 54.0;
    f.near_band_line_count = 4;
    f.near_band_gap_bins = 3;
    f.near_band_ratio = 0.1;
    CHECK(classify(f, std::nullopt, cfg).kind == CategoryKind::VtolHybridDrone);
  }
  SECTION("narrow smear with and without the appendage") {
    FeatureVector f;
    f.md_present = true;
    f.micro_body_ratio = 0.5;
    f.md_bandwidth_hz = 150.0;
    f.flap_rate_estimate_hz = 4.0;
    const TargetCategory small = classify(f, std::nullopt, cfg);
    CHECK(small.kind == CategoryKind::SmallBird);
    CHECK(small.confidence == Approx(1.0));
    f.appendage_flag = true;
    CHECK(classify(f, std::nullopt, cfg).kind == CategoryKind::LargeBird);
  }
  SECTION("meter-class blades or kilohertz span: helicopter") {
    FeatureVector f;
    f.blade_length_estimate_m = 1.2;
    CHECK(classify(f, std::nullopt, cfg).kind == CategoryKind::Helicopter);

    FeatureVector g;
    g.md_present = true;
    g.micro_body_ratio = 0.5;
    g.md_bandwidth_hz = 2800.0;
    CHECK(classify(g, std::nullopt, cfg).kind == CategoryKind::Helicopter);
  }
  SECTION("featureless detection stays unknown") {
    const TargetCategory c = classify(FeatureVector{}, std::nullopt, cfg);
    CHECK(c.kind == CategoryKind::Unknown);
    CHECK(c.confidence == 0.0);
  }
}

TEST_CASE("category names round-trip") {
  for (CategoryKind k :
       {CategoryKind::MultiRotorDrone, CategoryKind::FixedWingDrone,
        CategoryKind::VtolHybridDrone, CategoryKind::LargeBird,
        CategoryKind::SmallBird, CategoryKind::Vehicle, CategoryKind::Ship,
        CategoryKind::Helicopter, CategoryKind::Pedestrian, CategoryKind::Clutter,
        CategoryKind::Unknown})
    CHECK(category_from_string(to_string(k)) == k);
  CHECK(category_from_string("no_such_thing") == CategoryKind::Unknown);
}
