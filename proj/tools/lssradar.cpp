#include "lssradar/io.hpp"
#include "lssradar/pipeline.hpp"
#include "lssradar/tradestudy.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace lssradar;

namespace {

std::string resolve_scenario(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("LSSRADAR_SCENARIO_DIR")) {
    const fs::path alt = fs::path(dir) / path;
    if (fs::exists(alt)) return alt.string();
  }
  throw std::runtime_error("cannot read scenario " + path);
}

Scenario read_scenario(const std::string& path) {
  std::ifstream in(resolve_scenario(path));
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

std::string frame_tag(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", k);
  return buf;
}

struct RunArgs {
  std::string scenario;
  std::string classifier;
  std::string output_dir = ".";
  std::vector<std::string> emit = {"detections", "tracks", "frames"};
  int frames = 10;
  std::int64_t seed = -1;
  bool fixed_timing = false;
};

int cmd_run(const RunArgs& a) {
  Scenario sc = read_scenario(a.scenario);
  if (a.seed >= 0) sc.noise_seed = static_cast<std::uint64_t>(a.seed);

  PipelineConfig cfg;
  cfg.fixed_timing = a.fixed_timing;
  if (!a.classifier.empty()) {
    std::ifstream in(a.classifier);
    if (!in) throw std::runtime_error("cannot read classifier config " + a.classifier);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg.classifier = load_classifier_config(ss.str());
  }

  const auto wants = [&](const std::string& what) {
    return std::find(a.emit.begin(), a.emit.end(), what) != a.emit.end();
  };
  fs::create_directories(a.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(a.output_dir) / name).string();
  };

  std::ofstream tracks_csv, class_csv, frames_jsonl;
  if (wants("tracks")) {
    tracks_csv = detail::open_out(out_path("tracks.csv"));
    write_tracks_csv_header(tracks_csv);
  }
  if (wants("classifications")) {
    class_csv = detail::open_out(out_path("classifications.csv"));
    write_classifications_csv_header(class_csv);
  }
  if (wants("frames")) frames_jsonl = detail::open_out(out_path("frames.jsonl"));

  CwsState state;
  const double cpi = sc.radar.cpi_seconds();
  std::vector<Detection> all_dets;
  FramePicture last;
  double drt_sum = 0.0;
  for (int k = 0; k < a.frames; ++k) {
    const double t0 = k * cpi;
    last = cws_frame(sc, t0, state, cfg);
    drt_sum += last.drt_ms;
    for (const ClassifiedDetection& cd : last.detections)
      all_dets.push_back(cd.detection);
    if (wants("tracks")) write_tracks_csv_rows(tracks_csv, last);
    if (wants("classifications"))
      for (const ClassifiedDetection& cd : last.detections)
        write_classification_csv_row(class_csv, cd.track_id, t0, cd.category,
                                     cd.features);
    if (wants("frames")) write_frame_jsonl(frames_jsonl, last);
    if (wants("rd_maps") || wants("spectrograms") || wants("cubes")) {
      const IqCube cube = synth_cpi(sc, t0, cfg.synth);
      if (wants("rd_maps")) {
        const RangeDopplerMap map = range_doppler(cube, cfg.window);
        auto csv = detail::open_out(out_path("rd_map_" + frame_tag(k) + ".csv"));
        write_rd_map_csv(csv, map);
        auto pgm = detail::open_out(out_path("rd_map_" + frame_tag(k) + ".pgm"), true);
        write_rd_map_pgm(pgm, map);
      }
      if (wants("spectrograms"))
        for (const ClassifiedDetection& cd : last.detections) {
          const Spectrogram sg = spectrogram_at(cube, cd.detection.range_bin);
          const std::string stem =
              "spectrogram_" + frame_tag(k) + "_bin" + std::to_string(cd.detection.range_bin);
          auto csv = detail::open_out(out_path(stem + ".csv"));
          write_spectrogram_csv(csv, sg);
          auto pgm = detail::open_out(out_path(stem + ".pgm"), true);
          write_spectrogram_pgm(pgm, sg);
        }
      if (wants("cubes")) write_cube_f32(out_path("cube_" + frame_tag(k) + ".f32"), cube);
    }
  }
  if (wants("detections")) {
    auto csv = detail::open_out(out_path("detections.csv"));
    write_detections_csv(csv, all_dets);
  }

  std::map<std::string, int> by_label;
  int confirmed = 0;
  for (const Track& tr : last.tracks) {
    if (tr.points.size() < 3) continue;
    ++confirmed;
    ++by_label[to_string(tr.fused_label.kind)];
  }
  std::cout << a.frames << " frames, " << all_dets.size() << " detections, "
            << last.tracks.size() << " live tracks (" << confirmed << " confirmed)\n";
  for (const auto& [label, n] : by_label) std::cout << "  " << label << ": " << n << "\n";
  std::cout << "mean decision-ready time " << fmt6(drt_sum / std::max(1, a.frames))
            << " ms\n";
  return 0;
}

struct SweepArgs {
  std::string scenario;
  std::string output = "sweep.csv";
  std::vector<double> cpis_ms;
};

int cmd_sweep(const SweepArgs& a) {
  Scenario sc = read_scenario(a.scenario);
  std::vector<int> pulse_counts;
  pulse_counts.reserve(a.cpis_ms.size());
  for (double ms : a.cpis_ms)
    pulse_counts.push_back(static_cast<int>(std::lround(sc.radar.prf_hz * ms / 1e3)));
  const std::vector<DwellPoint> rows = dwell_sweep(sc, pulse_counts);
  auto csv = detail::open_out(a.output);
  write_sweep_csv(csv, rows);
  for (const DwellPoint& row : rows)
    std::cout << fmt6(row.cpi_ms) << " ms: ratio " << fmt6(row.micro_body_ratio)
              << (row.micro_detectable ? " (detectable)" : "") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pulse-Doppler drone-surveillance simulator and design tool"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "run the classify-while-scan pipeline");
  run_cmd->add_option("--scenario", run.scenario, "scenario JSON file")->required();
  run_cmd->add_option("--frames", run.frames, "CPI frames to process")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "override the scenario noise seed");
  run_cmd->add_option("--classifier", run.classifier, "classifier config JSON");
  run_cmd->add_option("--output-dir", run.output_dir, "directory for output files");
  run_cmd
      ->add_option("--emit", run.emit,
                   "outputs: detections, tracks, classifications, frames, rd_maps, "
                   "spectrograms, cubes")
      ->delimiter(',');
  run_cmd->add_flag("--fixed-timing", run.fixed_timing,
                    "zero the stage stamps so output bytes are reproducible");

  SweepArgs sweep;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "micro-Doppler strength across dwell lengths");
  sweep_cmd->add_option("--scenario", sweep.scenario, "scenario JSON file")->required();
  sweep_cmd->add_option("--cpis", sweep.cpis_ms, "CPI lengths in ms")
      ->required()
      ->delimiter(',');
  sweep_cmd->add_option("--output", sweep.output, "sweep CSV path");

  CLI::App* size_cmd = app.add_subcommand("size", "radar design arithmetic");
  size_cmd->require_subcommand(1);

  LinkBudget budget;
  double wavelength = 0.0, rcs = 1.0, snr_db = 13.0;
  CLI::App* range_cmd =
      size_cmd->add_subcommand("range", "maximum single-pulse detection range");
  range_cmd->add_option("--power", budget.transmit_power_w, "transmit power, W")->required();
  range_cmd->add_option("--tx-gain", budget.tx_gain, "transmit gain, linear")->required();
  range_cmd->add_option("--rx-gain", budget.rx_gain, "receive gain, linear")->required();
  range_cmd->add_option("--noise-temp", budget.system_noise_temp_k, "system noise temp, K")
      ->required();
  range_cmd->add_option("--noise-bandwidth", budget.noise_bandwidth_hz, "noise bandwidth, Hz")
      ->required();
  range_cmd->add_option("--losses", budget.system_losses, "system losses, linear >= 1")
      ->required();
  range_cmd->add_option("--wavelength", wavelength, "wavelength, m")->required();
  range_cmd->add_option("--rcs", rcs, "target RCS, m^2")->required();
  range_cmd->add_option("--snr-db", snr_db, "required single-pulse SNR, dB");

  double r0 = 0.0, rcs0 = 1.0, snr0_db = 13.0, rcs1 = 1.0, snr1_db = 13.0;
  CLI::App* scale_cmd = size_cmd->add_subcommand(
      "scale", "rescale a known detection range to a new RCS and SNR requirement");
  scale_cmd->add_option("--range", r0, "reference range, m")->required();
  scale_cmd->add_option("--rcs0", rcs0, "reference RCS, m^2")->required();
  scale_cmd->add_option("--snr0-db", snr0_db, "reference required SNR, dB")->required();
  scale_cmd->add_option("--rcs1", rcs1, "new RCS, m^2")->required();
  scale_cmd->add_option("--snr1-db", snr1_db, "new required SNR, dB")->required();

  double drl = 0.0, srl = 0.0, rrl = 0.0, tcom = 0.0;
  CLI::App* latency_cmd =
      size_cmd->add_subcommand("latency", "end-to-end reaction latency budget");
  latency_cmd->add_option("--radar-ms", drl, "radar decision-ready latency, ms")->required();
  latency_cmd->add_option("--search-ms", srl, "optical search latency, ms")->required();
  latency_cmd->add_option("--recheck-ms", rrl, "optical recheck latency, ms")->required();
  latency_cmd->add_option("--com-ms", tcom, "command link latency, ms")->required();

  double aperture = 0.0, cross_range = -1.0;
  CLI::App* angular_cmd =
      size_cmd->add_subcommand("angular", "diffraction-limited angular resolution");
  angular_cmd->add_option("--wavelength", wavelength, "wavelength, m")->required();
  angular_cmd->add_option("--aperture", aperture, "aperture diameter, m")->required();
  angular_cmd->add_option("--range", cross_range, "also report cross-range extent at this range, m");

  double alert_range = 0.0, speed = 0.0;
  CLI::App* alert_cmd =
      size_cmd->add_subcommand("alert", "time to close from detection range");
  alert_cmd->add_option("--range", alert_range, "detection range, m")->required();
  alert_cmd->add_option("--speed", speed, "closing speed, m/s")->required();

  double radius = 0.0;
  CLI::App* sphere_cmd =
      size_cmd->add_subcommand("sphere-rcs", "sphere RCS at a wavelength");
  sphere_cmd->add_option("--radius", radius, "sphere radius, m")->required();
  sphere_cmd->add_option("--wavelength", wavelength, "wavelength, m")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*sweep_cmd) return cmd_sweep(sweep);
    if (*range_cmd) {
      std::cout << fmt6(detection_range(budget, wavelength, rcs, snr_db)) << " m\n";
      return 0;
    }
    if (*scale_cmd) {
      std::cout << fmt6(scale_range(r0, rcs0, snr0_db, rcs1, snr1_db)) << " m\n";
      return 0;
    }
    if (*latency_cmd) {
      const LatencyBudget lb = latency_budget(drl, srl, rrl, tcom);
      std::cout << fmt6(lb.total_ms) << " ms\n";
      return 0;
    }
    if (*angular_cmd) {
      const double theta = angular_resolution(wavelength, aperture);
      std::cout << fmt6(theta) << " rad\n";
      if (cross_range >= 0.0) std::cout << fmt6(theta * cross_range) << " m\n";
      return 0;
    }
    if (*alert_cmd) {
      std::cout << fmt6(alert_time(alert_range, speed)) << " s\n";
      return 0;
    }
    if (*sphere_cmd) {
      std::cout << fmt6(sphere_rcs(radius, wavelength)) << " m^2\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
