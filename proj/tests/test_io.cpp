#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lssradar/io.hpp"
#include "support/fixtures.hpp"

using namespace lssradar;
using Catch::Approx;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

int field_count(const std::string& line) {
  return 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
}

}  // namespace

TEST_CASE("numbers serialize with six significant digits") {
  CHECK(fmt6(3.14159265) == "3.14159");
  CHECK(fmt6(900.83947) == "900.839");
  CHECK(fmt6(0.000123456789) == "0.000123457");
  CHECK(fmt6(12.0) == "12");
  CHECK(fmt6(1e7) == "1e+07");
  CHECK(fmt6(-0.5) == "-0.5");
}

TEST_CASE("detection rows carry the optional spread column") {
  Detection plain;
  plain.t0 = 0.5;
  plain.range_m = 492.0;
  plain.radial_speed_mps = 12.5;
  plain.snr_db = 20.25;
  Detection spread = plain;
  spread.dscr_db = 6.5;
  spread.detector = DetectorKind::Dscr;

  std::ostringstream out;
  write_detections_csv(out, {plain, spread});
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "t0,beam_az,range_m,speed_mps,snr_db,dscr_db,detector");
  CHECK(lines[1] == "0.5,0,492,12.5,20.25,,snr");
  CHECK(lines[2] == "0.5,0,492,12.5,20.25,6.5,dscr");
}

TEST_CASE("track rows flatten the fused state") {
  FramePicture frame;
  frame.frame_index = 3;
  frame.t0 = 0.18;
  frame.drt_ms = 12.5;
  Track tr;
  tr.id = 7;
  tr.state = {100.0, 0.0, 3.0, 4.0};
  tr.fused_label = {CategoryKind::MultiRotorDrone, 0.8};
  frame.tracks.push_back(tr);

  std::ostringstream out;
  write_tracks_csv_header(out);
  write_tracks_csv_rows(out, frame);
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "frame,t,track_id,x,y,speed,category,confidence,drt_ms");
  CHECK(lines[1] == "3,0.18,7,100,0,5,multi_rotor_drone,0.8,12.5");
}

TEST_CASE("classification rows carry the full feature vector") {
  FeatureVector f;
  f.body_speed_mps = 8.0;
  f.rcs_estimate_m2 = 0.05;
  f.micro_body_ratio = 1.25;
  f.md_present = true;
  f.md_bandwidth_hz = 450.0;
  f.jem_spacing_hz = 220.0;
  f.jem_line_count = 5;
  f.rotation_rate_estimate_hz = 110.0;
  f.blade_count_estimate = 2;
  f.blade_length_estimate_m = 0.1;
  f.flap_rate_estimate_hz = 0.0;

  std::ostringstream out;
  write_classifications_csv_header(out);
  write_classification_csv_row(out, 7, 0.18, {CategoryKind::MultiRotorDrone, 1.0}, f);
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "track_id,t,category,confidence,body_speed_mps,rcs_estimate_m2,"
        "micro_body_ratio,md_present,md_bandwidth_hz,jem_spacing_hz,"
        "jem_line_count,rotation_rate_estimate_hz,blade_count_estimate,"
        "blade_length_estimate_m,flap_rate_estimate_hz,appendage_flag");
  CHECK(lines[1] ==
        "7,0.18,multi_rotor_drone,1,8,0.05,1.25,1,450,220,5,110,2,0.1,0,0");
  CHECK(field_count(lines[1]) == field_count(lines[0]));
}

TEST_CASE("sweep rows pair dwell length with the observed ratio") {
  std::ostringstream out;
  write_sweep_csv(out, {{128, 20.0, 0.357684, true}, {288, 45.0, 1.05059, false}});
  const std::vector<std::string> lines = lines_of(out.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "cpi_ms,micro_body_ratio,micro_detectable");
  CHECK(lines[1] == "20,0.357684,1");
  CHECK(lines[2] == "45,1.05059,0");
}

TEST_CASE("frame stream lines parse back as json") {
  FramePicture frame;
  frame.frame_index = 2;
  frame.t0 = 0.12;
  frame.drt_ms = 9.0;
  ClassifiedDetection cd;
  cd.detection.range_m = 492.0;
  cd.detection.radial_speed_mps = 8.0;
  cd.detection.snr_db = 21.0;
  cd.detection.dscr_db = 5.5;
  cd.detection.detector = DetectorKind::Dscr;
  cd.category = {CategoryKind::MultiRotorDrone, 1.0};
  cd.track_id = 4;
  frame.detections.push_back(cd);
  Track tr;
  tr.id = 4;
  tr.state = {490.0, 0.0, -8.0, 0.0};
  tr.fused_label = {CategoryKind::MultiRotorDrone, 1.0};
  frame.tracks.push_back(tr);
  frame.timing = drt_accounting({{"echo", 0.0}, {"display", 9.0}});

  std::ostringstream out;
  write_frame_jsonl(out, frame);
  const std::string text = out.str();
  REQUIRE(std::count(text.begin(), text.end(), '\n') == 1);

  const nlohmann::json j = nlohmann::json::parse(text);
  CHECK(j["frame"] == 2);
  CHECK(j["t0"] == Approx(0.12));
  CHECK(j["drt_ms"] == Approx(9.0));
  REQUIRE(j["detections"].size() == 1);
  CHECK(j["detections"][0]["track_id"] == 4);
  CHECK(j["detections"][0]["range_m"] == Approx(492.0));
  CHECK(j["detections"][0]["dscr_db"] == Approx(5.5));
  CHECK(j["detections"][0]["detector"] == "dscr");
  CHECK(j["detections"][0]["category"] == "multi_rotor_drone");
  REQUIRE(j["tracks"].size() == 1);
  CHECK(j["tracks"][0]["id"] == 4);
  CHECK(j["tracks"][0]["vx"] == Approx(-8.0));
  REQUIRE(j["timing"].size() == 2);
  CHECK(j["timing"][0]["stage"] == "echo");
  CHECK(j["timing"][1]["t_ms"] == Approx(9.0));

  SECTION("the optional spread column stays absent when unset") {
    frame.detections[0].detection.dscr_db.reset();
    std::ostringstream plain;
    write_frame_jsonl(plain, frame);
    const nlohmann::json p = nlohmann::json::parse(plain.str());
    CHECK_FALSE(p["detections"][0].contains("dscr_db"));
  }
}

TEST_CASE("matrix exports are grids with axis leaders") {
  Scenario sc = testing::reference_scenario(3);
  const IqCube cube = synth_cpi(sc, 0.0);
  const RangeDopplerMap map = range_doppler(cube);

  SECTION("range-doppler csv") {
    std::ostringstream out;
    write_rd_map_csv(out, map);
    const std::vector<std::string> lines = lines_of(out.str());
    REQUIRE(static_cast<int>(lines.size()) == map.range_bins + 1);
    CHECK(lines[0].rfind("range_m\\doppler_hz,", 0) == 0);
    for (const std::string& line : lines)
      CHECK(field_count(line) == map.doppler_bins + 1);
    CHECK(lines[1].rfind("0,", 0) == 0);
    CHECK(lines[2].rfind("12,", 0) == 0);
  }
  SECTION("spectrogram csv") {
    const Spectrogram sg = spectrogram_at(cube, 40);
    std::ostringstream out;
    write_spectrogram_csv(out, sg);
    const std::vector<std::string> lines = lines_of(out.str());
    REQUIRE(static_cast<int>(lines.size()) == sg.frames + 1);
    CHECK(lines[0].rfind("t_s\\freq_hz,", 0) == 0);
    for (const std::string& line : lines)
      CHECK(field_count(line) == sg.freq_bins + 1);
  }
}

TEST_CASE("sixteen-bit image spans floor to peak") {
  std::ostringstream out;
  detail::write_pgm16(out, 2, 3, {0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
  const std::string bytes = out.str();

  const std::string header = "P5\n3 2\n65535\n";
  REQUIRE(bytes.rfind(header, 0) == 0);
  REQUIRE(bytes.size() == header.size() + 12);

  const auto level = [&](int i) {
    const std::size_t off = header.size() + 2 * static_cast<std::size_t>(i);
    return (static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[off])) << 8) |
           static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[off + 1]));
  };
  CHECK(level(0) == 0);
  CHECK(level(1) == 13107);
  CHECK(level(2) == 26214);
  CHECK(level(3) == 39321);
  CHECK(level(4) == 52428);
  CHECK(level(5) == 65535);

  SECTION("a flat image maps to the floor") {
    std::ostringstream flat;
    detail::write_pgm16(flat, 1, 2, {7.0, 7.0});
    const std::string fb = flat.str();
    const std::string fh = "P5\n2 1\n65535\n";
    REQUIRE(fb.size() == fh.size() + 4);
    CHECK(fb.substr(fh.size()) == std::string(4, '\0'));
  }
}

TEST_CASE("raw cube dumps round-trip through the sidecar") {
  Scenario sc = testing::reference_scenario(9);
  sc.radar.pulses_per_cpi = 16;
  sc.radar.range_bins = 8;
  const IqCube cube = synth_cpi(sc, 0.0);

  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "lssradar-io-test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "cube.c64").string();
  write_cube_f32(path, cube);

  CHECK(std::filesystem::file_size(path) ==
        static_cast<std::uintmax_t>(16 * 8 * 2 * sizeof(float)));

  std::ifstream raw(path, std::ios::binary);
  float first[2] = {0.0f, 0.0f};
  raw.read(reinterpret_cast<char*>(first), sizeof(first));
  REQUIRE(raw.good());
  CHECK(first[0] == static_cast<float>(cube.data[0].real()));
  CHECK(first[1] == static_cast<float>(cube.data[0].imag()));

  std::ifstream side(path + ".json");
  REQUIRE(side.good());
  const nlohmann::json meta = nlohmann::json::parse(side);
  CHECK(meta["pulses"] == 16);
  CHECK(meta["range_bins"] == 8);
  CHECK(meta["prf_hz"] == Approx(6400.0));
  CHECK(meta["range_bin_size_m"] == Approx(12.0));
  CHECK(meta["wavelength_m"] == Approx(0.03));
  CHECK(meta["dtype"] == "complex64-interleaved-le");
  CHECK(meta["layout"] == "pulse-major");

  std::filesystem::remove_all(dir);

  SECTION("unwritable paths are reported") {
    CHECK_THROWS_WITH(detail::open_out("/no-such-dir/out.csv"),
                      Catch::Matchers::ContainsSubstring("cannot write"));
  }
}
