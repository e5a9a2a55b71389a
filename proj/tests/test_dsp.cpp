#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "lssradar/dsp.hpp"
#include "lssradar/synth.hpp"
#include "support/fixtures.hpp"

using namespace lssradar;
using Catch::Approx;

TEST_CASE("window taps have the textbook shapes") {
  const std::vector<double> rect = window_taps(Window::Rect, 16);
  for (double w : rect) CHECK(w == 1.0);

  const int n = 64;
  const std::vector<double> hann = window_taps(Window::Hann, n);
  REQUIRE(static_cast<int>(hann.size()) == n);
  CHECK(hann[0] == Approx(0.0).margin(1e-12));
  double sum = 0.0, sumsq = 0.0;
  for (double w : hann) {
    sum += w;
    sumsq += w * w;
  }
  CHECK(sum == Approx(n / 2.0));        // mean tap 1/2
  CHECK(sumsq == Approx(3.0 * n / 8.0));  // mean square 3/8
}

TEST_CASE("fft preserves energy and shifts center dc") {
  const int n = 256;
  std::mt19937_64 gen(99);
  std::normal_distribution<double> dist;
  std::vector<std::complex<double>> x(n);
  for (auto& c : x) c = {dist(gen), dist(gen)};

  double time_energy = 0.0;
  for (const auto& c : x) time_energy += std::norm(c);

  std::vector<std::complex<double>> y = x;
  fft_forward(y.data(), n);
  double freq_energy = 0.0;
  for (const auto& c : y) freq_energy += std::norm(c);
  CHECK(freq_energy == Approx(n * time_energy).epsilon(1e-9));

  std::vector<int> idx(8);
  for (int i = 0; i < 8; ++i) idx[static_cast<std::size_t>(i)] = i;
  fft_shift(idx.data(), 8);
  CHECK(idx == std::vector<int>{4, 5, 6, 7, 0, 1, 2, 3});

  CHECK(centered_bin_frequency(4, 8, 6400.0) == Approx(0.0));
  CHECK(centered_bin_frequency(0, 8, 6400.0) == Approx(-3200.0));
  CHECK(centered_bin_frequency(5, 8, 6400.0) == Approx(800.0));
}

TEST_CASE("hann spectrum: first sidelobe sits 31.5 db down") {
  const int n = 64;
  const int pad = 64 * n;
  const std::vector<double> taps = window_taps(Window::Hann, n);
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(pad));
  for (int i = 0; i < n; ++i) buf[static_cast<std::size_t>(i)] = taps[static_cast<std::size_t>(i)];
  fft_forward(buf.data(), pad);

  std::vector<double> mag(static_cast<std::size_t>(pad / 2));
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(buf[i]);

  std::size_t first_null = 1;
  while (first_null + 1 < mag.size() && mag[first_null + 1] < mag[first_null])
    ++first_null;
  // The first sidelobe peaks between the first null and half again past it.
  double side = 0.0;
  for (std::size_t i = first_null; i < first_null + first_null / 2; ++i)
    side = std::max(side, mag[i]);

  const double rel_db = 20.0 * std::log10(side / mag[0]);
  CHECK(rel_db == Approx(-31.47).margin(0.4));
}

TEST_CASE("noise floor estimator recovers the mean of exponential powers") {
  std::mt19937_64 gen(5);
  std::exponential_distribution<double> noise(1.0 / 3.5);  // mean power 3.5
  std::vector<double> powers(40000);
  for (double& p : powers) p = noise(gen);
  CHECK(noise_floor_from_powers(powers) == Approx(linear_to_db(3.5)).margin(0.15));
  CHECK_THROWS_AS(noise_floor_from_powers({}), std::invalid_argument);
}

TEST_CASE("range-doppler map geometry and floor") {
  Scenario sc = testing::reference_scenario(21);
  const IqCube cube = synth_cpi(sc, 0.0);
  const RangeDopplerMap map = range_doppler(cube);

  CHECK(map.range_bins == 128);
  CHECK(map.doppler_bins == 384);
  CHECK(map.zero_doppler_bin() == 192);
  CHECK(map.doppler_bin_frequency(192) == Approx(0.0));
  CHECK(map.doppler_bin_frequency(193) - map.doppler_bin_frequency(192) ==
        Approx(6400.0 / 384.0));

  // Unit-variance complex noise through the hann window: per-cell power is
  // exponential with mean sum(w^2).
  const std::vector<double> taps = window_taps(Window::Hann, 384);
  double sumsq = 0.0;
  for (double w : taps) sumsq += w * w;
  CHECK(map.noise_floor_linear() == Approx(sumsq).epsilon(0.05));
}

TEST_CASE("spectrogram tiles its input as documented") {
  Scenario sc = testing::reference_scenario(2);
  sc.targets.push_back(testing::point_target("t", 500.0, 12.0));
  SynthOptions opt;
  opt.snr_override_db["t"] = 20.0;
  const IqCube cube = synth_cpi(sc, 0.25, opt);

  const int bin = static_cast<int>(std::floor(500.0 / 12.0));
  const std::vector<std::complex<double>> series = range_bin_series(cube, bin);
  REQUIRE(static_cast<int>(series.size()) == 384);

  const Spectrogram sg = spectrogram(series, 6400.0, 0.25, 128, 32);
  CHECK(sg.frames == (384 - 128) / 32 + 1);
  CHECK(sg.freq_bins == 128 * 4);
  CHECK(sg.frame_time(0) == Approx(0.25 + 64.0 / 6400.0));
  CHECK(sg.frame_time(1) - sg.frame_time(0) == Approx(32.0 / 6400.0));
  CHECK(sg.frequency(sg.freq_bins / 2) == Approx(0.0));

  // The body line shows up in every frame near +800 Hz.
  for (int f = 0; f < sg.frames; ++f) {
    int best = 0;
    for (int k = 0; k < sg.freq_bins; ++k)
      if (sg.at(f, k) > sg.at(f, best)) best = k;
    CHECK(std::abs(sg.frequency(best) - 800.0) < 2.0 * 6400.0 / 128.0);
  }

  const Spectrogram sg2 = spectrogram_at(cube, bin);
  CHECK(sg2.range_bin == bin);
  CHECK(sg2.window == 96);  // pulses / 4
  CHECK(sg2.hop == 48);

  CHECK_THROWS_AS(spectrogram(series, 6400.0, 0.0, 1, 16), std::invalid_argument);
  CHECK_THROWS_AS(spectrogram(series, 6400.0, 0.0, 4096, 16), std::invalid_argument);
  CHECK_THROWS_AS(spectrogram(series, 6400.0, 0.0, 128, 0), std::invalid_argument);
  CHECK_THROWS_AS(spectrogram_at(cube, -1), std::invalid_argument);
  CHECK_THROWS_AS(spectrogram_at(cube, 128), std::invalid_argument);
}

TEST_CASE("resolution formulas") {
  const Resolutions r = resolutions(testing::reference_radar());
  CHECK(r.range_m == Approx(12.0));
  CHECK(r.doppler_hz == Approx(6400.0 / 384.0));
  CHECK(r.velocity_mps == Approx(0.25));

  // Two scatterers a quarter meter apart on a 100 rad/s rotor, x band.
  CHECK(cross_range_separation(0.25, 100.0, 0.03) == Approx(2.0 * 0.25 * 100.0 / 0.03));
}
