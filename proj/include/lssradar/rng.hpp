#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace lssradar {

// Stafford mix 13 variant; used to fold (seed, stream) pairs into engine seeds
// so that every CPI draws from an independent, reproducible stream.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Gaussian draws built on mt19937_64 with explicit uniform mapping and the
// Marsaglia polar transform, so sequences are identical across standard
// libraries (std::normal_distribution is implementation-defined).
class GaussianGen {
 public:
  explicit GaussianGen(std::uint64_t seed) : eng_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  // Complex sample with E[|z|^2] = 1 (unit total power split across I/Q).
  std::complex<double> complex_unit() {
    constexpr double half = 0.7071067811865476;
    const double re = normal() * half;
    const double im = normal() * half;
    return {re, im};
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace lssradar
