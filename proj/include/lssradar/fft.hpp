#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace lssradar {
namespace detail {

// Plan cache keyed by length. Plans are created with FFTW_ESTIMATE (repeatable)
// and FFTW_UNALIGNED so they can execute on any std::vector storage; creation
// is serialized because the FFTW planner is not thread-safe.
class FftPlans {
 public:
  static fftw_plan forward(int n) {
    static FftPlans inst;
    std::lock_guard<std::mutex> lk(inst.mu_);
    auto it = inst.plans_.find(n);
    if (it != inst.plans_.end()) return it->second;
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_dft_1d(
        n, reinterpret_cast<fftw_complex*>(buf.data()),
        reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    inst.plans_.emplace(n, p);
    return p;
  }

 private:
  FftPlans() = default;
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

}  // namespace detail

// In-place unnormalized forward DFT.
inline void fft_forward(std::complex<double>* data, int n) {
  fftw_plan p = detail::FftPlans::forward(n);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

// Rotate so the zero-frequency bin lands at index n/2 (floor).
template <typename T>
inline void fft_shift(T* data, int n) {
  const int half = n / 2;
  const int rest = n - half;
  std::vector<T> tmp(data, data + n);
  for (int i = 0; i < half; ++i) data[i] = tmp[rest + i];
  for (int i = 0; i < rest; ++i) data[half + i] = tmp[i];
}

// Frequency of a centered bin, in cycles of (rate / n).
inline double centered_bin_frequency(int bin, int n, double rate) {
  return (bin - n / 2) * rate / n;
}

}  // namespace lssradar
