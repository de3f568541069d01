// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ODCT_SRC_CORE_FFT_HPP_
#define ODCT_SRC_CORE_FFT_HPP_

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace odct::internal {

// Real-input DFT of a fixed size backed by FFTW. Owns its plans and aligned
// buffers; one instance must not be used from two threads at once.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t n_bins() const { return size_ / 2 + 1; }

  // `in` has size() samples; `out` receives n_bins() bins.
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);

  // Unnormalized inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  std::size_t size_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
};

}  // namespace odct::internal

#endif  // ODCT_SRC_CORE_FFT_HPP_
