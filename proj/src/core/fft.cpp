// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "fft.hpp"

#include <algorithm>
#include <mutex>

#include "odct/error.hpp"

namespace odct::internal {

namespace {
// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex mu;
  return mu;
}
}  // namespace

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size == 0) Fail(ErrorCode::kInvalidArgument, "fft size must be positive");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  real_ = fftw_alloc_real(size_);
  spec_ = fftw_alloc_complex(n_bins());
  const int n = static_cast<int>(size_);
  // FFTW_ESTIMATE picks the same plan on every run, which keeps output
  // bit-reproducible.
  forward_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
  inverse_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard<std::mutex> lock(PlannerMutex());
  fftw_destroy_plan(forward_);
  fftw_destroy_plan(inverse_);
  fftw_free(real_);
  fftw_free(spec_);
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(forward_);
  for (std::size_t k = 0; k < n_bins(); ++k)
    out[k] = {spec_[k][0], spec_[k][1]};
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  // c2r destroys its input array, so it is refilled every call.
  for (std::size_t k = 0; k < n_bins(); ++k) {
    spec_[k][0] = in[k].real();
    spec_[k][1] = in[k].imag();
  }
  fftw_execute(inverse_);
  std::copy(real_, real_ + size_, out.begin());
}

}  // namespace odct::internal
