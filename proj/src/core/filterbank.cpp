// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <cmath>

#include "odct/dsp.hpp"
#include "odct/error.hpp"

namespace odct {

FilterBank FilterBank::Uniform(std::size_t n_bands, std::size_t fft_size) {
  const std::size_t n_bins = fft_size / 2 + 1;
  if (fft_size < 2 || n_bands < 2 || n_bands > n_bins)
    Fail(ErrorCode::kInvalidArgument,
         "band count must lie in [2, fft_size/2 + 1] = [2, " +
             std::to_string(n_bins) + "], got " + std::to_string(n_bands));

  FilterBank bank;
  bank.n_bands_ = n_bands;
  bank.n_bins_ = n_bins;
  bank.weights_.assign(n_bands * n_bins, 0.0);
  bank.centers_.resize(n_bands);
  const double spacing =
      static_cast<double>(n_bins - 1) / static_cast<double>(n_bands - 1);
  for (std::size_t b = 0; b < n_bands; ++b)
    bank.centers_[b] = static_cast<double>(b) * spacing;

  // Linear interpolation between neighbouring centres: each bin splits its
  // unit weight between the band at or below it and the next one up.
  for (std::size_t k = 0; k < n_bins; ++k) {
    const double pos = static_cast<double>(k * (n_bands - 1)) /
                       static_cast<double>(n_bins - 1);
    auto lower = static_cast<std::size_t>(std::floor(pos));
    if (lower >= n_bands - 1) lower = n_bands - 1;
    const double frac = pos - static_cast<double>(lower);
    bank.weights_[lower * n_bins + k] = 1.0 - frac;
    if (frac > 0.0) bank.weights_[(lower + 1) * n_bins + k] = frac;
  }

  bank.first_.assign(n_bands, n_bins);
  bank.last_.assign(n_bands, 0);
  for (std::size_t b = 0; b < n_bands; ++b) {
    for (std::size_t k = 0; k < n_bins; ++k) {
      if (bank.weights_[b * n_bins + k] > 0.0) {
        bank.first_[b] = std::min(bank.first_[b], k);
        bank.last_[b] = k + 1;
      }
    }
  }
  return bank;
}

void FilterBank::Apply(std::span<const double> power,
                       std::span<double> out) const {
  if (power.size() != n_bins_ || out.size() != n_bands_)
    Fail(ErrorCode::kDimensionMismatch,
         "filter bank expects " + std::to_string(n_bins_) + " bins and " +
             std::to_string(n_bands_) + " bands, got " +
             std::to_string(power.size()) + " and " +
             std::to_string(out.size()));
  for (std::size_t b = 0; b < n_bands_; ++b) {
    const double* w = weights_.data() + b * n_bins_;
    double acc = 0.0;
    for (std::size_t k = first_[b]; k < last_[b]; ++k) acc += w[k] * power[k];
    out[b] = acc;
  }
}

std::vector<double> FilterBank::Apply(std::span<const double> power) const {
  std::vector<double> out(n_bands_);
  Apply(power, out);
  return out;
}

void FilterBank::Expand(std::span<const double> band_gains,
                        std::span<double> out) const {
  if (band_gains.size() != n_bands_ || out.size() != n_bins_)
    Fail(ErrorCode::kDimensionMismatch,
         "filter bank expects " + std::to_string(n_bands_) + " gains and " +
             std::to_string(n_bins_) + " bins, got " +
             std::to_string(band_gains.size()) + " and " +
             std::to_string(out.size()));
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < n_bands_; ++b) {
    const double* w = weights_.data() + b * n_bins_;
    for (std::size_t k = first_[b]; k < last_[b]; ++k)
      out[k] += w[k] * band_gains[b];
  }
}

std::vector<double> FilterBank::Expand(
    std::span<const double> band_gains) const {
  std::vector<double> out(n_bins_);
  Expand(band_gains, out);
  return out;
}

}  // namespace odct
