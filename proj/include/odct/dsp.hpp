// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Time-frequency analysis/synthesis and the uniform triangular filter bank
// shared by dictionary training and enhancement.

#ifndef ODCT_DSP_HPP_
#define ODCT_DSP_HPP_

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odct/audio.hpp"

namespace odct {

enum class WindowType { kSqrtHann, kRectangular };

const char* WindowTypeName(WindowType type);
WindowType ParseWindowType(const std::string& name);

struct StftConfig {
  std::size_t window_len = 160;
  std::size_t hop = 80;
  std::size_t fft_size = 256;
  WindowType window = WindowType::kSqrtHann;

  // window_len = round(ms * rate / 1000), hop = window_len / 2, fft_size the
  // next power of two >= window_len.
  static StftConfig ForDuration(double window_ms, int sample_rate);

  std::size_t n_bins() const { return fft_size / 2 + 1; }

  // Throws unless 0 < hop <= window_len <= fft_size.
  void Validate() const;

  // Analysis window; synthesis uses the same coefficients.
  std::vector<double> Window() const;

  bool operator==(const StftConfig&) const = default;
};

// Frames are row-major: frame m occupies [m * n_bins, (m + 1) * n_bins).
struct ComplexSpectrogram {
  StftConfig config;
  std::size_t n_frames = 0;
  std::vector<std::complex<double>> data;

  std::size_t n_bins() const { return config.n_bins(); }
  std::span<std::complex<double>> frame(std::size_t m) {
    return {data.data() + m * n_bins(), n_bins()};
  }
  std::span<const std::complex<double>> frame(std::size_t m) const {
    return {data.data() + m * n_bins(), n_bins()};
  }
};

struct PowerSpectrogram {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;
  std::vector<double> data;

  std::span<double> frame(std::size_t m) {
    return {data.data() + m * n_bins, n_bins};
  }
  std::span<const double> frame(std::size_t m) const {
    return {data.data() + m * n_bins, n_bins};
  }
};

// Number of full frames in a signal of n samples; trailing samples that do
// not fill a window are dropped.
std::size_t FrameCount(std::size_t n_samples, const StftConfig& config);

// Frame m covers samples [m * hop, m * hop + window_len), windowed and
// zero-padded to fft_size. Only bins 0..fft_size/2 are kept.
ComplexSpectrogram Stft(std::span<const double> samples,
                        const StftConfig& config);
ComplexSpectrogram Stft(const AudioBuffer& audio, const StftConfig& config);

// Weighted overlap-add with the synthesis window. Each sample is divided by
// the summed analysis*synthesis window over the frames that cover it.
// The default output length is (n_frames - 1) * hop + window_len; a longer
// `length` is zero-filled past the last frame.
std::vector<double> Istft(const ComplexSpectrogram& spec,
                          std::optional<std::size_t> length = std::nullopt);

PowerSpectrogram ComputePower(const ComplexSpectrogram& spec);

// Uniformly spaced triangular bands over DFT bins 0..fft_size/2. Band b is
// centred at b * (n_bins - 1) / (n_bands - 1) with half-width equal to the
// centre spacing, so the first and last bands are half-triangles and the
// weights of every bin sum to one.
class FilterBank {
 public:
  FilterBank() = default;
  static FilterBank Uniform(std::size_t n_bands, std::size_t fft_size);

  std::size_t n_bands() const { return n_bands_; }
  std::size_t n_bins() const { return n_bins_; }
  double weight(std::size_t band, std::size_t bin) const {
    return weights_[band * n_bins_ + bin];
  }
  std::span<const double> band_weights(std::size_t band) const {
    return {weights_.data() + band * n_bins_, n_bins_};
  }
  const std::vector<double>& band_centers() const { return centers_; }

  // First and one-past-last bin with nonzero weight in `band`.
  std::size_t support_begin(std::size_t band) const { return first_[band]; }
  std::size_t support_end(std::size_t band) const { return last_[band]; }

  // out[b] = sum_k weight(b, k) * power[k].
  void Apply(std::span<const double> power, std::span<double> out) const;
  std::vector<double> Apply(std::span<const double> power) const;

  // out[k] = sum_b weight(b, k) * gains[b].
  void Expand(std::span<const double> band_gains, std::span<double> out) const;
  std::vector<double> Expand(std::span<const double> band_gains) const;

 private:
  std::size_t n_bands_ = 0;
  std::size_t n_bins_ = 0;
  std::vector<double> weights_;
  std::vector<double> centers_;
  std::vector<std::size_t> first_;
  std::vector<std::size_t> last_;
};

inline FilterBank BuildUniformFilterBank(std::size_t n_bands,
                                         std::size_t fft_size) {
  return FilterBank::Uniform(n_bands, fft_size);
}

}  // namespace odct

#endif  // ODCT_DSP_HPP_
