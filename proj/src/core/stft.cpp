// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "odct/dsp.hpp"
#include "odct/error.hpp"

namespace odct {

const char* WindowTypeName(WindowType type) {
  switch (type) {
    case WindowType::kSqrtHann: return "sqrt-hann";
    case WindowType::kRectangular: return "rect";
  }
  return "unknown";
}

WindowType ParseWindowType(const std::string& name) {
  if (name == "sqrt-hann" || name == "sqrthann") return WindowType::kSqrtHann;
  if (name == "rect" || name == "rectangular") return WindowType::kRectangular;
  Fail(ErrorCode::kInvalidArgument, "unknown window type: " + name);
}

StftConfig StftConfig::ForDuration(double window_ms, int sample_rate) {
  if (!(window_ms > 0.0) || sample_rate <= 0)
    Fail(ErrorCode::kInvalidArgument,
         "window duration and sample rate must be positive");
  StftConfig cfg;
  cfg.window_len = static_cast<std::size_t>(
      std::lround(window_ms * static_cast<double>(sample_rate) / 1000.0));
  if (cfg.window_len < 2)
    Fail(ErrorCode::kInvalidArgument, "analysis window shorter than 2 samples");
  cfg.hop = cfg.window_len / 2;
  cfg.fft_size = 1;
  while (cfg.fft_size < cfg.window_len) cfg.fft_size <<= 1;
  cfg.window = WindowType::kSqrtHann;
  return cfg;
}

void StftConfig::Validate() const {
  if (!(hop > 0 && hop <= window_len && window_len <= fft_size))
    Fail(ErrorCode::kInvalidArgument,
         "stft config requires 0 < hop <= window_len <= fft_size (hop=" +
             std::to_string(hop) + ", window_len=" +
             std::to_string(window_len) +
             ", fft_size=" + std::to_string(fft_size) + ")");
}

std::vector<double> StftConfig::Window() const {
  std::vector<double> w(window_len, 1.0);
  if (window == WindowType::kSqrtHann) {
    // Square root of the periodic Hann window; squared it sums to one at a
    // hop of window_len / 2.
    const double n = static_cast<double>(window_len);
    for (std::size_t i = 0; i < window_len; ++i)
      w[i] = std::sin(std::numbers::pi * static_cast<double>(i) / n);
  }
  return w;
}

std::size_t FrameCount(std::size_t n_samples, const StftConfig& config) {
  if (n_samples < config.window_len) return 0;
  return (n_samples - config.window_len) / config.hop + 1;
}

ComplexSpectrogram Stft(std::span<const double> samples,
                        const StftConfig& config) {
  config.Validate();
  if (samples.size() < config.window_len)
    Fail(ErrorCode::kInputTooShort,
         "input too short: " + std::to_string(samples.size()) +
             " samples, window is " + std::to_string(config.window_len));

  ComplexSpectrogram spec;
  spec.config = config;
  spec.n_frames = FrameCount(samples.size(), config);
  spec.data.resize(spec.n_frames * config.n_bins());

  const std::vector<double> window = config.Window();
  internal::RealFft fft(config.fft_size);
  std::vector<double> buf(config.fft_size, 0.0);
  for (std::size_t m = 0; m < spec.n_frames; ++m) {
    const double* seg = samples.data() + m * config.hop;
    for (std::size_t i = 0; i < config.window_len; ++i)
      buf[i] = seg[i] * window[i];
    fft.Forward(buf, spec.frame(m));
  }
  return spec;
}

ComplexSpectrogram Stft(const AudioBuffer& audio, const StftConfig& config) {
  ValidateAudio(audio);
  return Stft(std::span<const double>(audio.samples), config);
}

std::vector<double> Istft(const ComplexSpectrogram& spec,
                          std::optional<std::size_t> length) {
  const StftConfig& config = spec.config;
  config.Validate();
  if (spec.data.size() != spec.n_frames * config.n_bins())
    Fail(ErrorCode::kDimensionMismatch,
         "spectrogram holds " + std::to_string(spec.data.size()) +
             " values, expected " + std::to_string(spec.n_frames) + " x " +
             std::to_string(config.n_bins()));

  const std::size_t natural =
      spec.n_frames == 0 ? 0 : (spec.n_frames - 1) * config.hop + config.window_len;
  const std::size_t out_len = length.value_or(natural);
  std::vector<double> out(out_len, 0.0);
  std::vector<double> norm(out_len, 0.0);

  const std::vector<double> window = config.Window();
  internal::RealFft fft(config.fft_size);
  std::vector<double> buf(config.fft_size);
  const double scale = 1.0 / static_cast<double>(config.fft_size);
  for (std::size_t m = 0; m < spec.n_frames; ++m) {
    fft.Inverse(spec.frame(m), buf);
    const std::size_t start = m * config.hop;
    const std::size_t n = std::min(config.window_len,
                                   out_len > start ? out_len - start : 0);
    for (std::size_t i = 0; i < n; ++i) {
      out[start + i] += buf[i] * scale * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < out_len; ++i)
    out[i] = norm[i] > 1e-8 ? out[i] / norm[i] : 0.0;
  return out;
}

PowerSpectrogram ComputePower(const ComplexSpectrogram& spec) {
  PowerSpectrogram power;
  power.n_frames = spec.n_frames;
  power.n_bins = spec.n_bins();
  power.data.resize(spec.data.size());
  std::transform(spec.data.begin(), spec.data.end(), power.data.begin(),
                 [](const std::complex<double>& z) { return std::norm(z); });
  return power;
}

}  // namespace odct
