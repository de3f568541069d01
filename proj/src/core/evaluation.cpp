// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "odct/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "fft.hpp"
#include "odct/error.hpp"
#include "random.hpp"

namespace odct {

MixResult MixAtSnr(const AudioBuffer& clean, const AudioBuffer& noise,
                   double snr_db, std::uint64_t seed) {
  ValidateAudio(clean);
  ValidateAudio(noise);
  if (!std::isfinite(snr_db))
    Fail(ErrorCode::kInvalidArgument, "target SNR must be finite");
  if (clean.sample_rate != noise.sample_rate)
    Fail(ErrorCode::kRateMismatch,
         "clean is " + std::to_string(clean.sample_rate) + " Hz, noise is " +
             std::to_string(noise.sample_rate) + " Hz");
  if (clean.empty() || noise.empty())
    Fail(ErrorCode::kInputTooShort, "clean and noise must be non-empty");

  std::mt19937_64 rng(seed);
  MixResult mix;
  const std::size_t n = clean.size();
  mix.noise_offset =
      noise.size() >= n
          ? static_cast<std::size_t>(internal::UniformIndex(rng, noise.size() - n + 1))
          : static_cast<std::size_t>(internal::UniformIndex(rng, noise.size()));

  std::vector<double> segment(n);
  for (std::size_t i = 0; i < n; ++i)
    segment[i] = noise.samples[(mix.noise_offset + i) % noise.size()];

  const double p_clean = MeanPower(clean.samples);
  const double p_noise = MeanPower(segment);
  if (!(p_clean > 0.0)) Fail(ErrorCode::kSilentInput, "clean signal is silent");
  if (!(p_noise > 0.0)) Fail(ErrorCode::kSilentInput, "noise segment is silent");
  mix.noise_scale = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));

  mix.scaled_noise.sample_rate = clean.sample_rate;
  mix.scaled_noise.samples.resize(n);
  mix.noisy.sample_rate = clean.sample_rate;
  mix.noisy.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    mix.scaled_noise.samples[i] = mix.noise_scale * segment[i];
    mix.noisy.samples[i] = clean.samples[i] + mix.scaled_noise.samples[i];
  }
  return mix;
}

namespace {

struct MetricFraming {
  std::size_t frame_len = 0;
  std::size_t hop = 0;
  std::size_t n_frames = 0;
};

MetricFraming MakeFraming(const AudioBuffer& reference, const AudioBuffer& test,
                          const MetricOptions& opts) {
  ValidateAudio(reference);
  ValidateAudio(test);
  if (reference.size() != test.size())
    Fail(ErrorCode::kDimensionMismatch,
         "reference has " + std::to_string(reference.size()) +
             " samples, test has " + std::to_string(test.size()));
  if (reference.sample_rate != test.sample_rate)
    Fail(ErrorCode::kRateMismatch, "reference and test sample rates differ");
  if (reference.empty()) Fail(ErrorCode::kInputTooShort, "empty signals");
  if (!(opts.frame_ms > 0.0) || !(opts.overlap >= 0.0 && opts.overlap < 1.0))
    Fail(ErrorCode::kInvalidArgument, "invalid metric framing");

  MetricFraming f;
  f.frame_len = std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::lround(opts.frame_ms * reference.sample_rate / 1000.0)));
  f.frame_len = std::min(f.frame_len, reference.size());
  f.hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::lround(static_cast<double>(f.frame_len) * (1.0 - opts.overlap))));
  f.n_frames = (reference.size() - f.frame_len) / f.hop + 1;
  return f;
}

// Reference frame energies and the activity mask derived from them.
std::vector<bool> ActiveFrames(const AudioBuffer& reference,
                               const MetricFraming& f, double ratio) {
  std::vector<double> energy(f.n_frames, 0.0);
  double mean = 0.0;
  for (std::size_t m = 0; m < f.n_frames; ++m) {
    const double* x = reference.samples.data() + m * f.hop;
    for (std::size_t i = 0; i < f.frame_len; ++i) energy[m] += x[i] * x[i];
    mean += energy[m];
  }
  mean /= static_cast<double>(f.n_frames);
  std::vector<bool> active(f.n_frames);
  for (std::size_t m = 0; m < f.n_frames; ++m)
    active[m] = energy[m] > 0.0 && energy[m] >= ratio * mean;
  return active;
}

double ClampedDb(double signal, double error) {
  if (error <= 0.0) return kMetricCeilDb;
  const double db = 10.0 * std::log10(signal / error);
  return std::clamp(db, kMetricFloorDb, kMetricCeilDb);
}

double Mean(const std::vector<FrameScore>& scores) {
  if (scores.empty())
    Fail(ErrorCode::kSilentInput, "reference has no active frames");
  double acc = 0.0;
  for (const auto& s : scores) acc += s.value_db;
  return acc / static_cast<double>(scores.size());
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular bands with Mel-spaced edges over 0..rate/2.
std::vector<std::vector<double>> MelBands(std::size_t n_bands,
                                          std::size_t fft_size, int rate) {
  const std::size_t n_bins = fft_size / 2 + 1;
  const double top = HzToMel(rate / 2.0);
  std::vector<double> edges(n_bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = MelToHz(top * static_cast<double>(i) /
                       static_cast<double>(n_bands + 1));
  std::vector<std::vector<double>> bands(n_bands, std::vector<double>(n_bins, 0.0));
  const double bin_hz = static_cast<double>(rate) / static_cast<double>(fft_size);
  for (std::size_t b = 0; b < n_bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double hz = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (hz > lo && hz <= mid) w = (hz - lo) / (mid - lo);
      else if (hz > mid && hz < hi) w = (hi - hz) / (hi - mid);
      bands[b][k] = w;
    }
  }
  return bands;
}

}  // namespace

double SegmentalSnr(const AudioBuffer& reference, const AudioBuffer& test,
                    const MetricOptions& opts, std::vector<FrameScore>* trace) {
  const MetricFraming f = MakeFraming(reference, test, opts);
  const std::vector<bool> active = ActiveFrames(reference, f, opts.activity_ratio);
  std::vector<FrameScore> scores;
  for (std::size_t m = 0; m < f.n_frames; ++m) {
    if (!active[m]) continue;
    const double* x = reference.samples.data() + m * f.hop;
    const double* y = test.samples.data() + m * f.hop;
    double sig = 0.0, err = 0.0;
    for (std::size_t i = 0; i < f.frame_len; ++i) {
      sig += x[i] * x[i];
      err += (x[i] - y[i]) * (x[i] - y[i]);
    }
    scores.push_back({m, ClampedDb(sig, err)});
  }
  const double result = Mean(scores);
  if (trace) *trace = std::move(scores);
  return result;
}

double FwSegSnr(const AudioBuffer& reference, const AudioBuffer& test,
                const MetricOptions& opts, std::vector<FrameScore>* trace) {
  const MetricFraming f = MakeFraming(reference, test, opts);
  if (opts.n_bands < 1) Fail(ErrorCode::kInvalidArgument, "need at least one band");
  const std::vector<bool> active = ActiveFrames(reference, f, opts.activity_ratio);

  std::size_t fft_size = 1;
  while (fft_size < f.frame_len) fft_size <<= 1;
  const auto bands = MelBands(opts.n_bands, fft_size, reference.sample_rate);
  std::vector<double> window(f.frame_len);
  for (std::size_t i = 0; i < f.frame_len; ++i)
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(f.frame_len));

  internal::RealFft fft(fft_size);
  const std::size_t n_bins = fft.n_bins();
  std::vector<double> buf(fft_size, 0.0);
  std::vector<std::complex<double>> spec(n_bins);
  std::vector<double> mag_ref(n_bins), mag_test(n_bins);
  auto magnitude = [&](const double* x, std::vector<double>& mag) {
    for (std::size_t i = 0; i < f.frame_len; ++i) buf[i] = x[i] * window[i];
    fft.Forward(buf, spec);
    for (std::size_t k = 0; k < n_bins; ++k) mag[k] = std::abs(spec[k]);
  };

  std::vector<FrameScore> scores;
  for (std::size_t m = 0; m < f.n_frames; ++m) {
    if (!active[m]) continue;
    magnitude(reference.samples.data() + m * f.hop, mag_ref);
    magnitude(test.samples.data() + m * f.hop, mag_test);
    double num = 0.0, den = 0.0;
    for (const auto& band : bands) {
      double r = 0.0, t = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k) {
        r += band[k] * mag_ref[k];
        t += band[k] * mag_test[k];
      }
      if (!(r > 0.0)) continue;
      const double w = std::pow(r, opts.weight_exponent);
      num += w * ClampedDb(r * r, (r - t) * (r - t));
      den += w;
    }
    if (den > 0.0) scores.push_back({m, num / den});
  }
  const double result = Mean(scores);
  if (trace) *trace = std::move(scores);
  return result;
}

MetricReport Evaluate(const AudioBuffer& reference, const AudioBuffer& test,
                      const MetricOptions& opts) {
  MetricReport report;
  report.seg_snr_db = SegmentalSnr(reference, test, opts, &report.seg_snr_trace);
  report.fw_seg_snr_db = FwSegSnr(reference, test, opts, &report.fw_seg_snr_trace);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", opts.frame_ms);
  report.config.emplace_back("frame_ms", buf);
  std::snprintf(buf, sizeof buf, "%g", opts.overlap);
  report.config.emplace_back("overlap", buf);
  report.config.emplace_back("fw_bands", std::to_string(opts.n_bands));
  std::snprintf(buf, sizeof buf, "%g", opts.weight_exponent);
  report.config.emplace_back("fw_weight_exponent", buf);
  return report;
}

DistortionResult SpeechDistortionRun(const AudioBuffer& clean,
                                     const AudioBuffer& noise, double snr_db,
                                     std::uint64_t seed, const Dictionary& dict,
                                     const EnhanceConfig& cfg,
                                     const MetricOptions& opts) {
  cfg.Validate();
  MixResult mix = MixAtSnr(clean, noise, snr_db, seed);
  const GainMask mask = ComputeGainMask(mix.noisy, dict, cfg);
  const AudioBuffer masked_clean = ApplyGainMask(clean, mask, cfg.gain_application);
  const AudioBuffer enhanced = ApplyGainMask(mix.noisy, mask, cfg.gain_application);

  DistortionResult result;
  result.noise_scale = mix.noise_scale;
  result.clean_through_mask = Evaluate(clean, masked_clean, opts);
  result.noisy = Evaluate(clean, mix.noisy, opts);
  result.enhanced = Evaluate(clean, enhanced, opts);

  char buf[64];
  std::vector<std::pair<std::string, std::string>> echo;
  std::snprintf(buf, sizeof buf, "%g", snr_db);
  echo.emplace_back("snr_db", buf);
  std::snprintf(buf, sizeof buf, "%g", cfg.threshold);
  echo.emplace_back("threshold", buf);
  echo.emplace_back("mode", MaskModeName(cfg.mask_mode));
  std::snprintf(buf, sizeof buf, "%g", cfg.gain_floor);
  echo.emplace_back("gain_floor", buf);
  echo.emplace_back("gain_application", GainApplicationName(cfg.gain_application));
  echo.emplace_back("seed", std::to_string(seed));
  for (MetricReport* r : {&result.clean_through_mask, &result.noisy, &result.enhanced})
    r->config.insert(r->config.begin(), echo.begin(), echo.end());
  return result;
}

std::string FormatReport(const MetricReport& report) {
  char buf[96];
  std::string out;
  std::snprintf(buf, sizeof buf, "seg_snr_db=%.2f\nfw_seg_snr_db=%.2f\n",
                report.seg_snr_db, report.fw_seg_snr_db);
  out += buf;
  for (const auto& [key, value] : report.config) out += key + "=" + value + "\n";
  return out;
}

}  // namespace odct
