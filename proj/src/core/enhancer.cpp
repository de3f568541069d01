// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "odct/enhancer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "odct/error.hpp"

namespace odct {

const char* MaskModeName(MaskMode mode) {
  switch (mode) {
    case MaskMode::kOutlier: return "outlier";
    case MaskMode::kVqBaseline: return "vq";
  }
  return "unknown";
}

MaskMode ParseMaskMode(const std::string& name) {
  if (name == "outlier") return MaskMode::kOutlier;
  if (name == "vq" || name == "vq_baseline") return MaskMode::kVqBaseline;
  Fail(ErrorCode::kInvalidArgument,
       "unknown mask mode '" + name + "' (expected outlier or vq)");
}

const char* GainApplicationName(GainApplication app) {
  switch (app) {
    case GainApplication::kDirect: return "direct";
    case GainApplication::kSquareRoot: return "sqrt";
  }
  return "unknown";
}

GainApplication ParseGainApplication(const std::string& name) {
  if (name == "direct") return GainApplication::kDirect;
  if (name == "sqrt") return GainApplication::kSquareRoot;
  Fail(ErrorCode::kInvalidArgument,
       "unknown gain application '" + name + "' (expected direct or sqrt)");
}

void EnhanceConfig::Validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0))
    Fail(ErrorCode::kInvalidArgument, "threshold c must lie in [0, 1]");
  if (!(epsilon_floor > 0.0) || !std::isfinite(epsilon_floor))
    Fail(ErrorCode::kInvalidArgument, "epsilon floor must be positive");
  if (!(gain_floor >= 0.0 && gain_floor < 1.0))
    Fail(ErrorCode::kInvalidArgument, "gain floor must lie in [0, 1)");
}

namespace {

void CheckSameLength(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    Fail(ErrorCode::kDimensionMismatch,
         std::string(what) + ": lengths differ (" + std::to_string(a) +
             " vs " + std::to_string(b) + ")");
}

void CheckPositive(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!(x > 0.0) || !std::isfinite(x))
      Fail(ErrorCode::kInvalidArgument,
           std::string(what) + " must be strictly positive and finite");
  }
}

}  // namespace

double OptimalScale(std::span<const double> noisy,
                    std::span<const double> entry) {
  CheckSameLength(noisy.size(), entry.size(), "optimal scale");
  if (noisy.empty()) Fail(ErrorCode::kInvalidArgument, "empty feature vector");
  CheckPositive(noisy, "noisy patch");
  CheckPositive(entry, "dictionary entry");
  double acc = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i)
    acc += std::log(noisy[i]) - std::log(entry[i]);
  return std::exp(acc / static_cast<double>(noisy.size()));
}

double ScaledLogDistance(std::span<const double> noisy,
                         std::span<const double> entry, double scale) {
  CheckSameLength(noisy.size(), entry.size(), "log distance");
  const double log_a = std::log(scale);
  double acc = 0.0;
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double d = std::log(noisy[i]) - log_a - std::log(entry[i]);
    acc += d * d;
  }
  return acc;
}

MatchResult BestMatch(std::span<const double> noisy, const Dictionary& dict) {
  if (dict.size() == 0) Fail(ErrorCode::kInvalidArgument, "empty dictionary");
  CheckSameLength(noisy.size(), dict.feature_size(), "best match");
  CheckPositive(noisy, "noisy patch");

  const std::size_t dim = noisy.size();
  const double inv_dim = 1.0 / static_cast<double>(dim);
  std::vector<double> log_y(dim);
  for (std::size_t i = 0; i < dim; ++i) log_y[i] = std::log(noisy[i]);

  std::vector<double> diff(dim);
  MatchResult best;
  bool first = true;
  for (std::size_t j = 0; j < dict.size(); ++j) {
    const auto log_s = dict.log_entry(j);
    double mean = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      diff[i] = log_y[i] - log_s[i];
      mean += diff[i];
    }
    mean *= inv_dim;
    double dist = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double r = diff[i] - mean;
      dist += r * r;
    }
    if (first || dist < best.log_distance) {
      best = {j, std::exp(mean), dist};
      first = false;
    }
  }
  return best;
}

double PValueExponential(double observed, double mean) {
  if (!(mean > 0.0))
    Fail(ErrorCode::kInvalidArgument, "exponential mean must be positive");
  if (!(observed >= 0.0))
    Fail(ErrorCode::kInvalidArgument, "observed power must be nonnegative");
  return std::exp(-observed / mean);
}

NoiseEstimate EstimateNoisePatch(std::span<const double> noisy,
                                 std::span<const double> speech_estimate,
                                 double threshold) {
  CheckSameLength(noisy.size(), speech_estimate.size(), "noise estimate");
  NoiseEstimate est;
  est.noise.assign(noisy.size(), 0.0);
  est.outlier.assign(noisy.size(), false);
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    if (PValueExponential(noisy[i], speech_estimate[i]) < threshold) {
      est.outlier[i] = true;
      ++est.n_outliers;
      est.noise[i] = std::max(noisy[i] - speech_estimate[i], 0.0);
    }
  }
  return est;
}

PatchMask MaskPatch(std::span<const double> noisy, std::span<const double> noise,
                    double gain_floor) {
  CheckSameLength(noisy.size(), noise.size(), "mask");
  CheckPositive(noisy, "noisy patch");
  PatchMask mask;
  mask.gains.resize(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double g = (noisy[i] - noise[i]) / noisy[i];
    mask.gains[i] = std::max(g, gain_floor);
  }
  return mask;
}

PatchMask VqMaskPatch(std::span<const double> noisy,
                      std::span<const double> speech_estimate,
                      double gain_floor) {
  CheckSameLength(noisy.size(), speech_estimate.size(), "vq mask");
  CheckPositive(noisy, "noisy patch");
  CheckPositive(speech_estimate, "speech estimate");
  PatchMask mask;
  mask.gains.resize(noisy.size());
  for (std::size_t i = 0; i < noisy.size(); ++i) {
    const double g = std::min(speech_estimate[i] / noisy[i], 1.0);
    mask.gains[i] = std::max(g, gain_floor);
  }
  return mask;
}

std::vector<double> AggregateFrameMasks(std::span<const PatchMask> masks,
                                        std::size_t n_frames,
                                        std::size_t patch_len,
                                        std::size_t n_bands) {
  if (patch_len == 0 || n_bands == 0)
    Fail(ErrorCode::kInvalidArgument, "patch length and band count must be positive");
  const std::size_t expected = n_frames >= patch_len ? n_frames - patch_len + 1 : 0;
  if (masks.size() != expected)
    Fail(ErrorCode::kDimensionMismatch,
         "expected " + std::to_string(expected) + " patch masks for " +
             std::to_string(n_frames) + " frames, got " +
             std::to_string(masks.size()));

  std::vector<double> sum(n_frames * n_bands, 0.0);
  std::vector<std::size_t> count(n_frames, 0);
  for (std::size_t p = 0; p < masks.size(); ++p) {
    const PatchMask& mask = masks[p];
    if (mask.start_frame != p || mask.gains.size() != patch_len * n_bands)
      Fail(ErrorCode::kDimensionMismatch,
           "patch mask " + std::to_string(p) + " is out of order or mis-sized");
    for (std::size_t l = 0; l < patch_len; ++l) {
      const std::size_t m = p + l;
      for (std::size_t b = 0; b < n_bands; ++b)
        sum[m * n_bands + b] += mask.gains[l * n_bands + b];
      ++count[m];
    }
  }
  for (std::size_t m = 0; m < n_frames; ++m) {
    if (count[m] == 0) continue;
    const double inv = 1.0 / static_cast<double>(count[m]);
    for (std::size_t b = 0; b < n_bands; ++b) sum[m * n_bands + b] *= inv;
  }
  return sum;
}

namespace {

struct Framing {
  std::size_t pad_front = 0;
  std::size_t padded_len = 0;
  std::size_t n_frames = 0;
};

// One hop of leading zeros, then trailing zeros until the last input sample
// is at least (window_len - hop) samples before the end of the final frame.
Framing PaddedFraming(std::size_t n_samples, const StftConfig& stft) {
  Framing f;
  f.pad_front = stft.hop;
  const std::size_t needed = f.pad_front + n_samples + (stft.window_len - stft.hop);
  f.n_frames = 1;
  if (needed > stft.window_len)
    f.n_frames += (needed - stft.window_len + stft.hop - 1) / stft.hop;
  f.padded_len = (f.n_frames - 1) * stft.hop + stft.window_len;
  return f;
}

std::vector<double> PadSignal(const AudioBuffer& audio, const Framing& f) {
  std::vector<double> padded(f.padded_len, 0.0);
  std::copy(audio.samples.begin(), audio.samples.end(),
            padded.begin() + static_cast<std::ptrdiff_t>(f.pad_front));
  return padded;
}

}  // namespace

GainMask ComputeGainMask(const AudioBuffer& noisy, const Dictionary& dict,
                         const EnhanceConfig& cfg) {
  cfg.Validate();
  ValidateAudio(noisy);
  const AnalysisInfo& info = dict.info();
  if (noisy.sample_rate != info.sample_rate)
    Fail(ErrorCode::kRateMismatch,
         "input sample rate " + std::to_string(noisy.sample_rate) +
             " Hz does not match dictionary sample rate " +
             std::to_string(info.sample_rate) + " Hz");
  const std::size_t patch_span =
      info.stft.window_len + (info.patch_len - 1) * info.stft.hop;
  if (noisy.size() < patch_span)
    Fail(ErrorCode::kInputTooShort,
         "input too short: " + std::to_string(noisy.size()) +
             " samples, one patch needs " + std::to_string(patch_span));

  const Framing framing = PaddedFraming(noisy.size(), info.stft);
  const std::vector<double> padded = PadSignal(noisy, framing);
  const PowerSpectrogram power = ComputePower(Stft(padded, info.stft));

  GainMask out;
  out.stft = info.stft;
  out.n_samples = noisy.size();
  out.pad_front = framing.pad_front;
  out.padded_len = framing.padded_len;
  out.n_frames = power.n_frames;
  out.n_bands = info.n_bands;

  const std::size_t L = info.patch_len;
  const std::size_t n_bands = info.n_bands;
  const std::size_t dim = dict.feature_size();
  const std::size_t n_patches = power.n_frames - L + 1;
  std::vector<PatchMask> masks(n_patches);
  std::vector<double> outlier_sum(power.n_frames * n_bands, 0.0);
  std::vector<std::size_t> cover(power.n_frames, 0);
  out.patches.resize(n_patches);
  std::vector<double> speech(dim);

  for (std::size_t m = 0; m < n_patches; ++m) {
    const FeatureVector patch =
        ExtractPatch(power, dict.filter_bank(), m, L, cfg.epsilon_floor);
    const MatchResult match = BestMatch(patch.values, dict);
    const auto entry = dict.entry(match.entry);
    for (std::size_t i = 0; i < dim; ++i)
      speech[i] = match.scale * static_cast<double>(entry[i]);

    const NoiseEstimate est =
        EstimateNoisePatch(patch.values, speech, cfg.threshold);
    masks[m] = cfg.mask_mode == MaskMode::kOutlier
                   ? MaskPatch(patch.values, est.noise, cfg.gain_floor)
                   : VqMaskPatch(patch.values, speech, cfg.gain_floor);
    masks[m].start_frame = m;

    for (std::size_t l = 0; l < L; ++l) {
      ++cover[m + l];
      for (std::size_t b = 0; b < n_bands; ++b)
        if (est.outlier[l * n_bands + b]) outlier_sum[(m + l) * n_bands + b] += 1.0;
    }
    out.patches[m] = {m, match.entry, match.scale, match.log_distance,
                      est.n_outliers};
  }

  out.band_gains = AggregateFrameMasks(masks, power.n_frames, L, n_bands);
  out.outlier_fraction = std::move(outlier_sum);
  for (std::size_t m = 0; m < power.n_frames; ++m) {
    if (cover[m] == 0) continue;
    for (std::size_t b = 0; b < n_bands; ++b)
      out.outlier_fraction[m * n_bands + b] /= static_cast<double>(cover[m]);
  }

  const std::size_t n_bins = info.stft.n_bins();
  out.bin_gains.resize(power.n_frames * n_bins);
  for (std::size_t m = 0; m < power.n_frames; ++m) {
    dict.filter_bank().Expand(
        std::span<const double>(out.band_gains.data() + m * n_bands, n_bands),
        std::span<double>(out.bin_gains.data() + m * n_bins, n_bins));
  }
  return out;
}

AudioBuffer ApplyGainMask(const AudioBuffer& signal, const GainMask& mask,
                          GainApplication application) {
  ValidateAudio(signal);
  if (signal.size() != mask.n_samples)
    Fail(ErrorCode::kDimensionMismatch,
         "signal has " + std::to_string(signal.size()) +
             " samples, mask was computed for " +
             std::to_string(mask.n_samples));
  Framing framing;
  framing.pad_front = mask.pad_front;
  framing.padded_len = mask.padded_len;
  framing.n_frames = mask.n_frames;
  const std::vector<double> padded = PadSignal(signal, framing);
  ComplexSpectrogram spec = Stft(padded, mask.stft);
  if (spec.n_frames != mask.n_frames)
    Fail(ErrorCode::kDimensionMismatch, "mask frame count does not match signal");

  for (std::size_t m = 0; m < spec.n_frames; ++m) {
    auto frame = spec.frame(m);
    const auto gains = mask.frame_bin_gains(m);
    for (std::size_t k = 0; k < frame.size(); ++k) {
      const double g = application == GainApplication::kDirect
                           ? gains[k]
                           : std::sqrt(std::max(gains[k], 0.0));
      frame[k] *= g;
    }
  }
  const std::vector<double> synth = Istft(spec, mask.padded_len);
  AudioBuffer out;
  out.sample_rate = signal.sample_rate;
  out.samples.assign(
      synth.begin() + static_cast<std::ptrdiff_t>(mask.pad_front),
      synth.begin() + static_cast<std::ptrdiff_t>(mask.pad_front + mask.n_samples));
  return out;
}

EnhanceResult Enhance(const AudioBuffer& noisy, const Dictionary& dict,
                      const EnhanceConfig& cfg) {
  GainMask mask = ComputeGainMask(noisy, dict, cfg);
  AudioBuffer audio = ApplyGainMask(noisy, mask, cfg.gain_application);
  return {std::move(audio), std::move(mask)};
}

std::string FormatDiagnostic(const PatchDiagnostic& diag) {
  char line[160];
  std::snprintf(line, sizeof line,
                "start_frame=%zu entry=%zu scale=%.9g distance=%.9g "
                "n_outliers=%zu",
                diag.start_frame, diag.entry, diag.scale, diag.log_distance,
                diag.n_outliers);
  return line;
}

}  // namespace odct
