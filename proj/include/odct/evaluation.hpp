// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef ODCT_EVALUATION_HPP_
#define ODCT_EVALUATION_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "odct/audio.hpp"
#include "odct/dictionary.hpp"
#include "odct/enhancer.hpp"

namespace odct {

inline constexpr double kMetricFloorDb = -10.0;
inline constexpr double kMetricCeilDb = 35.0;

struct MixResult {
  AudioBuffer noisy;
  AudioBuffer scaled_noise;
  double noise_scale = 1.0;
  std::size_t noise_offset = 0;
};

// Adds `noise` scaled so that 10 log10(P_clean / P_noise) = snr_db over the
// clean utterance. A longer noise contributes a seeded random segment; a
// shorter one is looped from a seeded random start.
MixResult MixAtSnr(const AudioBuffer& clean, const AudioBuffer& noise,
                   double snr_db, std::uint64_t seed);

struct FrameScore {
  std::size_t frame = 0;
  double value_db = 0.0;
};

// 32 ms frames with 50% overlap. Frames whose reference energy is below 1e-6
// of the mean frame energy are skipped; per-frame values are clamped to
// [-10, 35] dB before averaging.
struct MetricOptions {
  double frame_ms = 32.0;
  double overlap = 0.5;
  double activity_ratio = 1e-6;
  std::size_t n_bands = 25;  // fwSegSNR, Mel-spaced over 0..rate/2
  double weight_exponent = 0.2;
};

double SegmentalSnr(const AudioBuffer& reference, const AudioBuffer& test,
                    const MetricOptions& opts = {},
                    std::vector<FrameScore>* trace = nullptr);

double FwSegSnr(const AudioBuffer& reference, const AudioBuffer& test,
                const MetricOptions& opts = {},
                std::vector<FrameScore>* trace = nullptr);

struct MetricReport {
  double seg_snr_db = 0.0;
  double fw_seg_snr_db = 0.0;
  std::vector<FrameScore> seg_snr_trace;
  std::vector<FrameScore> fw_seg_snr_trace;
  std::vector<std::pair<std::string, std::string>> config;
};

MetricReport Evaluate(const AudioBuffer& reference, const AudioBuffer& test,
                      const MetricOptions& opts = {});

struct DistortionResult {
  MetricReport clean_through_mask;  // reference clean, test masked clean
  MetricReport noisy;               // reference clean, test mixture
  MetricReport enhanced;            // reference clean, test enhanced mixture
  double noise_scale = 1.0;
};

// Computes the gain mask from the mixture of clean and noise, then passes only
// the clean signal through that mask and scores it against itself.
DistortionResult SpeechDistortionRun(const AudioBuffer& clean,
                                     const AudioBuffer& noise, double snr_db,
                                     std::uint64_t seed, const Dictionary& dict,
                                     const EnhanceConfig& cfg,
                                     const MetricOptions& opts = {});

// "key=value" lines: seg_snr_db, fw_seg_snr_db, then the config echo.
std::string FormatReport(const MetricReport& report);

}  // namespace odct

#endif  // ODCT_EVALUATION_HPP_
