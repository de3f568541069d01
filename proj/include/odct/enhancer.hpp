// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Dictionary-guided enhancement. Each noisy patch is matched to its closest
// dictionary entry up to a gain; bins whose power is an outlier under an
// exponential model centred on that entry are treated as noise and removed by
// spectral subtraction, all other bins pass unchanged.

#ifndef ODCT_ENHANCER_HPP_
#define ODCT_ENHANCER_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "odct/audio.hpp"
#include "odct/dictionary.hpp"
#include "odct/dsp.hpp"

namespace odct {

enum class MaskMode {
  kOutlier,     // gain (F_Y - F_D) / F_Y with the outlier noise estimate
  kVqBaseline,  // gain min(F_X / F_Y, 1) from the matched entry alone
};

// How a band-domain power gain is applied to the complex STFT.
enum class GainApplication {
  kDirect,      // multiply the complex bins by the gain itself
  kSquareRoot,  // multiply by sqrt(gain), i.e. scale power by the gain
};

const char* MaskModeName(MaskMode mode);
MaskMode ParseMaskMode(const std::string& name);
const char* GainApplicationName(GainApplication app);
GainApplication ParseGainApplication(const std::string& name);

struct EnhanceConfig {
  // Outlier threshold c on the exponential p-value. c = 0 is accepted as the
  // limit in which nothing is an outlier.
  double threshold = 1e-4;
  double epsilon_floor = kDefaultEpsilonFloor;
  MaskMode mask_mode = MaskMode::kOutlier;
  double gain_floor = 0.0;
  GainApplication gain_application = GainApplication::kDirect;

  void Validate() const;
};

struct MatchResult {
  std::size_t entry = 0;
  double scale = 1.0;
  double log_distance = 0.0;
};

struct PatchMask {
  std::vector<double> gains;  // L * N', frame-major like FeatureVector
  std::size_t start_frame = 0;
};

// a = exp(mean(log(noisy / entry))): the gain minimizing the log distance.
double OptimalScale(std::span<const double> noisy, std::span<const double> entry);

// || log(noisy) - log(scale * entry) ||^2
double ScaledLogDistance(std::span<const double> noisy,
                         std::span<const double> entry, double scale);

// Closed-form scale per entry, lowest log distance wins, ties to lower index.
MatchResult BestMatch(std::span<const double> noisy, const Dictionary& dict);

// P(F >= observed) for F exponential with the given mean: exp(-observed/mean).
double PValueExponential(double observed, double mean);

// Noise estimate and outlier flags for one patch. A bin is an outlier when its
// p-value is below `threshold`; outliers get max(F_Y - F_X, 0), others 0.
struct NoiseEstimate {
  std::vector<double> noise;
  std::vector<bool> outlier;
  std::size_t n_outliers = 0;
};
NoiseEstimate EstimateNoisePatch(std::span<const double> noisy,
                                 std::span<const double> speech_estimate,
                                 double threshold);

// gain = max((F_Y - F_D) / F_Y, gain_floor)
PatchMask MaskPatch(std::span<const double> noisy, std::span<const double> noise,
                    double gain_floor);

// gain = max(min(F_X / F_Y, 1), gain_floor)
PatchMask VqMaskPatch(std::span<const double> noisy,
                      std::span<const double> speech_estimate, double gain_floor);

// Averages, for every frame, the gains of all patches covering it. Patches
// must start at 0, 1, ..., n_frames - L in order. Returns n_frames x N'.
std::vector<double> AggregateFrameMasks(std::span<const PatchMask> masks,
                                        std::size_t n_frames,
                                        std::size_t patch_len,
                                        std::size_t n_bands);

struct PatchDiagnostic {
  std::size_t start_frame = 0;
  std::size_t entry = 0;
  double scale = 0.0;
  double log_distance = 0.0;
  std::size_t n_outliers = 0;
};

// Per-frame gain mask computed from a noisy signal. The signal is padded by
// one hop of zeros at the start and zeros at the end up to a full frame, so
// every input sample lies under the full overlap-add.
struct GainMask {
  StftConfig stft;
  std::size_t n_samples = 0;  // original, unpadded length
  std::size_t pad_front = 0;
  std::size_t padded_len = 0;
  std::size_t n_frames = 0;
  std::size_t n_bands = 0;
  std::vector<double> band_gains;    // n_frames x N'
  std::vector<double> bin_gains;     // n_frames x (fft_size/2 + 1)
  // Fraction of covering patches that flagged (frame, band) as an outlier.
  std::vector<double> outlier_fraction;  // n_frames x N'
  std::vector<PatchDiagnostic> patches;

  std::span<const double> frame_bin_gains(std::size_t m) const {
    const std::size_t nb = stft.n_bins();
    return {bin_gains.data() + m * nb, nb};
  }
};

GainMask ComputeGainMask(const AudioBuffer& noisy, const Dictionary& dict,
                         const EnhanceConfig& cfg);

// Applies `mask` to any signal with the same length and rate as the one it
// was computed from, keeping that signal's phase.
AudioBuffer ApplyGainMask(const AudioBuffer& signal, const GainMask& mask,
                          GainApplication application);

struct EnhanceResult {
  AudioBuffer audio;
  GainMask mask;
};

EnhanceResult Enhance(const AudioBuffer& noisy, const Dictionary& dict,
                      const EnhanceConfig& cfg);

// One line per patch:
// start_frame=<m> entry=<j> scale=<a> distance=<d> n_outliers=<n>
std::string FormatDiagnostic(const PatchDiagnostic& diag);

}  // namespace odct

#endif  // ODCT_ENHANCER_HPP_
