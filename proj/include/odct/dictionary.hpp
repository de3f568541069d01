// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Clean-speech patch dictionary: feature extraction, log-domain k-means
// training and the binary on-disk format.

#ifndef ODCT_DICTIONARY_HPP_
#define ODCT_DICTIONARY_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "odct/audio.hpp"
#include "odct/dsp.hpp"

namespace odct {

inline constexpr double kDefaultEpsilonFloor = 1e-10;

// A patch of `patch_len` filter-bank-reduced frames flattened frame-major:
// element i is band (i % n_bands) of frame (i / n_bands).
struct FeatureVector {
  std::vector<double> values;
  std::size_t patch_len = 0;
  std::size_t n_bands = 0;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

struct TrainConfig {
  std::size_t patch_len = 2;     // L, frames per patch
  std::size_t stride = 3;        // M, frames between patch starts; M > L
  std::size_t n_bands = 60;      // N'
  std::size_t n_clusters = 800;  // K
  std::size_t n_patches = 10000;
  double epsilon_floor = kDefaultEpsilonFloor;
  std::size_t max_iters = 100;
  std::uint64_t rng_seed = 1;

  void Validate() const;
};

// Everything needed to reproduce the feature extraction used in training.
struct AnalysisInfo {
  int sample_rate = kDefaultSampleRate;
  StftConfig stft;
  std::size_t n_bands = 60;
  std::size_t patch_len = 2;
  double epsilon_floor = kDefaultEpsilonFloor;

  std::size_t feature_size() const { return patch_len * n_bands; }
  bool operator==(const AnalysisInfo&) const = default;
};

// Immutable set of K centroids. Entry values are held at the 32-bit
// precision they are stored with on disk, so a loaded dictionary is equal to
// the one that was saved.
class Dictionary {
 public:
  Dictionary(AnalysisInfo info, std::vector<float> entries,
             std::uint64_t rng_seed, std::string provenance);

  const AnalysisInfo& info() const { return info_; }
  std::size_t size() const { return n_entries_; }
  std::size_t feature_size() const { return info_.feature_size(); }
  std::uint64_t rng_seed() const { return rng_seed_; }
  const std::string& provenance() const { return provenance_; }

  std::span<const float> entry(std::size_t j) const {
    return {entries_.data() + j * feature_size(), feature_size()};
  }
  // Natural log of entry(j), computed once at construction.
  std::span<const double> log_entry(std::size_t j) const {
    return {log_entries_.data() + j * feature_size(), feature_size()};
  }
  const std::vector<float>& values() const { return entries_; }
  const FilterBank& filter_bank() const { return bank_; }

  bool operator==(const Dictionary& other) const {
    return info_ == other.info_ && entries_ == other.entries_ &&
           rng_seed_ == other.rng_seed_ && provenance_ == other.provenance_;
  }

 private:
  AnalysisInfo info_;
  std::size_t n_entries_ = 0;
  std::vector<float> entries_;
  std::vector<double> log_entries_;
  std::uint64_t rng_seed_ = 0;
  std::string provenance_;
  FilterBank bank_;
};

// Scales a power spectrogram so that its mean bin power is exactly one.
// Returns the scaled spectrogram and the factor A = bins / total power.
std::pair<PowerSpectrogram, double> NormalizeSentencePower(
    const PowerSpectrogram& spec);

// Patches starting at frames 0, M, 2M, ... ; incomplete trailing patches are
// skipped and every value is floored at cfg.epsilon_floor.
std::vector<FeatureVector> SamplePatches(const PowerSpectrogram& spec,
                                         const FilterBank& bank,
                                         const TrainConfig& cfg);

// Reduces frames [start, start + patch_len) into one feature vector.
FeatureVector ExtractPatch(const PowerSpectrogram& spec, const FilterBank& bank,
                           std::size_t start, std::size_t patch_len,
                           double epsilon_floor);

// Squared Euclidean distance between elementwise natural logs.
double LogDistance(std::span<const double> a, std::span<const double> b);

struct KMeansResult {
  std::size_t n_clusters = 0;
  std::size_t dim = 0;
  // Row-major n_clusters x dim; geometric means of the final members.
  std::vector<double> centroids;
  std::vector<std::size_t> assignments;
  // Objective after every assignment step, in order.
  std::vector<double> objective_history;
  std::size_t iterations = 0;
  std::size_t reseeded = 0;

  std::span<const double> centroid(std::size_t j) const {
    return {centroids.data() + j * dim, dim};
  }
  double final_objective() const {
    return objective_history.empty() ? 0.0 : objective_history.back();
  }
};

// Lloyd iterations under log distance. Initial centroids are K distinct
// patches drawn with `seed`; ties go to the lowest centroid index; an empty
// cluster takes over the patch that is farthest from its own centroid.
KMeansResult KMeansLog(std::span<const FeatureVector> patches,
                       std::size_t n_clusters, std::size_t max_iters,
                       std::uint64_t seed);

struct TrainResult {
  Dictionary dictionary;
  KMeansResult clustering;
  std::vector<FeatureVector> patches;  // the pool that was clustered
  std::size_t patches_collected = 0;
};

TrainResult TrainDictionary(std::span<const AudioBuffer> corpus,
                            const TrainConfig& cfg, const StftConfig& stft,
                            const FilterBank& bank);

// Little-endian layout: "ODCT", u32 version (1), u32 sample_rate,
// u32 window_len, u32 hop, u32 fft_size, u32 n_bands, u32 patch_len, u32 K,
// f64 epsilon_floor, u64 rng_seed, u32 provenance length + UTF-8 bytes, then
// K * patch_len * n_bands f32 values, entry-major.
std::vector<std::uint8_t> SerializeDictionary(const Dictionary& dict);
Dictionary ParseDictionary(std::span<const std::uint8_t> bytes);

void SaveDictionary(const Dictionary& dict, const std::filesystem::path& path);
Dictionary LoadDictionary(const std::filesystem::path& path);

}  // namespace odct

#endif  // ODCT_DICTIONARY_HPP_
