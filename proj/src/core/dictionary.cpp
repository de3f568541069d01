// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "odct/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "odct/error.hpp"
#include "random.hpp"

namespace odct {

void TrainConfig::Validate() const {
  if (patch_len < 1)
    Fail(ErrorCode::kInvalidArgument, "patch length must be at least 1");
  if (stride <= patch_len)
    Fail(ErrorCode::kInvalidArgument,
         "patch stride M must exceed patch length L (M=" +
             std::to_string(stride) + ", L=" + std::to_string(patch_len) + ")");
  if (n_bands < 2) Fail(ErrorCode::kInvalidArgument, "need at least 2 bands");
  if (n_clusters < 1)
    Fail(ErrorCode::kInvalidArgument, "dictionary size K must be at least 1");
  if (n_patches < n_clusters)
    Fail(ErrorCode::kInvalidArgument,
         "patch budget (" + std::to_string(n_patches) +
             ") must be at least K (" + std::to_string(n_clusters) + ")");
  if (!(epsilon_floor > 0.0) || !std::isfinite(epsilon_floor))
    Fail(ErrorCode::kInvalidArgument, "epsilon floor must be positive");
  if (max_iters < 1)
    Fail(ErrorCode::kInvalidArgument, "max_iters must be at least 1");
}

namespace {

// Smallest float >= value.
float FloatAtLeast(double value) {
  float f = static_cast<float>(value);
  if (static_cast<double>(f) < value)
    f = std::nextafter(f, std::numeric_limits<float>::infinity());
  return f;
}

}  // namespace

Dictionary::Dictionary(AnalysisInfo info, std::vector<float> entries,
                       std::uint64_t rng_seed, std::string provenance)
    : info_(std::move(info)),
      entries_(std::move(entries)),
      rng_seed_(rng_seed),
      provenance_(std::move(provenance)) {
  info_.stft.Validate();
  if (info_.sample_rate <= 0)
    Fail(ErrorCode::kInvalidArgument, "dictionary sample rate must be positive");
  if (info_.stft.window != WindowType::kSqrtHann)
    Fail(ErrorCode::kInvalidArgument,
         "dictionaries are defined for the sqrt-hann analysis window");
  if (info_.patch_len < 1)
    Fail(ErrorCode::kInvalidArgument, "patch length must be at least 1");
  if (!(info_.epsilon_floor > 0.0))
    Fail(ErrorCode::kInvalidArgument, "epsilon floor must be positive");
  bank_ = FilterBank::Uniform(info_.n_bands, info_.stft.fft_size);

  const std::size_t dim = info_.feature_size();
  if (entries_.empty() || entries_.size() % dim != 0)
    Fail(ErrorCode::kDimensionMismatch,
         "dictionary holds " + std::to_string(entries_.size()) +
             " values, not a positive multiple of L*N' = " +
             std::to_string(dim));
  n_entries_ = entries_.size() / dim;
  log_entries_.resize(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double v = entries_[i];
    if (!(v >= info_.epsilon_floor) || !std::isfinite(v))
      Fail(ErrorCode::kInvalidArgument,
           "dictionary entry value below epsilon floor or non-finite");
    log_entries_[i] = std::log(v);
  }
}

std::pair<PowerSpectrogram, double> NormalizeSentencePower(
    const PowerSpectrogram& spec) {
  if (spec.data.empty())
    Fail(ErrorCode::kInvalidArgument, "empty spectrogram");
  double total = 0.0;
  for (double v : spec.data) total += v;
  if (!(total > 0.0) || !std::isfinite(total))
    Fail(ErrorCode::kSilentInput, "silent sentence");
  const double scale = static_cast<double>(spec.data.size()) / total;
  PowerSpectrogram out = spec;
  for (double& v : out.data) v *= scale;
  return {std::move(out), scale};
}

FeatureVector ExtractPatch(const PowerSpectrogram& spec, const FilterBank& bank,
                           std::size_t start, std::size_t patch_len,
                           double epsilon_floor) {
  if (spec.n_bins != bank.n_bins())
    Fail(ErrorCode::kDimensionMismatch,
         "spectrogram has " + std::to_string(spec.n_bins) +
             " bins, filter bank expects " + std::to_string(bank.n_bins()));
  if (start + patch_len > spec.n_frames)
    Fail(ErrorCode::kInvalidArgument, "patch extends past the last frame");
  const std::size_t n_bands = bank.n_bands();
  FeatureVector patch{std::vector<double>(patch_len * n_bands), patch_len,
                      n_bands};
  for (std::size_t l = 0; l < patch_len; ++l) {
    std::span<double> out(patch.values.data() + l * n_bands, n_bands);
    bank.Apply(spec.frame(start + l), out);
  }
  for (double& v : patch.values) v = std::max(v, epsilon_floor);
  return patch;
}

std::vector<FeatureVector> SamplePatches(const PowerSpectrogram& spec,
                                         const FilterBank& bank,
                                         const TrainConfig& cfg) {
  if (cfg.stride <= cfg.patch_len || cfg.patch_len == 0)
    Fail(ErrorCode::kInvalidArgument, "patch stride M must exceed L");
  std::vector<FeatureVector> patches;
  for (std::size_t m = 0; m + cfg.patch_len <= spec.n_frames; m += cfg.stride)
    patches.push_back(
        ExtractPatch(spec, bank, m, cfg.patch_len, cfg.epsilon_floor));
  return patches;
}

double LogDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    Fail(ErrorCode::kDimensionMismatch, "log distance of unequal lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::log(a[i]) - std::log(b[i]);
    acc += d * d;
  }
  return acc;
}

KMeansResult KMeansLog(std::span<const FeatureVector> patches,
                       std::size_t n_clusters, std::size_t max_iters,
                       std::uint64_t seed) {
  const std::size_t n = patches.size();
  if (n_clusters == 0)
    Fail(ErrorCode::kInvalidArgument, "K must be at least 1");
  if (n_clusters > n)
    Fail(ErrorCode::kInsufficientData,
         "K (" + std::to_string(n_clusters) + ") exceeds the number of patches (" +
             std::to_string(n) + ")");
  const std::size_t dim = patches[0].size();
  if (dim == 0) Fail(ErrorCode::kInvalidArgument, "empty feature vectors");

  // Work entirely in the log domain: the log distance becomes squared
  // Euclidean and the geometric mean becomes the arithmetic mean.
  std::vector<double> logs(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (patches[i].size() != dim)
      Fail(ErrorCode::kDimensionMismatch, "patches differ in length");
    for (std::size_t d = 0; d < dim; ++d) {
      const double v = patches[i].values[d];
      if (!(v > 0.0) || !std::isfinite(v))
        Fail(ErrorCode::kInvalidArgument,
             "patch values must be positive and finite before clustering");
      logs[i * dim + d] = std::log(v);
    }
  }

  const std::size_t k = n_clusters;
  std::vector<double> centers(k * dim);
  std::mt19937_64 rng(seed);
  const auto init = internal::SampleDistinct(rng, n, k);
  for (std::size_t j = 0; j < k; ++j)
    std::copy_n(logs.begin() + init[j] * dim, dim, centers.begin() + j * dim);

  KMeansResult result;
  result.n_clusters = k;
  result.dim = dim;
  std::vector<std::size_t> assign(n, k);
  std::vector<std::size_t> previous;
  std::vector<double> dist(n);
  std::vector<std::size_t> counts(k);

  auto sq_dist = [&](std::size_t i, std::size_t j) {
    const double* x = logs.data() + i * dim;
    const double* c = centers.data() + j * dim;
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = x[d] - c[d];
      acc += diff * diff;
    }
    return acc;
  };

  bool converged = false;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = sq_dist(i, 0);
      for (std::size_t j = 1; j < k; ++j) {
        const double d = sq_dist(i, j);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      assign[i] = best;
      dist[i] = best_d;
      objective += best_d;
    }
    result.objective_history.push_back(objective);
    if (assign == previous) {
      converged = true;
      break;
    }

    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++counts[assign[i]];
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] != 0) continue;
      // Moving the worst-fit patch into the empty cluster zeroes its term,
      // so the objective still decreases.
      std::size_t worst = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[assign[i]] < 2) continue;
        if (worst == n || dist[i] > dist[worst]) worst = i;
      }
      if (worst == n) break;
      --counts[assign[worst]];
      assign[worst] = j;
      counts[j] = 1;
      dist[worst] = 0.0;
      ++result.reseeded;
    }

    std::fill(centers.begin(), centers.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double* c = centers.data() + assign[i] * dim;
      const double* x = logs.data() + i * dim;
      for (std::size_t d = 0; d < dim; ++d) c[d] += x[d];
    }
    for (std::size_t j = 0; j < k; ++j) {
      const double inv = 1.0 / static_cast<double>(counts[j]);
      for (std::size_t d = 0; d < dim; ++d) centers[j * dim + d] *= inv;
    }
    previous = assign;
    ++result.iterations;
  }

  if (!converged) {
    // Out of iterations right after an update step; record the objective of
    // the final centroids under the final assignments.
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) objective += sq_dist(i, assign[i]);
    result.objective_history.push_back(objective);
  }

  result.assignments = std::move(assign);
  result.centroids.resize(k * dim);
  for (std::size_t i = 0; i < k * dim; ++i)
    result.centroids[i] = std::exp(centers[i]);
  return result;
}

namespace {

std::uint64_t Fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

TrainResult TrainDictionary(std::span<const AudioBuffer> corpus,
                            const TrainConfig& cfg, const StftConfig& stft,
                            const FilterBank& bank) {
  cfg.Validate();
  stft.Validate();
  if (corpus.empty()) Fail(ErrorCode::kInvalidArgument, "empty training corpus");
  if (bank.n_bins() != stft.n_bins() || bank.n_bands() != cfg.n_bands)
    Fail(ErrorCode::kDimensionMismatch,
         "filter bank does not match the stft size and band count");

  const int rate = corpus[0].sample_rate;
  std::uint64_t hash = 0xcbf29ce484222325ull;
  std::vector<FeatureVector> pool;
  for (const AudioBuffer& sentence : corpus) {
    ValidateAudio(sentence);
    if (sentence.sample_rate != rate)
      Fail(ErrorCode::kRateMismatch,
           "corpus mixes sample rates " + std::to_string(rate) + " and " +
               std::to_string(sentence.sample_rate));
    for (double s : sentence.samples) hash = Fnv1a(hash, &s, sizeof s);
    if (sentence.size() < stft.window_len) continue;
    const PowerSpectrogram power = ComputePower(Stft(sentence, stft));
    double total = 0.0;
    for (double v : power.data) total += v;
    if (!(total > 0.0)) continue;  // silent sentences contribute nothing
    auto patches =
        SamplePatches(NormalizeSentencePower(power).first, bank, cfg);
    std::move(patches.begin(), patches.end(), std::back_inserter(pool));
  }

  const std::size_t collected = pool.size();
  if (collected < cfg.n_clusters)
    Fail(ErrorCode::kInsufficientData,
         "corpus yielded " + std::to_string(collected) +
             " patches, fewer than K = " + std::to_string(cfg.n_clusters));

  std::mt19937_64 rng(cfg.rng_seed);
  if (collected > cfg.n_patches) {
    auto keep = internal::SampleDistinct(rng, collected, cfg.n_patches);
    std::sort(keep.begin(), keep.end());
    std::vector<FeatureVector> subset;
    subset.reserve(keep.size());
    for (std::size_t i : keep) subset.push_back(std::move(pool[i]));
    pool = std::move(subset);
  }

  KMeansResult clustering =
      KMeansLog(pool, cfg.n_clusters, cfg.max_iters, rng());

  std::vector<float> entries(clustering.centroids.size());
  for (std::size_t i = 0; i < entries.size(); ++i)
    entries[i] = FloatAtLeast(std::max(clustering.centroids[i], cfg.epsilon_floor));

  char prov[192];
  std::snprintf(prov, sizeof prov,
                "corpus_fnv1a64=%016llx sentences=%zu patches_collected=%zu "
                "patches_used=%zu seed=%llu",
                static_cast<unsigned long long>(hash), corpus.size(), collected,
                pool.size(), static_cast<unsigned long long>(cfg.rng_seed));

  AnalysisInfo info;
  info.sample_rate = rate;
  info.stft = stft;
  info.n_bands = cfg.n_bands;
  info.patch_len = cfg.patch_len;
  info.epsilon_floor = cfg.epsilon_floor;
  Dictionary dict(info, std::move(entries), cfg.rng_seed, prov);
  return TrainResult{std::move(dict), std::move(clustering), std::move(pool),
                     collected};
}

}  // namespace odct
