// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.
//
//   acceptance <speech_corpus_dir>
//
// The corpus directory holds train/ and test/ subdirectories of 16 kHz mono
// WAV files (see tools/make_speech_corpus.py).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "odct/audio.hpp"
#include "odct/dictionary.hpp"
#include "odct/dsp.hpp"
#include "odct/enhancer.hpp"
#include "odct/error.hpp"
#include "odct/evaluation.hpp"
#include "test_signals.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string Fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::vector<odct::AudioBuffer> LoadDir(const fs::path& dir) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".wav") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<odct::AudioBuffer> out;
  for (const auto& f : files) out.push_back(odct::ReadWav(f));
  return out;
}

std::vector<char> Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

odct::TrainConfig SpeechTrainConfig() {
  odct::TrainConfig cfg;
  cfg.patch_len = 2;
  cfg.stride = 3;
  cfg.n_bands = 60;
  cfg.n_clusters = 100;
  cfg.n_patches = 10000;
  cfg.rng_seed = 1;
  return cfg;
}

odct::Dictionary TrainSpeech(const std::vector<odct::AudioBuffer>& corpus) {
  const odct::StftConfig stft;
  return odct::TrainDictionary(corpus, SpeechTrainConfig(), stft,
                               odct::FilterBank::Uniform(60, stft.fft_size))
      .dictionary;
}

odct::AudioBuffer Tone2k(std::size_t n) { return odct::testing::Tone(n, 2000.0, 0.3); }
odct::AudioBuffer ChirpNoise(std::size_t n) {
  return odct::testing::Chirp(n, 300.0, 3000.0, 2.0, 0.3);
}

// ---- criteria --------------------------------------------------------------

Outcome RoundTrip() {
  const auto t0 = Clock::now();
  const odct::StftConfig cfg;
  double worst = std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto x = odct::testing::RandomSignal(16000, 1000 + seed);
    const auto spec = odct::Stft(x, cfg);
    const auto y = odct::Istft(spec, x.size());
    const std::size_t covered = (spec.n_frames - 1) * cfg.hop + cfg.window_len;
    worst = std::min(worst, odct::testing::SnrDb(x, y, cfg.hop, covered - cfg.hop));
  }
  const double secs = Seconds(t0);
  return {worst >= 60.0 && secs < 5.0,
          "min interior SNR " + Fmt("%.1f", worst) + " dB over 100 signals in " + Fmt("%.2f", secs) + " s"};
}

Outcome PowerConservation() {
  const auto bank = odct::FilterBank::Uniform(60, 256);
  std::mt19937_64 rng(2);
  std::exponential_distribution<double> dist(1.0);
  double worst = 0.0;
  for (int f = 0; f < 1000; ++f) {
    std::vector<double> p(129);
    long double total = 0.0L;
    for (double& v : p) {
      v = dist(rng) * std::pow(10.0, 6.0 * (dist(rng) - 1.0));
      total += v;
    }
    long double bands = 0.0L;
    for (double v : bank.Apply(p)) bands += v;
    worst = std::max(worst, static_cast<double>(std::abs(bands - total) / total));
  }
  return {worst <= 1e-9, "max relative error " + Fmt("%.2e", worst) + " over 1000 frames"};
}

Outcome ClosedFormScale() {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> dist(0.0, 2.0);
  std::size_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> fy(120), s(120);
    for (double& v : fy) v = dist(rng);
    for (double& v : s) v = dist(rng);
    const double a = odct::OptimalScale(fy, s);
    const double d = odct::ScaledLogDistance(fy, s, a);
    for (int g = 0; g <= 2000; ++g) {
      const double cand = a * std::pow(10.0, -3.0 + 6.0 * g / 2000.0);
      double dc = 0.0;
      for (std::size_t i = 0; i < fy.size(); ++i) {
        const double e = std::log(fy[i]) - std::log(cand * s[i]);
        dc += e * e;
      }
      // The grid contains a itself, where both evaluations agree up to rounding.
      if (d > dc * (1.0 + 1e-12)) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " grid points beat the closed form (1000 pairs x 2001)"};
}

Outcome PValueCalibration() {
  Outcome o;
  for (double c : {0.1, 0.01}) {
    std::mt19937_64 rng(4);
    const double mu = 2.5;
    std::exponential_distribution<double> dist(1.0 / mu);
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i)
      if (odct::PValueExponential(dist(rng), mu) < c) ++hits;
    const double frac = static_cast<double>(hits) / n;
    const double bound = 3.0 * std::sqrt(c * (1.0 - c) / n);
    o.pass = o.pass && std::abs(frac - c) <= bound;
    o.detail += "c=" + Fmt("%g", c) + " fraction " + Fmt("%.5f", frac) + " (+-" + Fmt("%.5f", bound) + ") ";
  }
  return o;
}

Outcome IdentityLimit(const odct::Dictionary& dict) {
  odct::EnhanceConfig cfg;
  cfg.threshold = 0.0;
  double worst = std::numeric_limits<double>::infinity();
  bool all_one = true;
  const std::vector<odct::AudioBuffer> inputs{
      odct::testing::WhiteNoise(16000, 5, 0.1), odct::testing::Babble(24000, 6),
      Tone2k(12000), ChirpNoise(20000)};
  for (const auto& x : inputs) {
    const auto r = odct::Enhance(x, dict, cfg);
    for (double g : r.mask.band_gains) all_one = all_one && g == 1.0;
    worst = std::min(worst, odct::testing::SnrDb(x.samples, r.audio.samples, 0, x.size()));
  }
  return {all_one && worst >= 60.0,
          std::string(all_one ? "all band gains exactly 1" : "some band gain != 1") +
              ", min SNR vs input " + Fmt("%.1f", worst) + " dB"};
}

Outcome Monotonicity(const odct::Dictionary& dict, const odct::AudioBuffer& clean) {
  const auto noisy = odct::MixAtSnr(clean, Tone2k(clean.size()), 0.0, 7).noisy;
  const std::vector<double> cs{1e-6, 1e-4, 1e-2, 1e-1};
  std::vector<odct::GainMask> masks;
  for (double c : cs) {
    odct::EnhanceConfig cfg;
    cfg.threshold = c;
    masks.push_back(odct::ComputeGainMask(noisy, dict, cfg));
  }
  std::size_t gain_violations = 0;
  for (std::size_t k = 1; k < masks.size(); ++k) {
    for (std::size_t i = 0; i < masks[k].band_gains.size(); ++i)
      if (masks[k].band_gains[i] > masks[k - 1].band_gains[i]) ++gain_violations;
    for (std::size_t i = 0; i < masks[k].bin_gains.size(); ++i)
      if (masks[k].bin_gains[i] > masks[k - 1].bin_gains[i]) ++gain_violations;
  }

  // Outlier sets per patch and bin, recomputed from the same matched estimates.
  const auto& info = dict.info();
  std::vector<double> padded(masks[0].padded_len, 0.0);
  std::copy(noisy.samples.begin(), noisy.samples.end(), padded.begin() + masks[0].pad_front);
  const auto power = odct::ComputePower(odct::Stft(padded, info.stft));
  std::size_t nest_violations = 0, outliers_last = 0;
  for (std::size_t m = 0; m + info.patch_len <= power.n_frames; ++m) {
    const auto patch = odct::ExtractPatch(power, dict.filter_bank(), m, info.patch_len, info.epsilon_floor);
    const auto match = odct::BestMatch(patch.values, dict);
    std::vector<double> speech(patch.size());
    for (std::size_t i = 0; i < speech.size(); ++i)
      speech[i] = match.scale * static_cast<double>(dict.entry(match.entry)[i]);
    std::vector<bool> prev(patch.size(), false);
    for (double c : cs) {
      const auto est = odct::EstimateNoisePatch(patch.values, speech, c);
      for (std::size_t i = 0; i < prev.size(); ++i)
        if (prev[i] && !est.outlier[i]) ++nest_violations;
      prev = est.outlier;
    }
    outliers_last += std::count(prev.begin(), prev.end(), true);
  }
  return {gain_violations == 0 && nest_violations == 0,
          std::to_string(gain_violations) + " gain increases, " + std::to_string(nest_violations) +
              " non-nested outliers; " + std::to_string(outliers_last) + " outlier bins at c=0.1"};
}

Outcome KMeansProperties(const std::vector<odct::AudioBuffer>& corpus) {
  std::string detail;
  bool pass = true;

  // Objective never increases, on real speech patches and on random data.
  std::size_t increases = 0, runs = 0;
  auto check_history = [&](const odct::KMeansResult& r) {
    ++runs;
    for (std::size_t i = 1; i < r.objective_history.size(); ++i)
      if (r.objective_history[i] > r.objective_history[i - 1]) ++increases;
  };
  if (!corpus.empty()) {
    const odct::StftConfig stft;
    check_history(odct::TrainDictionary(corpus, SpeechTrainConfig(), stft,
                                        odct::FilterBank::Uniform(60, 256))
                      .clustering);
  }
  std::mt19937_64 rng(8);
  std::lognormal_distribution<double> ln(0.0, 2.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::vector<odct::FeatureVector> pts(600);
    for (auto& p : pts) {
      p.patch_len = 1;
      p.n_bands = 16;
      p.values.resize(16);
      for (double& v : p.values) v = ln(rng);
    }
    check_history(odct::KMeansLog(pts, 30, 100, seed));
  }
  pass = pass && increases == 0;
  detail += std::to_string(increases) + " objective increases in " + std::to_string(runs) + " runs; ";

  // Two separated groups come back exactly.
  std::uniform_real_distribution<double> jitter(0.99, 1.01);
  std::vector<odct::FeatureVector> groups;
  std::vector<int> truth;
  for (int i = 0; i < 12; ++i) {
    const double base = i < 6 ? 1.0 : 100.0;
    odct::FeatureVector f{{}, 1, 4};
    for (int d = 0; d < 4; ++d) f.values.push_back(base * jitter(rng));
    groups.push_back(f);
    truth.push_back(i < 6 ? 0 : 1);
  }
  bool recovered = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = odct::KMeansLog(groups, 2, 100, seed);
    for (std::size_t i = 0; i < groups.size(); ++i)
      for (std::size_t j = 0; j < groups.size(); ++j)
        recovered = recovered && ((r.assignments[i] == r.assignments[j]) == (truth[i] == truth[j]));
  }
  pass = pass && recovered;
  detail += std::string(recovered ? "two groups recovered" : "two groups NOT recovered") + "; ";

  // K = 1 centroid is the elementwise geometric mean.
  std::vector<odct::FeatureVector> pts(50);
  for (auto& p : pts) {
    p = {{}, 1, 10};
    for (int d = 0; d < 10; ++d) p.values.push_back(ln(rng));
  }
  const auto r1 = odct::KMeansLog(pts, 1, 10, 0);
  double worst = 0.0;
  for (std::size_t d = 0; d < 10; ++d) {
    long double acc = 0.0L;
    for (const auto& p : pts) acc += std::log(static_cast<long double>(p.values[d]));
    const double gm = static_cast<double>(std::exp(acc / pts.size()));
    worst = std::max(worst, std::abs(r1.centroid(0)[d] - gm) / gm);
  }
  pass = pass && worst <= 1e-9;
  detail += "K=1 geometric mean rel. error " + Fmt("%.1e", worst);
  return {pass, detail};
}

struct MixtureScores {
  std::size_t n_utterances = 0;
  double min_gain_db[2] = {0.0, 0.0};
  double mean_gain_db[2] = {0.0, 0.0};
  double max_seconds = 0.0;
  std::size_t fw_violations = 0;
  double min_fw_margin = std::numeric_limits<double>::infinity();
  double min_tone_drop = std::numeric_limits<double>::infinity();
  double mean_tone_drop = 0.0;
};

MixtureScores ScoreMixtures(const odct::Dictionary& dict, const std::vector<odct::AudioBuffer>& test) {
  MixtureScores s;
  s.n_utterances = test.size();
  for (int k = 0; k < 2; ++k) s.min_gain_db[k] = std::numeric_limits<double>::infinity();
  // Band whose centre is nearest the 2 kHz tone.
  const auto& centers = dict.filter_bank().band_centers();
  const double tone_bin = 2000.0 * dict.info().stft.fft_size / dict.info().sample_rate;
  std::size_t tone_band = 0;
  for (std::size_t b = 0; b < centers.size(); ++b)
    if (std::abs(centers[b] - tone_bin) < std::abs(centers[tone_band] - tone_bin)) tone_band = b;

  const odct::EnhanceConfig outlier_cfg;
  odct::EnhanceConfig vq_cfg;
  vq_cfg.mask_mode = odct::MaskMode::kVqBaseline;
  for (std::size_t u = 0; u < test.size(); ++u) {
    const auto& clean = test[u];
    for (int k = 0; k < 2; ++k) {
      const auto noise = k == 0 ? Tone2k(clean.size()) : ChirpNoise(clean.size());
      const auto mix = odct::MixAtSnr(clean, noise, 0.0, 100 + u);
      const auto t0 = Clock::now();
      const auto enhanced = odct::Enhance(mix.noisy, dict, outlier_cfg);
      s.max_seconds = std::max(s.max_seconds, Seconds(t0));
      const double gain = odct::SegmentalSnr(clean, enhanced.audio) - odct::SegmentalSnr(clean, mix.noisy);
      s.min_gain_db[k] = std::min(s.min_gain_db[k], gain);
      s.mean_gain_db[k] += gain / static_cast<double>(test.size());

      const auto o = odct::SpeechDistortionRun(clean, noise, 0.0, 100 + u, dict, outlier_cfg);
      const auto v = odct::SpeechDistortionRun(clean, noise, 0.0, 100 + u, dict, vq_cfg);
      const double margin = o.clean_through_mask.fw_seg_snr_db - v.clean_through_mask.fw_seg_snr_db;
      s.min_fw_margin = std::min(s.min_fw_margin, margin);
      if (margin < 0.0) ++s.fw_violations;

      if (k == 0) {
        const auto clean_mask = odct::ComputeGainMask(clean, dict, outlier_cfg);
        double g_noisy = 0.0, g_clean = 0.0;
        const std::size_t nb = enhanced.mask.n_bands;
        for (std::size_t m = 0; m < enhanced.mask.n_frames; ++m) {
          g_noisy += enhanced.mask.band_gains[m * nb + tone_band];
          g_clean += clean_mask.band_gains[m * nb + tone_band];
        }
        const double drop = (g_clean - g_noisy) / static_cast<double>(enhanced.mask.n_frames);
        s.min_tone_drop = std::min(s.min_tone_drop, drop);
        s.mean_tone_drop += drop / static_cast<double>(test.size());
      }
    }
  }
  return s;
}

Outcome Determinism(const std::vector<odct::AudioBuffer>& train, const odct::AudioBuffer& clean) {
  const fs::path dir = fs::temp_directory_path() / "odct_acceptance";
  fs::create_directories(dir);
  const auto noisy = odct::MixAtSnr(clean, ChirpNoise(clean.size()), 0.0, 10).noisy;
  for (int run = 0; run < 2; ++run) {
    const auto dict = TrainSpeech(train);
    odct::SaveDictionary(dict, dir / ("dict" + std::to_string(run) + ".odct"));
    const auto loaded = odct::LoadDictionary(dir / ("dict" + std::to_string(run) + ".odct"));
    odct::WriteWav(dir / ("out" + std::to_string(run) + ".wav"), odct::Enhance(noisy, loaded, {}).audio);
  }
  const bool same_dict = Slurp(dir / "dict0.odct") == Slurp(dir / "dict1.odct");
  const bool same_wav = Slurp(dir / "out0.wav") == Slurp(dir / "out1.wav");
  const auto bytes = fs::file_size(dir / "dict0.odct");
  fs::remove_all(dir);
  return {same_dict && same_wav, std::string("dictionary files ") + (same_dict ? "identical" : "DIFFER") +
                                     " (" + std::to_string(bytes) + " bytes), output WAVs " +
                                     (same_wav ? "identical" : "DIFFER")};
}

int failures = 0;

void Report(int id, const char* name, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path corpus_dir = argc > 1 ? fs::path(argv[1]) : fs::path();
  std::vector<odct::AudioBuffer> train, test;
  std::string corpus_problem;
  try {
    train = LoadDir(corpus_dir / "train");
    test = LoadDir(corpus_dir / "test");
  } catch (const std::exception& e) {
    corpus_problem = e.what();
  }
  double train_minutes = 0.0;
  for (const auto& a : train) train_minutes += a.size() / (60.0 * a.sample_rate);
  if (corpus_problem.empty() && (train.empty() || test.empty()))
    corpus_problem = "no speech corpus at '" + corpus_dir.string() + "'";

  Report(1, "stft round trip", RoundTrip);
  Report(2, "filter-bank power conservation", PowerConservation);
  Report(3, "closed-form amplitude factor", ClosedFormScale);
  Report(4, "p-value calibration", PValueCalibration);

  // Criteria 5 and 6 need a dictionary but not a particular corpus; use the
  // speech one when present and a synthetic stand-in otherwise.
  std::optional<odct::Dictionary> speech_dict;
  if (corpus_problem.empty()) speech_dict = TrainSpeech(train);
  const odct::AudioBuffer probe = test.empty() ? odct::testing::Babble(32000, 11) : test[0];
  auto any_dict = [&]() -> odct::Dictionary {
    if (speech_dict) return *speech_dict;
    std::vector<odct::AudioBuffer> synth;
    for (std::uint64_t s = 0; s < 8; ++s) synth.push_back(odct::testing::Babble(32000, 50 + s));
    return TrainSpeech(synth);
  };
  const odct::Dictionary dict = any_dict();

  Report(5, "identity limit", [&] { return IdentityLimit(dict); });
  Report(6, "monotonicity in c", [&] { return Monotonicity(dict, probe); });
  Report(7, "k-means", [&] { return KMeansProperties(train); });

  MixtureScores scores;
  std::string mixture_problem = corpus_problem;
  if (mixture_problem.empty() && train_minutes < 10.0)
    mixture_problem = "training corpus holds " + Fmt("%.1f", train_minutes) + " min, need >= 10";
  if (mixture_problem.empty()) {
    try {
      scores = ScoreMixtures(*speech_dict, test);
    } catch (const std::exception& e) {
      mixture_problem = e.what();
    }
  }

  Report(8, "directional enhancement", [&]() -> Outcome {
    if (!mixture_problem.empty()) return {false, mixture_problem};
    const bool pass = scores.min_gain_db[0] >= 3.0 && scores.min_gain_db[1] >= 3.0 && scores.max_seconds < 120.0;
    return {pass, Fmt("%.1f", train_minutes) + " min training speech, " + std::to_string(scores.n_utterances) +
                      " test utterances; segSNR gain tone min " + Fmt("%.2f", scores.min_gain_db[0]) + " / mean " +
                      Fmt("%.2f", scores.mean_gain_db[0]) + " dB, chirp min " + Fmt("%.2f", scores.min_gain_db[1]) +
                      " / mean " + Fmt("%.2f", scores.mean_gain_db[1]) + " dB; slowest utterance " +
                      Fmt("%.2f", scores.max_seconds) + " s"};
  });
  Report(9, "speech preservation", [&]() -> Outcome {
    if (!mixture_problem.empty()) return {false, mixture_problem};
    return {scores.fw_violations == 0,
            std::to_string(scores.fw_violations) + " of " + std::to_string(2 * scores.n_utterances) +
                " mixtures where vq beats outlier; smallest margin " + Fmt("%.2f", scores.min_fw_margin) + " dB"};
  });
  Report(10, "determinism", [&]() -> Outcome {
    if (!corpus_problem.empty()) return {false, corpus_problem};
    return Determinism(train, test[0]);
  });

  // Pilot regression on the tone band; recorded alongside the criteria.
  if (mixture_problem.empty()) {
    const bool pass = scores.min_tone_drop >= 0.3;
    if (!pass) ++failures;
    std::printf("%s tone-band gain drop: min %.3f, mean %.3f (need >= 0.3)\n", pass ? "PASS" : "FAIL",
                scores.min_tone_drop, scores.mean_tone_drop);
  }
  return failures == 0 ? 0 : 1;
}
