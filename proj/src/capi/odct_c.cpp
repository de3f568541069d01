// Copyright 2026 The odct Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "odct/odct.h"

#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "odct/audio.hpp"
#include "odct/dictionary.hpp"
#include "odct/enhancer.hpp"
#include "odct/error.hpp"
#include "odct/evaluation.hpp"

struct odct_audio {
  odct::AudioBuffer buffer;
};

struct odct_dictionary {
  odct::Dictionary dict;
};

namespace {

thread_local std::string g_last_error;

odct_status SetError(odct_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
odct_status Guard(Fn&& fn) {
  try {
    fn();
    return ODCT_OK;
  } catch (const odct::Error& e) {
    return SetError(static_cast<odct_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return SetError(ODCT_EINTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return SetError(ODCT_EINTERNAL, e.what());
  }
}

void Require(bool ok, const char* what) {
  if (!ok) odct::Fail(odct::ErrorCode::kInvalidArgument, what);
}

odct::TrainConfig ToTrainConfig(const odct_train_config& c) {
  odct::TrainConfig cfg;
  cfg.patch_len = c.patch_len;
  cfg.stride = c.stride;
  cfg.n_bands = c.n_bands;
  cfg.n_clusters = c.n_clusters;
  cfg.n_patches = c.n_patches;
  cfg.epsilon_floor = c.epsilon_floor;
  cfg.max_iters = c.max_iters;
  cfg.rng_seed = c.seed;
  return cfg;
}

odct::EnhanceConfig ToEnhanceConfig(const odct_enhance_config& c) {
  odct::EnhanceConfig cfg;
  cfg.threshold = c.threshold;
  cfg.epsilon_floor = c.epsilon_floor;
  cfg.gain_floor = c.gain_floor;
  switch (c.mask_mode) {
    case ODCT_MASK_OUTLIER: cfg.mask_mode = odct::MaskMode::kOutlier; break;
    case ODCT_MASK_VQ: cfg.mask_mode = odct::MaskMode::kVqBaseline; break;
    default: Require(false, "unknown mask mode");
  }
  switch (c.gain_application) {
    case ODCT_GAIN_DIRECT: cfg.gain_application = odct::GainApplication::kDirect; break;
    case ODCT_GAIN_SQRT: cfg.gain_application = odct::GainApplication::kSquareRoot; break;
    default: Require(false, "unknown gain application");
  }
  return cfg;
}

odct_metrics ToMetrics(const odct::MetricReport& r) {
  return {r.seg_snr_db, r.fw_seg_snr_db};
}

void ValidateTrain(const odct_train_config& c) {
  Require(c.sample_rate > 0, "sample rate must be positive");
  const auto stft = odct::StftConfig::ForDuration(c.window_ms, c.sample_rate);
  stft.Validate();
  ToTrainConfig(c).Validate();
  if (c.n_bands > stft.n_bins())
    odct::Fail(odct::ErrorCode::kInvalidArgument,
               "band count " + std::to_string(c.n_bands) + " exceeds the " +
                   std::to_string(stft.n_bins()) + " DFT bins of a " +
                   std::to_string(c.window_ms) + " ms window");
}

}  // namespace

extern "C" {

const char* odct_version(void) { return "0.1.0"; }

const char* odct_last_error(void) { return g_last_error.c_str(); }

const char* odct_status_name(odct_status status) {
  if (status == ODCT_OK) return "ok";
  if (status == ODCT_EINTERNAL) return "internal error";
  return odct::ErrorCodeName(static_cast<odct::ErrorCode>(status));
}

odct_status odct_audio_create(const double* samples, size_t n, int sample_rate,
                              odct_audio** out) {
  return Guard([&] {
    Require(out != nullptr, "output handle is null");
    Require(samples != nullptr || n == 0, "samples pointer is null");
    auto audio = std::make_unique<odct_audio>();
    audio->buffer.sample_rate = sample_rate;
    audio->buffer.samples.assign(samples, samples + n);
    odct::ValidateAudio(audio->buffer);
    *out = audio.release();
  });
}

odct_status odct_audio_read_wav(const char* path, odct_audio** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    auto audio = std::make_unique<odct_audio>();
    audio->buffer = odct::ReadWav(path);
    *out = audio.release();
  });
}

odct_status odct_audio_write_wav(const odct_audio* audio, const char* path) {
  return Guard([&] {
    Require(audio != nullptr && path != nullptr, "null argument");
    odct::WriteWav(path, audio->buffer);
  });
}

void odct_audio_free(odct_audio* audio) { delete audio; }

size_t odct_audio_length(const odct_audio* audio) {
  return audio ? audio->buffer.size() : 0;
}

int odct_audio_sample_rate(const odct_audio* audio) {
  return audio ? audio->buffer.sample_rate : 0;
}

const double* odct_audio_samples(const odct_audio* audio) {
  return audio ? audio->buffer.samples.data() : nullptr;
}

void odct_train_config_init(odct_train_config* cfg) {
  if (!cfg) return;
  const odct::TrainConfig d;
  cfg->sample_rate = odct::kDefaultSampleRate;
  cfg->window_ms = 10.0;
  cfg->patch_len = static_cast<uint32_t>(d.patch_len);
  cfg->stride = static_cast<uint32_t>(d.stride);
  cfg->n_bands = static_cast<uint32_t>(d.n_bands);
  cfg->n_clusters = static_cast<uint32_t>(d.n_clusters);
  cfg->n_patches = static_cast<uint32_t>(d.n_patches);
  cfg->max_iters = static_cast<uint32_t>(d.max_iters);
  cfg->epsilon_floor = d.epsilon_floor;
  cfg->seed = d.rng_seed;
}

odct_status odct_train_config_validate(const odct_train_config* cfg) {
  return Guard([&] {
    Require(cfg != nullptr, "null config");
    ValidateTrain(*cfg);
  });
}

odct_status odct_train(const odct_audio* const* corpus, size_t n,
                       const odct_train_config* cfg, odct_dictionary** out,
                       odct_train_report* report) {
  return Guard([&] {
    Require(cfg != nullptr && out != nullptr, "null argument");
    Require(corpus != nullptr || n == 0, "corpus pointer is null");
    ValidateTrain(*cfg);
    std::vector<odct::AudioBuffer> sentences;
    sentences.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      Require(corpus[i] != nullptr, "null corpus entry");
      if (corpus[i]->buffer.sample_rate != cfg->sample_rate)
        odct::Fail(odct::ErrorCode::kRateMismatch,
                   "corpus entry " + std::to_string(i) + " is " +
                       std::to_string(corpus[i]->buffer.sample_rate) +
                       " Hz, expected " + std::to_string(cfg->sample_rate) +
                       " Hz");
      sentences.push_back(corpus[i]->buffer);
    }
    const auto stft = odct::StftConfig::ForDuration(cfg->window_ms, cfg->sample_rate);
    const auto bank = odct::FilterBank::Uniform(cfg->n_bands, stft.fft_size);
    odct::TrainResult result =
        odct::TrainDictionary(sentences, ToTrainConfig(*cfg), stft, bank);
    if (report) {
      report->patches_collected = result.patches_collected;
      report->patches_used = result.patches.size();
      report->iterations = result.clustering.iterations;
      report->reseeded = result.clustering.reseeded;
      report->final_objective = result.clustering.final_objective();
    }
    *out = new odct_dictionary{std::move(result.dictionary)};
  });
}

odct_status odct_dictionary_load(const char* path, odct_dictionary** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = new odct_dictionary{odct::LoadDictionary(path)};
  });
}

odct_status odct_dictionary_save(const odct_dictionary* dict, const char* path) {
  return Guard([&] {
    Require(dict != nullptr && path != nullptr, "null argument");
    odct::SaveDictionary(dict->dict, path);
  });
}

void odct_dictionary_free(odct_dictionary* dict) { delete dict; }

odct_status odct_dictionary_get_info(const odct_dictionary* dict,
                                     odct_dictionary_info* info) {
  return Guard([&] {
    Require(dict != nullptr && info != nullptr, "null argument");
    const auto& a = dict->dict.info();
    info->sample_rate = a.sample_rate;
    info->window_len = static_cast<uint32_t>(a.stft.window_len);
    info->hop = static_cast<uint32_t>(a.stft.hop);
    info->fft_size = static_cast<uint32_t>(a.stft.fft_size);
    info->n_bands = static_cast<uint32_t>(a.n_bands);
    info->patch_len = static_cast<uint32_t>(a.patch_len);
    info->n_entries = static_cast<uint32_t>(dict->dict.size());
    info->epsilon_floor = a.epsilon_floor;
    info->seed = dict->dict.rng_seed();
  });
}

const char* odct_dictionary_provenance(const odct_dictionary* dict) {
  return dict ? dict->dict.provenance().c_str() : "";
}

void odct_enhance_config_init(odct_enhance_config* cfg) {
  if (!cfg) return;
  const odct::EnhanceConfig d;
  cfg->threshold = d.threshold;
  cfg->epsilon_floor = d.epsilon_floor;
  cfg->gain_floor = d.gain_floor;
  cfg->mask_mode = ODCT_MASK_OUTLIER;
  cfg->gain_application = ODCT_GAIN_DIRECT;
}

odct_status odct_enhance_config_validate(const odct_enhance_config* cfg) {
  return Guard([&] {
    Require(cfg != nullptr, "null config");
    ToEnhanceConfig(*cfg).Validate();
  });
}

odct_status odct_enhance(const odct_audio* noisy, const odct_dictionary* dict,
                         const odct_enhance_config* cfg,
                         odct_patch_callback on_patch, void* user,
                         odct_audio** out) {
  return Guard([&] {
    Require(noisy != nullptr && dict != nullptr && cfg != nullptr &&
                out != nullptr,
            "null argument");
    odct::EnhanceResult result =
        odct::Enhance(noisy->buffer, dict->dict, ToEnhanceConfig(*cfg));
    if (on_patch) {
      for (const auto& p : result.mask.patches) {
        const odct_patch_record rec{p.start_frame, p.entry, p.scale,
                                    p.log_distance, p.n_outliers};
        on_patch(&rec, user);
      }
    }
    *out = new odct_audio{std::move(result.audio)};
  });
}

odct_status odct_mix(const odct_audio* clean, const odct_audio* noise,
                     double snr_db, uint64_t seed, odct_audio** noisy,
                     odct_audio** scaled_noise, double* noise_scale) {
  return Guard([&] {
    Require(clean != nullptr && noise != nullptr && noisy != nullptr,
            "null argument");
    odct::MixResult mix = odct::MixAtSnr(clean->buffer, noise->buffer, snr_db, seed);
    auto mixed = std::make_unique<odct_audio>(odct_audio{std::move(mix.noisy)});
    if (scaled_noise)
      *scaled_noise = new odct_audio{std::move(mix.scaled_noise)};
    if (noise_scale) *noise_scale = mix.noise_scale;
    *noisy = mixed.release();
  });
}

odct_status odct_evaluate(const odct_audio* reference, const odct_audio* test,
                          odct_metrics* out) {
  return Guard([&] {
    Require(reference != nullptr && test != nullptr && out != nullptr,
            "null argument");
    *out = ToMetrics(odct::Evaluate(reference->buffer, test->buffer));
  });
}

odct_status odct_distortion_run(const odct_audio* clean, const odct_audio* noise,
                                double snr_db, uint64_t seed,
                                const odct_dictionary* dict,
                                const odct_enhance_config* cfg,
                                odct_distortion_report* out) {
  return Guard([&] {
    Require(clean != nullptr && noise != nullptr && dict != nullptr &&
                cfg != nullptr && out != nullptr,
            "null argument");
    const odct::DistortionResult r = odct::SpeechDistortionRun(
        clean->buffer, noise->buffer, snr_db, seed, dict->dict,
        ToEnhanceConfig(*cfg));
    out->clean_through_mask = ToMetrics(r.clean_through_mask);
    out->noisy = ToMetrics(r.noisy);
    out->enhanced = ToMetrics(r.enhanced);
    out->noise_scale = r.noise_scale;
  });
}

}  // extern "C"
