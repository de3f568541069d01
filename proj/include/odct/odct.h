/* Copyright 2026 The odct Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * C interface to libodct: dictionary-based speech enhancement with
 * outlier-detection noise estimation.
 *
 * Every fallible call returns an odct_status. On failure a message for the
 * calling thread is available from odct_last_error() until the next failing
 * call on that thread. Handles are opaque and owned by the caller; release
 * them with the matching *_free function. A dictionary handle is read-only
 * after creation and may be shared between threads.
 */

#ifndef ODCT_ODCT_H_
#define ODCT_ODCT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(ODCT_BUILDING_LIBRARY)
#    define ODCT_API __declspec(dllexport)
#  else
#    define ODCT_API __declspec(dllimport)
#  endif
#else
#  define ODCT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odct_status {
  ODCT_OK = 0,
  ODCT_EINVAL = 1,          /* invalid argument or configuration */
  ODCT_EDIM = 2,            /* dimension mismatch */
  ODCT_ESHORT = 3,          /* input too short */
  ODCT_ESILENT = 4,         /* silent input */
  ODCT_ERATE = 5,           /* sample rate mismatch */
  ODCT_EINSUFFICIENT = 6,   /* not enough training patches */
  ODCT_EIO = 7,             /* file could not be read or written */
  ODCT_EBADMAGIC = 8,       /* not a dictionary file */
  ODCT_EVERSION = 9,        /* unsupported dictionary version */
  ODCT_ETRUNCATED = 10,     /* truncated file */
  ODCT_EINCONSISTENT = 11,  /* file contents contradict its header */
  ODCT_EFORMAT = 12,        /* unsupported audio format */
  ODCT_EINTERNAL = 99
} odct_status;

typedef struct odct_audio odct_audio;
typedef struct odct_dictionary odct_dictionary;

ODCT_API const char* odct_version(void);
ODCT_API const char* odct_last_error(void);
ODCT_API const char* odct_status_name(odct_status status);

/* ---- audio ------------------------------------------------------------ */

ODCT_API odct_status odct_audio_create(const double* samples, size_t n,
                                       int sample_rate, odct_audio** out);
/* 16-bit PCM mono WAV. */
ODCT_API odct_status odct_audio_read_wav(const char* path, odct_audio** out);
ODCT_API odct_status odct_audio_write_wav(const odct_audio* audio,
                                          const char* path);
ODCT_API void odct_audio_free(odct_audio* audio);
ODCT_API size_t odct_audio_length(const odct_audio* audio);
ODCT_API int odct_audio_sample_rate(const odct_audio* audio);
ODCT_API const double* odct_audio_samples(const odct_audio* audio);

/* ---- dictionary training ---------------------------------------------- */

typedef struct odct_train_config {
  int sample_rate;      /* corpus rate; other rates are rejected */
  double window_ms;     /* analysis window, hop is half of it */
  uint32_t patch_len;   /* L */
  uint32_t stride;      /* M, must exceed L */
  uint32_t n_bands;     /* N' */
  uint32_t n_clusters;  /* K */
  uint32_t n_patches;   /* training pool size */
  uint32_t max_iters;
  double epsilon_floor;
  uint64_t seed;
} odct_train_config;

typedef struct odct_train_report {
  size_t patches_collected;
  size_t patches_used;
  size_t iterations;
  size_t reseeded;
  double final_objective;
} odct_train_report;

/* Fills defaults: 16 kHz, 10 ms, L=2, M=3, N'=60, K=800, 10000 patches,
 * 100 iterations, epsilon 1e-10, seed 1. */
ODCT_API void odct_train_config_init(odct_train_config* cfg);
ODCT_API odct_status odct_train_config_validate(const odct_train_config* cfg);

/* `report` may be NULL. */
ODCT_API odct_status odct_train(const odct_audio* const* corpus, size_t n,
                                const odct_train_config* cfg,
                                odct_dictionary** out,
                                odct_train_report* report);

/* ---- dictionary files --------------------------------------------------- */

typedef struct odct_dictionary_info {
  int sample_rate;
  uint32_t window_len;
  uint32_t hop;
  uint32_t fft_size;
  uint32_t n_bands;
  uint32_t patch_len;
  uint32_t n_entries;
  double epsilon_floor;
  uint64_t seed;
} odct_dictionary_info;

ODCT_API odct_status odct_dictionary_load(const char* path,
                                          odct_dictionary** out);
ODCT_API odct_status odct_dictionary_save(const odct_dictionary* dict,
                                          const char* path);
ODCT_API void odct_dictionary_free(odct_dictionary* dict);
ODCT_API odct_status odct_dictionary_get_info(const odct_dictionary* dict,
                                              odct_dictionary_info* info);
/* Owned by the dictionary; valid until it is freed. */
ODCT_API const char* odct_dictionary_provenance(const odct_dictionary* dict);

/* ---- enhancement -------------------------------------------------------- */

typedef enum odct_mask_mode {
  ODCT_MASK_OUTLIER = 0,
  ODCT_MASK_VQ = 1
} odct_mask_mode;

typedef enum odct_gain_application {
  ODCT_GAIN_DIRECT = 0,
  ODCT_GAIN_SQRT = 1
} odct_gain_application;

typedef struct odct_enhance_config {
  double threshold; /* c in [0, 1]; 0 disables outlier removal */
  double epsilon_floor;
  double gain_floor; /* [0, 1) */
  odct_mask_mode mask_mode;
  odct_gain_application gain_application;
} odct_enhance_config;

typedef struct odct_patch_record {
  size_t start_frame;
  size_t entry;
  double scale;
  double log_distance;
  size_t n_outliers;
} odct_patch_record;

typedef void (*odct_patch_callback)(const odct_patch_record* record,
                                    void* user);

/* Defaults: c = 1e-4, epsilon 1e-10, outlier mode, no gain floor, direct. */
ODCT_API void odct_enhance_config_init(odct_enhance_config* cfg);
ODCT_API odct_status odct_enhance_config_validate(const odct_enhance_config* cfg);

/* `on_patch` may be NULL; otherwise it is called once per patch, in order,
 * before odct_enhance returns. */
ODCT_API odct_status odct_enhance(const odct_audio* noisy,
                                  const odct_dictionary* dict,
                                  const odct_enhance_config* cfg,
                                  odct_patch_callback on_patch, void* user,
                                  odct_audio** out);

/* ---- evaluation --------------------------------------------------------- */

typedef struct odct_metrics {
  double seg_snr_db;
  double fw_seg_snr_db;
} odct_metrics;

/* `scaled_noise` and `noise_scale` may be NULL. */
ODCT_API odct_status odct_mix(const odct_audio* clean, const odct_audio* noise,
                              double snr_db, uint64_t seed, odct_audio** noisy,
                              odct_audio** scaled_noise, double* noise_scale);

ODCT_API odct_status odct_evaluate(const odct_audio* reference,
                                   const odct_audio* test, odct_metrics* out);

typedef struct odct_distortion_report {
  odct_metrics clean_through_mask;
  odct_metrics noisy;
  odct_metrics enhanced;
  double noise_scale;
} odct_distortion_report;

ODCT_API odct_status odct_distortion_run(const odct_audio* clean,
                                         const odct_audio* noise, double snr_db,
                                         uint64_t seed,
                                         const odct_dictionary* dict,
                                         const odct_enhance_config* cfg,
                                         odct_distortion_report* out);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* ODCT_ODCT_H_ */
