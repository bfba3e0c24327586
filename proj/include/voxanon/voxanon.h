/* Copyright 2026 The voxanon Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of libvoxanon.
 *
 * Every fallible call returns a vxa_status; on failure a description is
 * available from vxa_last_error() on the calling thread until the next call.
 * Objects are opaque handles released with their matching *_free function.
 * Strings returned through char** are owned by the caller and released with
 * vxa_string_free().
 */

#ifndef VOXANON_VOXANON_H_
#define VOXANON_VOXANON_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define VXA_API __declspec(dllexport)
#else
#define VXA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum vxa_status {
  VXA_OK = 0,
  VXA_ERR_IO = 1,
  VXA_ERR_FORMAT = 2,
  VXA_ERR_CONTRACT = 3,
  VXA_ERR_NUMERICAL = 4,
  VXA_ERR_CONFIG = 5,
  VXA_ERR_PARSE = 6,
  VXA_ERR_VALIDATION = 7,
  VXA_ERR_RECONCILE = 8,
  VXA_ERR_INVALID_ARGUMENT = 9, /* null handle or pointer */
  VXA_ERR_INTERNAL = 10
} vxa_status;

VXA_API const char* vxa_version(void);
VXA_API const char* vxa_status_name(vxa_status status);
VXA_API const char* vxa_last_error(void);
VXA_API void vxa_string_free(char* str);

/* ---- audio ------------------------------------------------------------ */

typedef struct vxa_audio vxa_audio;

VXA_API vxa_status vxa_audio_new(const double* samples, size_t num_samples,
                                 int32_t sample_rate, vxa_audio** out);
VXA_API vxa_status vxa_audio_read_wav(const char* path, vxa_audio** out);
/* `clipped` (nullable) receives the number of samples clipped to [-1, 1]. */
VXA_API vxa_status vxa_audio_write_wav(const vxa_audio* audio,
                                       const char* path, size_t* clipped);
VXA_API size_t vxa_audio_num_samples(const vxa_audio* audio);
VXA_API int32_t vxa_audio_sample_rate(const vxa_audio* audio);
VXA_API const double* vxa_audio_samples(const vxa_audio* audio);
VXA_API void vxa_audio_free(vxa_audio* audio);

/* ---- McAdams anonymization ------------------------------------------- */

typedef enum vxa_window { VXA_WINDOW_RECTANGULAR = 0, VXA_WINDOW_HANN = 1 } vxa_window;

typedef struct vxa_mcadams_params {
  double alpha;
  int32_t lpc_order;
  double frame_ms;
  double hop_ms;
  vxa_window window;
  double stability_clamp;
  double preemphasis; /* 0 disables */
  uint64_t rng_seed;  /* reserved */
} vxa_mcadams_params;

VXA_API void vxa_mcadams_params_default(vxa_mcadams_params* params);
VXA_API vxa_status vxa_mcadams_anonymize(const vxa_audio* input,
                                         const vxa_mcadams_params* params,
                                         vxa_audio** out);
/* Anonymizes every `<utt-id> <wav-path>` entry of the manifest into out_dir.
 * Per-file failures do not abort the batch: the call still returns VXA_OK
 * and reports them through `num_failed` (nullable) and the JSON report
 * (nullable). */
VXA_API vxa_status vxa_mcadams_anonymize_corpus(
    const char* manifest_path, const char* out_dir,
    const vxa_mcadams_params* params, int32_t jobs, char** report_json,
    size_t* num_failed);

/* ---- embedding anonymization ----------------------------------------- */

typedef struct vxa_pool_params {
  int32_t n_farthest;
  int32_t n_subset;
  uint64_t rng_seed;
  int32_t length_normalize; /* nonzero: scale pseudo vectors to unit norm */
} vxa_pool_params;

VXA_API void vxa_pool_params_default(vxa_pool_params* params);
VXA_API vxa_status vxa_cosine_distance(const double* a, const double* b,
                                       size_t dim, double* out);
/* Reads utterance embeddings for `tag` ("enrollment" or "trial") and writes
 * one pseudo embedding line per utterance to out_path. `other_path`
 * (nullable) holds the embeddings of the opposite tag so both tags are
 * assigned jointly; without it the opposite tag reuses the same sources.
 * The audit JSON (nullable) lists the candidates of every pseudo-speaker. */
VXA_API vxa_status vxa_anon_embed_files(const char* embeddings_path,
                                        const char* other_path,
                                        const char* pool_path,
                                        const vxa_pool_params* params,
                                        const char* tag, const char* out_path,
                                        char** audit_json);

/* ---- scores and metrics ---------------------------------------------- */

typedef struct vxa_scores vxa_scores;

VXA_API vxa_status vxa_scores_new(const double* targets, size_t num_targets,
                                  const double* impostors,
                                  size_t num_impostors, vxa_scores** out);
/* Reconciles a score file against a trial list. `metadata_path` and `gender`
 * are both null or both set; when set only trials whose enrollment speaker
 * has that metadata label are kept. */
VXA_API vxa_status vxa_scores_from_files(const char* score_path,
                                         const char* trials_path,
                                         const char* metadata_path,
                                         const char* gender, vxa_scores** out);
VXA_API void vxa_scores_counts(const vxa_scores* scores, size_t* num_targets,
                               size_t* num_impostors);
VXA_API void vxa_scores_free(vxa_scores* scores);

VXA_API vxa_status vxa_error_rates(const vxa_scores* scores, double threshold,
                                   double* p_fa, double* p_miss);
VXA_API vxa_status vxa_eer(const vxa_scores* scores, double* eer_percent,
                           double* threshold);
VXA_API vxa_status vxa_cllr(const vxa_scores* scores, double* out);
VXA_API vxa_status vxa_cllr_min(const vxa_scores* scores, double* out);

/* Compares a trial list with an expected-counts file; discrepancies are
 * listed in the JSON report. */
VXA_API vxa_status vxa_trials_check_counts(const char* trials_path,
                                           const char* metadata_path,
                                           const char* expected_path,
                                           char** report_json,
                                           size_t* num_discrepancies);

typedef struct vxa_wer {
  int64_t n_sub;
  int64_t n_del;
  int64_t n_ins;
  int64_t n_ref;
  double wer; /* fraction, not percent */
} vxa_wer;

VXA_API vxa_status vxa_wer_strings(const char* ref, const char* hyp,
                                   vxa_wer* out);
/* Corpus WER over two transcript files. `details_json` (nullable) receives
 * per-utterance counts and unused reference IDs. */
VXA_API vxa_status vxa_wer_files(const char* ref_path, const char* hyp_path,
                                 vxa_wer* out, char** details_json);

/* ---- protocol -------------------------------------------------------- */

VXA_API vxa_status vxa_validate_mapping_file(const char* path,
                                             char** report_json,
                                             size_t* num_violations);

typedef struct vxa_results vxa_results;

VXA_API vxa_status vxa_results_new(vxa_results** out);
VXA_API vxa_status vxa_results_load(const char* path, vxa_results** out);
VXA_API vxa_status vxa_results_add_asv(vxa_results* results,
                                       const char* dataset, char enrollment,
                                       char trial, const char* gender,
                                       double eer_percent, double cllr_min,
                                       double cllr, const char* source);
VXA_API vxa_status vxa_results_add_wer(vxa_results* results,
                                       const char* dataset, char condition,
                                       double wer_percent, const char* source);
/* format: "plain" or "latex" */
VXA_API vxa_status vxa_results_emit(const vxa_results* results,
                                    const char* format, char** text);
VXA_API void vxa_results_free(vxa_results* results);

#ifdef __cplusplus
}
#endif

#endif /* VOXANON_VOXANON_H_ */
