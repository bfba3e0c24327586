// Copyright 2026 The voxanon Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "voxanon/voxanon.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "json.hpp"
#include "voxanon/audio.hpp"
#include "voxanon/embed_anon.hpp"
#include "voxanon/error.hpp"
#include "voxanon/mcadams.hpp"
#include "voxanon/metrics.hpp"
#include "voxanon/protocol.hpp"

using namespace voxanon;

struct vxa_audio {
  audio::AudioBuffer rep;
};

struct vxa_scores {
  metrics::ScoreSet rep;
};

struct vxa_results {
  protocol::ResultsTable rep;
};

namespace {

thread_local std::string last_error;

vxa_status StatusOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return VXA_ERR_IO;
    case ErrorKind::kFormat: return VXA_ERR_FORMAT;
    case ErrorKind::kContract: return VXA_ERR_CONTRACT;
    case ErrorKind::kNumerical: return VXA_ERR_NUMERICAL;
    case ErrorKind::kConfig: return VXA_ERR_CONFIG;
    case ErrorKind::kParse: return VXA_ERR_PARSE;
    case ErrorKind::kValidation: return VXA_ERR_VALIDATION;
    case ErrorKind::kReconcile: return VXA_ERR_RECONCILE;
  }
  return VXA_ERR_INTERNAL;
}

// Runs `body`, translating exceptions into a status and the thread-local
// message.
template <typename F>
vxa_status Guard(F&& body) {
  try {
    last_error.clear();
    body();
    return VXA_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return VXA_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return VXA_ERR_INTERNAL;
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void MaybeSet(char** dst, const std::string& s) {
  if (dst != nullptr) *dst = CopyString(s);
}

mcadams::McAdamsParams ToCpp(const vxa_mcadams_params& p) {
  mcadams::McAdamsParams out;
  out.alpha = p.alpha;
  if (p.lpc_order <= 0) Fail(ErrorKind::kConfig, "LPC order must be positive");
  out.lpc_order = static_cast<std::size_t>(p.lpc_order);
  out.frame_ms = p.frame_ms;
  out.hop_ms = p.hop_ms;
  out.window = p.window == VXA_WINDOW_RECTANGULAR ? audio::Window::kRectangular
                                                  : audio::Window::kHann;
  out.stability_clamp = p.stability_clamp;
  out.preemphasis = p.preemphasis;
  out.rng_seed = p.rng_seed;
  out.Validate();
  return out;
}

embed::PoolSelectionParams ToCpp(const vxa_pool_params& p) {
  if (p.n_farthest <= 0 || p.n_subset <= 0) {
    Fail(ErrorKind::kConfig, "n-farthest and n-subset must be positive");
  }
  embed::PoolSelectionParams out;
  out.n_farthest = static_cast<std::size_t>(p.n_farthest);
  out.n_subset = static_cast<std::size_t>(p.n_subset);
  out.rng_seed = p.rng_seed;
  out.length_normalize = p.length_normalize != 0;
  out.Validate();
  return out;
}

nlohmann::ordered_json WerJson(const metrics::WerBreakdown& w) {
  return {{"n_sub", w.n_sub}, {"n_del", w.n_del}, {"n_ins", w.n_ins},
          {"n_ref", w.n_ref}, {"wer", w.wer()}};
}

}  // namespace

extern "C" {

const char* vxa_version(void) { return "1.0.0"; }

const char* vxa_status_name(vxa_status status) {
  switch (status) {
    case VXA_OK: return "ok";
    case VXA_ERR_IO: return "io";
    case VXA_ERR_FORMAT: return "format";
    case VXA_ERR_CONTRACT: return "contract";
    case VXA_ERR_NUMERICAL: return "numerical";
    case VXA_ERR_CONFIG: return "config";
    case VXA_ERR_PARSE: return "parse";
    case VXA_ERR_VALIDATION: return "validation";
    case VXA_ERR_RECONCILE: return "reconcile";
    case VXA_ERR_INVALID_ARGUMENT: return "invalid-argument";
    case VXA_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* vxa_last_error(void) { return last_error.c_str(); }

void vxa_string_free(char* str) { std::free(str); }

vxa_status vxa_audio_new(const double* samples, size_t num_samples,
                         int32_t sample_rate, vxa_audio** out) {
  if (out == nullptr || (samples == nullptr && num_samples > 0)) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    if (sample_rate <= 0) Fail(ErrorKind::kContract, "sample rate must be positive");
    auto a = std::make_unique<vxa_audio>();
    a->rep.samples.assign(samples, samples + num_samples);
    a->rep.sample_rate = sample_rate;
    *out = a.release();
  });
}

vxa_status vxa_audio_read_wav(const char* path, vxa_audio** out) {
  if (path == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    auto a = std::make_unique<vxa_audio>();
    a->rep = audio::ReadWav(path);
    *out = a.release();
  });
}

vxa_status vxa_audio_write_wav(const vxa_audio* a, const char* path,
                               size_t* clipped) {
  if (a == nullptr || path == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const std::size_t n = audio::WriteWav(a->rep, path);
    if (clipped != nullptr) *clipped = n;
  });
}

size_t vxa_audio_num_samples(const vxa_audio* a) {
  return a == nullptr ? 0 : a->rep.samples.size();
}

int32_t vxa_audio_sample_rate(const vxa_audio* a) {
  return a == nullptr ? 0 : a->rep.sample_rate;
}

const double* vxa_audio_samples(const vxa_audio* a) {
  return a == nullptr ? nullptr : a->rep.samples.data();
}

void vxa_audio_free(vxa_audio* a) { delete a; }

void vxa_mcadams_params_default(vxa_mcadams_params* params) {
  if (params == nullptr) return;
  const mcadams::McAdamsParams d;
  params->alpha = d.alpha;
  params->lpc_order = static_cast<int32_t>(d.lpc_order);
  params->frame_ms = d.frame_ms;
  params->hop_ms = d.hop_ms;
  params->window = VXA_WINDOW_HANN;
  params->stability_clamp = d.stability_clamp;
  params->preemphasis = d.preemphasis;
  params->rng_seed = d.rng_seed;
}

vxa_status vxa_mcadams_anonymize(const vxa_audio* input,
                                 const vxa_mcadams_params* params,
                                 vxa_audio** out) {
  if (input == nullptr || params == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    auto a = std::make_unique<vxa_audio>();
    a->rep = mcadams::AnonymizeBuffer(input->rep, ToCpp(*params));
    *out = a.release();
  });
}

vxa_status vxa_mcadams_anonymize_corpus(const char* manifest_path,
                                        const char* out_dir,
                                        const vxa_mcadams_params* params,
                                        int32_t jobs, char** report_json,
                                        size_t* num_failed) {
  if (manifest_path == nullptr || out_dir == nullptr || params == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const mcadams::CorpusReport report =
        mcadams::AnonymizeCorpus(manifest_path, ToCpp(*params), out_dir, jobs);
    if (num_failed != nullptr) *num_failed = report.failed;
    MaybeSet(report_json, report.ToJson());
  });
}

void vxa_pool_params_default(vxa_pool_params* params) {
  if (params == nullptr) return;
  const embed::PoolSelectionParams d;
  params->n_farthest = static_cast<int32_t>(d.n_farthest);
  params->n_subset = static_cast<int32_t>(d.n_subset);
  params->rng_seed = d.rng_seed;
  params->length_normalize = d.length_normalize ? 1 : 0;
}

vxa_status vxa_cosine_distance(const double* a, const double* b, size_t dim,
                               double* out) {
  if (a == nullptr || b == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    *out = embed::CosineDistance(std::span<const double>(a, dim),
                                 std::span<const double>(b, dim));
  });
}

vxa_status vxa_anon_embed_files(const char* embeddings_path,
                                const char* other_path, const char* pool_path,
                                const vxa_pool_params* params, const char* tag,
                                const char* out_path, char** audit_json) {
  if (embeddings_path == nullptr || pool_path == nullptr ||
      params == nullptr || tag == nullptr || out_path == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const embed::PoolSelectionParams p = ToCpp(*params);
    const embed::SubsetTag wanted = embed::ParseTag(tag);
    const embed::SubsetTag other = wanted == embed::SubsetTag::kEnrollment
                                       ? embed::SubsetTag::kTrial
                                       : embed::SubsetTag::kEnrollment;
    const std::vector<embed::Embedding> utterances =
        embed::ReadEmbeddings(embeddings_path);
    if (utterances.empty()) {
      Fail(ErrorKind::kConfig, std::string(embeddings_path) + " holds no embeddings");
    }
    const std::vector<embed::Embedding> pool = embed::ReadEmbeddings(pool_path);
    std::vector<embed::TaggedUtterances> sets;
    sets.push_back({wanted, utterances});
    sets.push_back({other, other_path != nullptr
                               ? embed::ReadEmbeddings(other_path)
                               : utterances});
    const embed::PseudoSpeakerAssignment assignment =
        embed::AssignPseudoSpeakers(sets, pool, p);

    std::vector<embed::Embedding> out;
    out.reserve(utterances.size());
    for (const embed::Embedding& u : utterances) {
      const embed::PseudoSpeaker* ps = assignment.Find(u.speaker_id, wanted);
      embed::Embedding e = ps->pseudo;
      e.utterance_id = u.utterance_id;
      out.push_back(std::move(e));
    }
    embed::WriteEmbeddings(out_path, out);
    MaybeSet(audit_json, assignment.AuditJson(p));
  });
}

vxa_status vxa_scores_new(const double* targets, size_t num_targets,
                          const double* impostors, size_t num_impostors,
                          vxa_scores** out) {
  if (out == nullptr || (targets == nullptr && num_targets > 0) ||
      (impostors == nullptr && num_impostors > 0)) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    auto s = std::make_unique<vxa_scores>();
    s->rep.target_scores.assign(targets, targets + num_targets);
    s->rep.impostor_scores.assign(impostors, impostors + num_impostors);
    s->rep.Validate();
    *out = s.release();
  });
}

vxa_status vxa_scores_from_files(const char* score_path,
                                 const char* trials_path,
                                 const char* metadata_path, const char* gender,
                                 vxa_scores** out) {
  if (score_path == nullptr || trials_path == nullptr || out == nullptr ||
      ((metadata_path == nullptr) != (gender == nullptr))) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const protocol::TrialList trials = protocol::LoadTrials(trials_path);
    auto s = std::make_unique<vxa_scores>();
    if (metadata_path != nullptr) {
      const protocol::TrialList part = trials.FilterByGender(
          protocol::ReadMetadata(metadata_path), gender);
      s->rep = protocol::ScoreTrials(score_path, trials, &part);
    } else {
      s->rep = protocol::ScoreTrials(score_path, trials);
    }
    s->rep.Validate();
    *out = s.release();
  });
}

void vxa_scores_counts(const vxa_scores* scores, size_t* num_targets,
                       size_t* num_impostors) {
  if (scores == nullptr) return;
  if (num_targets != nullptr) *num_targets = scores->rep.target_scores.size();
  if (num_impostors != nullptr) {
    *num_impostors = scores->rep.impostor_scores.size();
  }
}

void vxa_scores_free(vxa_scores* scores) { delete scores; }

vxa_status vxa_error_rates(const vxa_scores* scores, double threshold,
                           double* p_fa, double* p_miss) {
  if (scores == nullptr || p_fa == nullptr || p_miss == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const metrics::ErrorRates r = metrics::ComputeErrorRates(scores->rep, threshold);
    *p_fa = r.p_fa;
    *p_miss = r.p_miss;
  });
}

vxa_status vxa_eer(const vxa_scores* scores, double* eer_percent,
                   double* threshold) {
  if (scores == nullptr || eer_percent == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const metrics::EerResult r = metrics::ComputeEer(scores->rep);
    *eer_percent = r.eer_percent;
    if (threshold != nullptr) *threshold = r.threshold;
  });
}

vxa_status vxa_cllr(const vxa_scores* scores, double* out) {
  if (scores == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] { *out = metrics::ComputeCllr(scores->rep); });
}

vxa_status vxa_cllr_min(const vxa_scores* scores, double* out) {
  if (scores == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] { *out = metrics::ComputeCllrMin(scores->rep); });
}

vxa_status vxa_trials_check_counts(const char* trials_path,
                                   const char* metadata_path,
                                   const char* expected_path,
                                   char** report_json,
                                   size_t* num_discrepancies) {
  if (trials_path == nullptr || expected_path == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const protocol::TrialList trials = protocol::LoadTrials(trials_path);
    const protocol::Metadata meta = metadata_path != nullptr
                                        ? protocol::ReadMetadata(metadata_path)
                                        : protocol::Metadata{};
    const auto expected = protocol::ReadExpectedCounts(expected_path);
    const std::vector<std::string> issues =
        protocol::CheckCounts(trials, meta, expected);
    if (num_discrepancies != nullptr) *num_discrepancies = issues.size();
    const protocol::TrialCounts c = trials.Counts();
    nlohmann::ordered_json j;
    j["target"] = c.target;
    j["nontarget"] = c.nontarget;
    j["discrepancies"] = issues;
    MaybeSet(report_json, j.dump(2));
  });
}

vxa_status vxa_wer_strings(const char* ref, const char* hyp, vxa_wer* out) {
  if (ref == nullptr || hyp == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const auto r = metrics::Tokenize(ref);
    const auto h = metrics::Tokenize(hyp);
    const metrics::WerBreakdown w = metrics::ComputeWer(r, h);
    *out = {w.n_sub, w.n_del, w.n_ins, w.n_ref, w.wer()};
  });
}

vxa_status vxa_wer_files(const char* ref_path, const char* hyp_path,
                         vxa_wer* out, char** details_json) {
  if (ref_path == nullptr || hyp_path == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const metrics::CorpusWer c = metrics::ComputeCorpusWer(
        metrics::ReadTranscripts(ref_path), metrics::ReadTranscripts(hyp_path));
    const metrics::WerBreakdown& w = c.total;
    *out = {w.n_sub, w.n_del, w.n_ins, w.n_ref, w.wer()};
    if (details_json != nullptr) {
      nlohmann::ordered_json j;
      j["total"] = WerJson(w);
      nlohmann::ordered_json per = nlohmann::ordered_json::object();
      for (const auto& [id, b] : c.per_utterance) per[id] = WerJson(b);
      j["per_utterance"] = std::move(per);
      j["unused_references"] = c.unused_references;
      *details_json = CopyString(j.dump(2));
    }
  });
}

vxa_status vxa_validate_mapping_file(const char* path, char** report_json,
                                     size_t* num_violations) {
  if (path == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    const protocol::ValidationReport report =
        protocol::ValidatePseudoMapping(protocol::ReadMapping(path));
    if (num_violations != nullptr) *num_violations = report.violations.size();
    MaybeSet(report_json, report.ToJson());
  });
}

vxa_status vxa_results_new(vxa_results** out) {
  if (out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] { *out = new vxa_results(); });
}

vxa_status vxa_results_load(const char* path, vxa_results** out) {
  if (path == nullptr || out == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    auto r = std::make_unique<vxa_results>();
    r->rep = protocol::ReadResults(path);
    *out = r.release();
  });
}

vxa_status vxa_results_add_asv(vxa_results* results, const char* dataset,
                               char enrollment, char trial, const char* gender,
                               double eer_percent, double cllr_min,
                               double cllr, const char* source) {
  if (results == nullptr || dataset == nullptr || gender == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    for (char c : {enrollment, trial}) {
      if (c != 'o' && c != 'a') {
        Fail(ErrorKind::kConfig, "condition must be 'o' or 'a'");
      }
    }
    protocol::AsvRow row{dataset,     enrollment, trial, gender,
                         eer_percent, cllr_min,   cllr,  source ? source : ""};
    results->rep.asv.push_back(std::move(row));
  });
}

vxa_status vxa_results_add_wer(vxa_results* results, const char* dataset,
                               char condition, double wer_percent,
                               const char* source) {
  if (results == nullptr || dataset == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    if (condition != 'o' && condition != 'a') {
      Fail(ErrorKind::kConfig, "condition must be 'o' or 'a'");
    }
    results->rep.wer.push_back(
        {dataset, condition, wer_percent, source ? source : ""});
  });
}

vxa_status vxa_results_emit(const vxa_results* results, const char* format,
                            char** text) {
  if (results == nullptr || format == nullptr || text == nullptr) {
    last_error = "null argument";
    return VXA_ERR_INVALID_ARGUMENT;
  }
  return Guard([&] {
    *text = CopyString(protocol::EmitResults(
        results->rep, protocol::ParseTableFormat(format)));
  });
}

void vxa_results_free(vxa_results* results) { delete results; }

}  // extern "C"
