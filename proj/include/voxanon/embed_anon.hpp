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

// Speaker-embedding anonymization by pool selection and averaging: the N
// pool entries farthest from the source are found, N* of them are drawn at
// random, and their mean becomes the pseudo-speaker embedding.

#ifndef VOXANON_EMBED_ANON_HPP_
#define VOXANON_EMBED_ANON_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace voxanon::embed {

struct Embedding {
  std::vector<double> vector;
  std::string speaker_id;
  std::string utterance_id;
};

// Which half of the evaluation data a pseudo-speaker serves.
enum class SubsetTag { kEnrollment, kTrial };

const char* TagName(SubsetTag tag);
SubsetTag ParseTag(const std::string& name);  // kConfig on anything else

struct PoolSelectionParams {
  std::size_t n_farthest = 200;
  std::size_t n_subset = 100;
  uint64_t rng_seed = 0;
  bool length_normalize = false;

  void Validate() const;  // kConfig unless 0 < n_subset <= n_farthest
};

// 1 - a.b / (|a||b|), in [0, 2]. kContract on a zero vector or dimension
// mismatch.
double CosineDistance(std::span<const double> a, std::span<const double> b);

// Deterministic generator for one (seed, speaker, tag, counter) stream.
std::mt19937_64 MakeStream(uint64_t seed, std::string_view speaker_id,
                           SubsetTag tag, uint32_t counter);

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound);

struct Selection {
  std::vector<std::size_t> farthest;  // pool indices, distance descending
  std::vector<std::size_t> chosen;    // subset of farthest, in the same order
};

// Stage 1 ranks pool entries (other than the source speaker's own) by
// distance, ties broken by ascending utterance ID; stage 2 samples n_subset
// of the top n_farthest without replacement. kConfig when the pool is too
// small.
Selection SelectCandidates(const Embedding& source,
                           std::span<const Embedding> pool,
                           const PoolSelectionParams& params,
                           std::mt19937_64& rng);

// `pseudo-` followed by 16 hex digits of a hash of speaker, tag and seed.
std::string PseudoId(std::string_view speaker_id, SubsetTag tag,
                     uint64_t seed);

// Mean of the selected candidates (optionally scaled to unit norm), labelled
// with PseudoId. The chosen candidate IDs are returned through `candidates`.
Embedding AnonymizeEmbedding(const Embedding& source,
                             std::span<const Embedding> pool,
                             const PoolSelectionParams& params,
                             std::mt19937_64& rng, SubsetTag tag,
                             std::vector<std::string>* candidates = nullptr);

struct PseudoSpeaker {
  std::string speaker_id;
  SubsetTag tag = SubsetTag::kEnrollment;
  Embedding source;  // per-speaker mean of the utterance embeddings
  Embedding pseudo;
  std::vector<std::string> candidate_ids;
  uint32_t stream_counter = 0;
};

struct PseudoSpeakerAssignment {
  std::vector<PseudoSpeaker> entries;  // ordered by speaker, then tag

  // nullptr when absent.
  const PseudoSpeaker* Find(std::string_view speaker_id, SubsetTag tag) const;
  std::string AuditJson(const PoolSelectionParams& params) const;
};

struct TaggedUtterances {
  SubsetTag tag;
  std::vector<Embedding> utterances;
};

// One pseudo-speaker per (speaker, tag). Two entries that would average the
// very same candidate set are re-drawn on the next stream counter; after 8
// failed re-draws the call raises kConfig.
PseudoSpeakerAssignment AssignPseudoSpeakers(
    std::span<const TaggedUtterances> sets, std::span<const Embedding> pool,
    const PoolSelectionParams& params);

// Both tags derived from the same utterances.
PseudoSpeakerAssignment AssignPseudoSpeakers(
    std::span<const Embedding> utterances, std::span<const Embedding> pool,
    const PoolSelectionParams& params);

// `<utterance-id> <speaker-id> <v1> ... <vD>`; every line must share D.
std::vector<Embedding> ReadEmbeddings(const std::string& path);
void WriteEmbeddings(const std::string& path,
                     std::span<const Embedding> embeddings);

}  // namespace voxanon::embed

#endif  // VOXANON_EMBED_ANON_HPP_
