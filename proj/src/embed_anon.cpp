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

#include "voxanon/embed_anon.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "text_util.hpp"
#include "voxanon/error.hpp"

namespace voxanon::embed {

namespace {

constexpr int kMaxRedraws = 8;

uint64_t Fnv1a(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t StreamKey(uint64_t seed, std::string_view speaker_id, SubsetTag tag) {
  uint64_t h = Fnv1a(speaker_id);
  h = Fnv1a(std::string_view("\0", 1), h);
  h = Fnv1a(TagName(tag), h);
  return SplitMix64(h ^ SplitMix64(seed));
}

std::vector<double> MeanOf(std::span<const Embedding> items,
                           std::span<const std::size_t> indices) {
  std::vector<long double> sum(items[indices.front()].vector.size(), 0.0L);
  for (std::size_t idx : indices) {
    const std::vector<double>& v = items[idx].vector;
    for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += v[d];
  }
  const auto n = static_cast<long double>(indices.size());
  std::vector<double> mean(sum.size());
  for (std::size_t d = 0; d < sum.size(); ++d) {
    mean[d] = static_cast<double>(sum[d] / n);
  }
  return mean;
}

std::vector<double> PseudoVector(std::span<const Embedding> pool,
                                 std::span<const std::size_t> chosen,
                                 const PoolSelectionParams& params) {
  std::vector<double> v = MeanOf(pool, chosen);
  if (params.length_normalize) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : v) x /= norm;
    }
  }
  return v;
}

void CheckDimension(std::span<const Embedding> items, std::size_t dim,
                    const char* what) {
  for (const Embedding& e : items) {
    if (e.vector.size() != dim) {
      Fail(ErrorKind::kContract,
           std::string(what) + " embedding " + e.utterance_id + " has dimension " +
               std::to_string(e.vector.size()) + ", expected " +
               std::to_string(dim));
    }
  }
}

}  // namespace

const char* TagName(SubsetTag tag) {
  return tag == SubsetTag::kEnrollment ? "enrollment" : "trial";
}

SubsetTag ParseTag(const std::string& name) {
  if (name == "enrollment") return SubsetTag::kEnrollment;
  if (name == "trial") return SubsetTag::kTrial;
  Fail(ErrorKind::kConfig,
       "unknown subset tag '" + name + "' (expected enrollment or trial)");
}

void PoolSelectionParams::Validate() const {
  if (n_subset == 0 || n_subset > n_farthest) {
    Fail(ErrorKind::kConfig, "need 0 < n-subset <= n-farthest (got n-subset=" +
                                 std::to_string(n_subset) + ", n-farthest=" +
                                 std::to_string(n_farthest) + ")");
  }
}

double CosineDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    Fail(ErrorKind::kContract, "cosine distance of vectors with dimensions " +
                                   std::to_string(a.size()) + " and " +
                                   std::to_string(b.size()));
  }
  // Extended precision so that collinear vectors land exactly on +-1 and
  // tie with each other.
  long double dot = 0.0L, na = 0.0L, nb = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  if (!(na > 0.0L) || !(nb > 0.0L)) {
    Fail(ErrorKind::kContract, "cosine distance of a zero-norm vector");
  }
  const double cosine =
      std::clamp(static_cast<double>(dot / std::sqrt(na * nb)), -1.0, 1.0);
  return 1.0 - cosine;
}

std::mt19937_64 MakeStream(uint64_t seed, std::string_view speaker_id,
                           SubsetTag tag, uint32_t counter) {
  return std::mt19937_64(
      SplitMix64(StreamKey(seed, speaker_id, tag) + counter));
}

uint64_t UniformBelow(std::mt19937_64& rng, uint64_t bound) {
  // Largest multiple of bound that fits, so every residue is equally likely.
  const uint64_t limit = bound == 0 ? 0 : (~uint64_t{0} / bound) * bound;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

Selection SelectCandidates(const Embedding& source,
                           std::span<const Embedding> pool,
                           const PoolSelectionParams& params,
                           std::mt19937_64& rng) {
  params.Validate();
  std::vector<std::size_t> eligible;
  std::vector<double> distance(pool.size(), 0.0);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Embedding& e = pool[i];
    if (e.speaker_id == source.speaker_id ||
        (!source.utterance_id.empty() && e.utterance_id == source.utterance_id)) {
      continue;
    }
    distance[i] = CosineDistance(source.vector, e.vector);
    eligible.push_back(i);
  }
  if (eligible.size() < params.n_farthest) {
    Fail(ErrorKind::kConfig,
         "pool too small: n-farthest=" + std::to_string(params.n_farthest) +
             " requires that many candidates, " +
             std::to_string(eligible.size()) + " available");
  }
  const auto farther = [&](std::size_t x, std::size_t y) {
    if (distance[x] != distance[y]) return distance[x] > distance[y];
    return pool[x].utterance_id < pool[y].utterance_id;
  };
  std::partial_sort(eligible.begin(),
                    eligible.begin() + static_cast<std::ptrdiff_t>(params.n_farthest),
                    eligible.end(), farther);
  Selection sel;
  sel.farthest.assign(eligible.begin(),
                      eligible.begin() + static_cast<std::ptrdiff_t>(params.n_farthest));

  // Partial Fisher-Yates over ranks, then restore rank order.
  std::vector<std::size_t> ranks(params.n_farthest);
  std::iota(ranks.begin(), ranks.end(), 0);
  for (std::size_t i = 0; i < params.n_subset; ++i) {
    const std::size_t j = i + UniformBelow(rng, ranks.size() - i);
    std::swap(ranks[i], ranks[j]);
  }
  ranks.resize(params.n_subset);
  std::sort(ranks.begin(), ranks.end());
  for (std::size_t r : ranks) sel.chosen.push_back(sel.farthest[r]);
  return sel;
}

std::string PseudoId(std::string_view speaker_id, SubsetTag tag,
                     uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pseudo-%016llx",
                static_cast<unsigned long long>(StreamKey(seed, speaker_id, tag)));
  return buf;
}

Embedding AnonymizeEmbedding(const Embedding& source,
                             std::span<const Embedding> pool,
                             const PoolSelectionParams& params,
                             std::mt19937_64& rng, SubsetTag tag,
                             std::vector<std::string>* candidates) {
  const Selection sel = SelectCandidates(source, pool, params, rng);
  Embedding out;
  out.vector = PseudoVector(pool, sel.chosen, params);
  out.speaker_id = PseudoId(source.speaker_id, tag, params.rng_seed);
  if (candidates != nullptr) {
    candidates->clear();
    for (std::size_t idx : sel.chosen) candidates->push_back(pool[idx].utterance_id);
  }
  return out;
}

const PseudoSpeaker* PseudoSpeakerAssignment::Find(std::string_view speaker_id,
                                                   SubsetTag tag) const {
  for (const PseudoSpeaker& p : entries) {
    if (p.speaker_id == speaker_id && p.tag == tag) return &p;
  }
  return nullptr;
}

std::string PseudoSpeakerAssignment::AuditJson(
    const PoolSelectionParams& params) const {
  nlohmann::ordered_json j;
  j["seed"] = params.rng_seed;
  j["n_farthest"] = params.n_farthest;
  j["n_subset"] = params.n_subset;
  j["length_normalize"] = params.length_normalize;
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const PseudoSpeaker& p : entries) {
    list.push_back({{"speaker", p.speaker_id},
                    {"tag", TagName(p.tag)},
                    {"pseudo_id", p.pseudo.speaker_id},
                    {"stream_counter", p.stream_counter},
                    {"candidates", p.candidate_ids}});
  }
  j["assignments"] = std::move(list);
  return j.dump(2);
}

PseudoSpeakerAssignment AssignPseudoSpeakers(
    std::span<const TaggedUtterances> sets, std::span<const Embedding> pool,
    const PoolSelectionParams& params) {
  params.Validate();
  if (pool.empty()) Fail(ErrorKind::kConfig, "empty speaker pool");
  const std::size_t dim = pool.front().vector.size();
  CheckDimension(pool, dim, "pool");

  // (speaker, tag) -> utterance indices within its set, in sorted order.
  std::map<std::pair<std::string, int>, std::pair<std::size_t, std::vector<std::size_t>>>
      groups;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    CheckDimension(sets[s].utterances, dim, "source");
    for (std::size_t i = 0; i < sets[s].utterances.size(); ++i) {
      auto& g = groups[{sets[s].utterances[i].speaker_id,
                        static_cast<int>(sets[s].tag)}];
      g.first = s;
      g.second.push_back(i);
    }
  }

  PseudoSpeakerAssignment assignment;
  std::set<std::vector<std::size_t>> used_sets;
  for (const auto& [key, group] : groups) {
    const auto tag = static_cast<SubsetTag>(key.second);
    const std::vector<Embedding>& utts = sets[group.first].utterances;
    PseudoSpeaker entry;
    entry.speaker_id = key.first;
    entry.tag = tag;
    entry.source.speaker_id = key.first;
    entry.source.vector = MeanOf(utts, group.second);

    bool placed = false;
    for (uint32_t counter = 0; counter <= kMaxRedraws; ++counter) {
      std::mt19937_64 rng = MakeStream(params.rng_seed, key.first, tag, counter);
      const Selection sel = SelectCandidates(entry.source, pool, params, rng);
      std::vector<std::size_t> signature = sel.chosen;
      std::sort(signature.begin(), signature.end());
      if (used_sets.count(signature)) continue;
      used_sets.insert(signature);
      entry.stream_counter = counter;
      entry.pseudo.vector = PseudoVector(pool, sel.chosen, params);
      entry.pseudo.speaker_id = PseudoId(key.first, tag, params.rng_seed);
      for (std::size_t idx : sel.chosen) {
        entry.candidate_ids.push_back(pool[idx].utterance_id);
      }
      placed = true;
      break;
    }
    if (!placed) {
      Fail(ErrorKind::kConfig,
           "speaker " + key.first + " (" + TagName(tag) +
               "): candidate subset collides with another pseudo-speaker after " +
               std::to_string(kMaxRedraws) +
               " re-draws; the pool is too small or degenerate");
    }
    assignment.entries.push_back(std::move(entry));
  }
  return assignment;
}

PseudoSpeakerAssignment AssignPseudoSpeakers(
    std::span<const Embedding> utterances, std::span<const Embedding> pool,
    const PoolSelectionParams& params) {
  std::vector<Embedding> copy(utterances.begin(), utterances.end());
  const TaggedUtterances sets[2] = {{SubsetTag::kEnrollment, copy},
                                    {SubsetTag::kTrial, copy}};
  return AssignPseudoSpeakers(sets, pool, params);
}

std::vector<Embedding> ReadEmbeddings(const std::string& path) {
  std::vector<Embedding> out;
  std::size_t dim = 0;
  for (const text::Line& line : text::ReadRecords(path)) {
    if (line.fields.size() < 3) {
      text::ParseFail(path, line.number,
                      "expected '<utterance-id> <speaker-id> <v1> ... <vD>'");
    }
    Embedding e;
    e.utterance_id = line.fields[0];
    e.speaker_id = line.fields[1];
    for (std::size_t i = 2; i < line.fields.size(); ++i) {
      e.vector.push_back(text::ParseDouble(line.fields[i], path, line.number));
    }
    if (out.empty()) {
      dim = e.vector.size();
    } else if (e.vector.size() != dim) {
      text::ParseFail(path, line.number,
                      "dimension " + std::to_string(e.vector.size()) +
                          " differs from " + std::to_string(dim));
    }
    out.push_back(std::move(e));
  }
  return out;
}

void WriteEmbeddings(const std::string& path,
                     std::span<const Embedding> embeddings) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  for (const Embedding& e : embeddings) {
    out << e.utterance_id << ' ' << e.speaker_id;
    for (double v : e.vector) out << ' ' << text::FormatExact(v);
    out << '\n';
  }
  if (!out) Fail(ErrorKind::kIo, "write error on " + path);
}

}  // namespace voxanon::embed
