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

// Objective privacy and utility metrics: detection error rates and EER,
// the log-likelihood-ratio cost with its PAV-calibrated minimum, and WER.

#ifndef VOXANON_METRICS_HPP_
#define VOXANON_METRICS_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace voxanon::metrics {

struct ScoreSet {
  std::vector<double> target_scores;
  std::vector<double> impostor_scores;

  // kContract unless both lists are non-empty and finite.
  void Validate() const;
};

struct ErrorRates {
  double threshold = 0.0;
  double p_fa = 0.0;    // #{impostor > threshold} / N_imp
  double p_miss = 0.0;  // #{target <= threshold} / N_tar
};

ErrorRates ComputeErrorRates(const ScoreSet& scores, double threshold);

struct EerResult {
  double eer_percent = 0.0;
  // Observed score at the operating point; -inf when the best operating
  // point lies below every score.
  double threshold = 0.0;
};

// Sweeps thresholds at the observed scores (and below all of them) and picks
// the one minimizing |P_fa - P_miss|, the lowest such threshold on ties. The
// EER is the mean of the two rates there, in percent. Not clamped to 50%.
EerResult ComputeEer(const ScoreSet& scores);

// log2(1 + e^x), stable for large |x|.
double Log2OnePlusExp(double x);

// 0.5 * (mean_t log2(1 + e^-llr) + mean_i log2(1 + e^llr)).
double ComputeCllr(const ScoreSet& scores);

// Monotone score -> LLR map from pool-adjacent-violators regression of the
// labels. Blocks cover the sorted unique scores; tied scores share a block.
struct CalibrationMap {
  struct Block {
    double low = 0.0;   // smallest score in the block
    double high = 0.0;  // largest score in the block
    std::size_t targets = 0;
    std::size_t total = 0;
    double posterior = 0.0;      // targets / total
    double llr = 0.0;            // exact; +-inf for pure blocks
    double clipped_llr = 0.0;    // pure blocks: posterior clipped to 1/2n or 1 - 1/2n, capped by the neighbour
  };
  std::vector<Block> blocks;
  double prior_log_odds = 0.0;  // logit(N_tar / (N_tar + N_imp))

  // Finite LLR for any score: the clipped value of the block whose range
  // contains it, or of the nearest block below (first block below all).
  double Apply(double score) const;
  // Exact block LLR with the same lookup rule; may be infinite.
  double ApplyExact(double score) const;
};

CalibrationMap PavCalibrate(const ScoreSet& scores);

// C_llr of the PAV-calibrated scores. Pure blocks take their limiting cost
// of exactly zero, so the value is finite and satisfies
// C_llr_min <= min(C_llr, 1).
double ComputeCllrMin(const ScoreSet& scores);

struct WerBreakdown {
  int64_t n_sub = 0;
  int64_t n_del = 0;
  int64_t n_ins = 0;
  int64_t n_ref = 0;

  int64_t errors() const { return n_sub + n_del + n_ins; }
  double wer() const;  // errors / n_ref (0 when n_ref == 0)
  WerBreakdown& operator+=(const WerBreakdown& other);
};

// Whitespace split with ASCII case folding.
std::vector<std::string> Tokenize(const std::string& text);

// Minimum edit distance alignment with unit costs. Among equal-cost
// alignments the one with fewest insertions, then fewest deletions, wins.
// kContract on an empty reference.
WerBreakdown ComputeWer(std::span<const std::string> ref,
                        std::span<const std::string> hyp);

using TranscriptTable = std::map<std::string, std::vector<std::string>>;

// `<utterance-id> <word> ...` lines, tokenized; an utterance may have no
// words. Duplicate IDs raise kParse.
TranscriptTable ReadTranscripts(const std::string& path);

struct CorpusWer {
  WerBreakdown total;
  std::map<std::string, WerBreakdown> per_utterance;
  std::vector<std::string> unused_references;  // reported as a warning
};

// Pools error counts over utterances and divides by the total reference
// length. Hypothesis IDs missing from the reference raise kReconcile.
CorpusWer ComputeCorpusWer(const TranscriptTable& ref,
                           const TranscriptTable& hyp);

}  // namespace voxanon::metrics

#endif  // VOXANON_METRICS_HPP_
