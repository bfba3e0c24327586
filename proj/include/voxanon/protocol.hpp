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

// Evaluation bookkeeping: trial lists and score reconciliation, the
// speaker-to-speaker pseudo-speaker consistency rules, and result tables.

#ifndef VOXANON_PROTOCOL_HPP_
#define VOXANON_PROTOCOL_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "voxanon/embed_anon.hpp"
#include "voxanon/metrics.hpp"

namespace voxanon::protocol {

enum class TrialLabel { kTarget, kNontarget };

struct Trial {
  std::string enrollment_id;  // enrollment speaker (model) ID
  std::string test_id;        // test utterance ID
  TrialLabel label = TrialLabel::kNontarget;
};

struct TrialCounts {
  std::size_t target = 0;
  std::size_t nontarget = 0;
  std::size_t total() const { return target + nontarget; }
};

// speaker ID -> gender (or any other partition label)
using Metadata = std::map<std::string, std::string>;

struct TrialList {
  std::vector<Trial> entries;

  TrialCounts Counts() const;
  // Partition by the enrollment speaker's metadata label; speakers without
  // metadata are counted under "unknown".
  std::map<std::string, TrialCounts> CountsByGender(const Metadata& meta) const;
  TrialList FilterByGender(const Metadata& meta, const std::string& gender) const;
};

// `<enroll-id> <test-utt> target|nontarget`. Malformed lines raise kParse
// with the line number; a repeated pair raises kValidation naming it.
TrialList LoadTrials(const std::string& path);

// `<speaker-id> <gender>`
Metadata ReadMetadata(const std::string& path);

struct ExpectedCount {
  TrialLabel label = TrialLabel::kTarget;
  std::string gender;  // "all" for the whole list
  std::size_t count = 0;
};

// `target|nontarget <gender|all> <count>`
std::vector<ExpectedCount> ReadExpectedCounts(const std::string& path);

// One human-readable line per mismatch; empty when everything reconciles.
std::vector<std::string> CheckCounts(const TrialList& trials,
                                     const Metadata& meta,
                                     std::span<const ExpectedCount> expected);

// Partitions the scores of `<enroll-id> <test-utt> <score>` lines by trial
// label. Every trial must be scored exactly once and the score file may not
// hold unknown pairs; otherwise kReconcile listing the pairs. With `subset`
// the file is still reconciled against `trials` but only the subset's
// trials are returned.
metrics::ScoreSet ScoreTrials(const std::string& score_path,
                              const TrialList& trials,
                              const TrialList* subset = nullptr);

struct MappingRecord {
  std::string utterance_id;
  std::string speaker_id;
  embed::SubsetTag tag = embed::SubsetTag::kEnrollment;
  std::string pseudo_id;
};

// `<utt-id> <speaker-id> enrollment|trial <pseudo-id>`; kParse on malformed
// lines.
std::vector<MappingRecord> ReadMapping(const std::string& path);

struct Violation {
  int rule = 0;  // 1, 2 or 3
  std::string message;
};

struct ValidationReport {
  std::size_t records = 0;
  std::vector<Violation> violations;

  bool compliant() const { return violations.empty(); }
  std::string ToJson() const;
};

// Rule 1: one pseudo-speaker per (speaker, tag).
// Rule 2: within a tag, different speakers get different pseudo-speakers.
// Rule 3: a speaker's enrollment and trial pseudo-speakers differ. Speakers
// seen under only one tag satisfy it vacuously.
ValidationReport ValidatePseudoMapping(std::span<const MappingRecord> mapping);

struct AsvRow {
  std::string dataset;
  char enrollment = 'o';  // o: original, a: anonymized
  char trial = 'o';
  std::string gender;
  double eer_percent = 0.0;
  double cllr_min = 0.0;
  double cllr = 0.0;
  std::string source;  // score file the three cells were computed from
};

struct WerRow {
  std::string dataset;
  char condition = 'o';
  double wer_percent = 0.0;
  std::string source;  // hypothesis transcript file
};

struct ResultsTable {
  std::vector<AsvRow> asv;
  std::vector<WerRow> wer;

  bool empty() const { return asv.empty() && wer.empty(); }
};

enum class TableFormat { kPlain, kLatex };

TableFormat ParseTableFormat(const std::string& name);

// EER and both C_llr columns with 3 decimals, WER with 2. The plain layout
// parses back with ParseResults; the LaTeX rows follow the challenge tables
// (EER, C_llr^min, C_llr, Enr, Trl, Gen), with WER rows of one dataset and
// condition grouped on one line. kContract on an empty table.
std::string EmitResults(const ResultsTable& table, TableFormat format);

ResultsTable ParseResults(const std::string& text,
                          const std::string& origin = "<results>");
ResultsTable ReadResults(const std::string& path);

}  // namespace voxanon::protocol

#endif  // VOXANON_PROTOCOL_HPP_
