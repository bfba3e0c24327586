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

#include "voxanon/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "text_util.hpp"
#include "voxanon/error.hpp"

namespace voxanon::protocol {

namespace {

using Pair = std::pair<std::string, std::string>;

constexpr std::size_t kListedPairs = 10;

std::string JoinPairs(const std::vector<Pair>& pairs) {
  std::string out;
  for (std::size_t i = 0; i < pairs.size() && i < kListedPairs; ++i) {
    out += (i ? ", " : " ") + pairs[i].first + "/" + pairs[i].second;
  }
  if (pairs.size() > kListedPairs) {
    out += ", ... (" + std::to_string(pairs.size()) + " in total)";
  }
  return out;
}

TrialLabel ParseLabel(const std::string& token, const std::string& path,
                      std::size_t line) {
  if (token == "target") return TrialLabel::kTarget;
  if (token == "nontarget") return TrialLabel::kNontarget;
  text::ParseFail(path, line,
                  "label must be target or nontarget, got '" + token + "'");
}

const char* LabelName(TrialLabel label) {
  return label == TrialLabel::kTarget ? "target" : "nontarget";
}

char ParseCondition(const std::string& token, const std::string& origin,
                    std::size_t line) {
  if (token == "o" || token == "a") return token[0];
  text::ParseFail(origin, line,
                  "condition must be o or a, got '" + token + "'");
}

std::string LatexEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '&' || c == '%' || c == '#') out += '\\';
    out += c;
  }
  return out;
}

std::string SourceField(const std::string& source) {
  return source.empty() ? "-" : source;
}

}  // namespace

TrialCounts TrialList::Counts() const {
  TrialCounts c;
  for (const Trial& t : entries) {
    (t.label == TrialLabel::kTarget ? c.target : c.nontarget)++;
  }
  return c;
}

std::map<std::string, TrialCounts> TrialList::CountsByGender(
    const Metadata& meta) const {
  std::map<std::string, TrialCounts> out;
  for (const Trial& t : entries) {
    auto it = meta.find(t.enrollment_id);
    TrialCounts& c = out[it == meta.end() ? "unknown" : it->second];
    (t.label == TrialLabel::kTarget ? c.target : c.nontarget)++;
  }
  return out;
}

TrialList TrialList::FilterByGender(const Metadata& meta,
                                    const std::string& gender) const {
  TrialList out;
  for (const Trial& t : entries) {
    auto it = meta.find(t.enrollment_id);
    if (it != meta.end() && it->second == gender) out.entries.push_back(t);
  }
  return out;
}

TrialList LoadTrials(const std::string& path) {
  TrialList list;
  std::set<Pair> seen;
  for (const text::Line& line : text::ReadRecords(path)) {
    if (line.fields.size() != 3) {
      text::ParseFail(path, line.number,
                      "expected '<enroll-id> <test-utt> target|nontarget'");
    }
    Trial t{line.fields[0], line.fields[1],
            ParseLabel(line.fields[2], path, line.number)};
    if (!seen.emplace(t.enrollment_id, t.test_id).second) {
      Fail(ErrorKind::kValidation, path + ":" + std::to_string(line.number) +
                                       ": duplicate trial " + t.enrollment_id +
                                       "/" + t.test_id);
    }
    list.entries.push_back(std::move(t));
  }
  return list;
}

Metadata ReadMetadata(const std::string& path) {
  Metadata meta;
  for (const text::Line& line : text::ReadRecords(path)) {
    if (line.fields.size() != 2) {
      text::ParseFail(path, line.number, "expected '<speaker-id> <gender>'");
    }
    if (!meta.emplace(line.fields[0], line.fields[1]).second) {
      text::ParseFail(path, line.number,
                      "duplicate speaker " + line.fields[0]);
    }
  }
  return meta;
}

std::vector<ExpectedCount> ReadExpectedCounts(const std::string& path) {
  std::vector<ExpectedCount> out;
  for (const text::Line& line : text::ReadRecords(path)) {
    if (line.fields.size() != 3) {
      text::ParseFail(path, line.number,
                      "expected 'target|nontarget <gender|all> <count>'");
    }
    ExpectedCount e;
    e.label = ParseLabel(line.fields[0], path, line.number);
    e.gender = line.fields[1];
    const double count = text::ParseDouble(line.fields[2], path, line.number);
    if (count < 0 || count != static_cast<double>(static_cast<std::size_t>(count))) {
      text::ParseFail(path, line.number, "count must be a non-negative integer");
    }
    e.count = static_cast<std::size_t>(count);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<std::string> CheckCounts(const TrialList& trials,
                                     const Metadata& meta,
                                     std::span<const ExpectedCount> expected) {
  const TrialCounts all = trials.Counts();
  const auto by_gender = trials.CountsByGender(meta);
  std::vector<std::string> out;
  for (const ExpectedCount& e : expected) {
    TrialCounts c;
    if (e.gender == "all") {
      c = all;
    } else if (auto it = by_gender.find(e.gender); it != by_gender.end()) {
      c = it->second;
    }
    const std::size_t actual =
        e.label == TrialLabel::kTarget ? c.target : c.nontarget;
    if (actual != e.count) {
      out.push_back(std::string(LabelName(e.label)) + " trials (" + e.gender +
                    "): expected " + std::to_string(e.count) + ", found " +
                    std::to_string(actual));
    }
  }
  return out;
}

metrics::ScoreSet ScoreTrials(const std::string& score_path,
                              const TrialList& trials,
                              const TrialList* subset) {
  std::map<Pair, double> scores;
  std::vector<Pair> duplicates;
  for (const text::Line& line : text::ReadRecords(score_path)) {
    if (line.fields.size() != 3) {
      text::ParseFail(score_path, line.number,
                      "expected '<enroll-id> <test-utt> <score>'");
    }
    const double s = text::ParseDouble(line.fields[2], score_path, line.number);
    Pair key{line.fields[0], line.fields[1]};
    if (!scores.emplace(key, s).second) duplicates.push_back(std::move(key));
  }

  metrics::ScoreSet set;
  std::vector<Pair> missing;
  std::set<Pair> used;
  for (const Trial& t : trials.entries) {
    Pair key{t.enrollment_id, t.test_id};
    auto it = scores.find(key);
    if (it == scores.end()) {
      missing.push_back(std::move(key));
      continue;
    }
    used.insert(key);
    (t.label == TrialLabel::kTarget ? set.target_scores : set.impostor_scores)
        .push_back(it->second);
  }
  std::vector<Pair> extra;
  for (const auto& [key, s] : scores) {
    if (!used.count(key)) extra.push_back(key);
  }
  if (!missing.empty() || !extra.empty() || !duplicates.empty()) {
    std::string msg = score_path + " does not reconcile with the trial list:";
    if (!missing.empty()) msg += " missing scores for" + JoinPairs(missing) + ";";
    if (!extra.empty()) msg += " scores for unknown trials" + JoinPairs(extra) + ";";
    if (!duplicates.empty()) {
      msg += " repeated score rows" + JoinPairs(duplicates) + ";";
    }
    msg.pop_back();
    Fail(ErrorKind::kReconcile, msg);
  }
  if (subset == nullptr) return set;

  metrics::ScoreSet part;
  for (const Trial& t : subset->entries) {
    auto it = scores.find({t.enrollment_id, t.test_id});
    if (it == scores.end()) {
      Fail(ErrorKind::kReconcile, "subset trial " + t.enrollment_id + " " +
                                      t.test_id + " is not in the trial list");
    }
    (t.label == TrialLabel::kTarget ? part.target_scores : part.impostor_scores)
        .push_back(it->second);
  }
  return part;
}

std::vector<MappingRecord> ReadMapping(const std::string& path) {
  std::vector<MappingRecord> out;
  for (const text::Line& line : text::ReadRecords(path)) {
    if (line.fields.size() != 4) {
      text::ParseFail(path, line.number,
                      "expected '<utt-id> <speaker-id> enrollment|trial "
                      "<pseudo-id>'");
    }
    MappingRecord r;
    r.utterance_id = line.fields[0];
    r.speaker_id = line.fields[1];
    if (line.fields[2] == "enrollment") {
      r.tag = embed::SubsetTag::kEnrollment;
    } else if (line.fields[2] == "trial") {
      r.tag = embed::SubsetTag::kTrial;
    } else {
      text::ParseFail(path, line.number,
                      "tag must be enrollment or trial, got '" +
                          line.fields[2] + "'");
    }
    r.pseudo_id = line.fields[3];
    out.push_back(std::move(r));
  }
  return out;
}

std::string ValidationReport::ToJson() const {
  nlohmann::ordered_json j;
  j["records"] = records;
  j["compliant"] = compliant();
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const Violation& v : violations) {
    list.push_back({{"rule", v.rule}, {"message", v.message}});
  }
  j["violations"] = std::move(list);
  return j.dump(2);
}

ValidationReport ValidatePseudoMapping(std::span<const MappingRecord> mapping) {
  using Tag = embed::SubsetTag;
  std::map<std::pair<std::string, Tag>, std::set<std::string>> pseudo_of;
  std::map<std::pair<Tag, std::string>, std::set<std::string>> speakers_of;
  for (const MappingRecord& r : mapping) {
    pseudo_of[{r.speaker_id, r.tag}].insert(r.pseudo_id);
    speakers_of[{r.tag, r.pseudo_id}].insert(r.speaker_id);
  }

  const auto join = [](const std::set<std::string>& items) {
    std::string out;
    for (const std::string& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
  };

  ValidationReport report;
  report.records = mapping.size();
  for (const auto& [key, pseudos] : pseudo_of) {
    if (pseudos.size() > 1) {
      report.violations.push_back(
          {1, "speaker " + key.first + " (" + embed::TagName(key.second) +
                  ") is converted into several pseudo-speakers: " + join(pseudos)});
    }
  }
  for (const auto& [key, speakers] : speakers_of) {
    if (speakers.size() > 1) {
      report.violations.push_back(
          {2, "pseudo-speaker " + key.second + " (" + embed::TagName(key.first) +
                  ") is shared by speakers " + join(speakers)});
    }
  }
  for (const auto& [key, enrollment] : pseudo_of) {
    if (key.second != Tag::kEnrollment) continue;
    auto it = pseudo_of.find({key.first, Tag::kTrial});
    if (it == pseudo_of.end()) continue;
    std::set<std::string> common;
    std::set_intersection(enrollment.begin(), enrollment.end(),
                          it->second.begin(), it->second.end(),
                          std::inserter(common, common.begin()));
    if (!common.empty()) {
      report.violations.push_back(
          {3, "speaker " + key.first +
                  " has the same pseudo-speaker in enrollment and trial: " +
                  join(common)});
    }
  }
  return report;
}

TableFormat ParseTableFormat(const std::string& name) {
  if (name == "plain") return TableFormat::kPlain;
  if (name == "latex") return TableFormat::kLatex;
  Fail(ErrorKind::kConfig,
       "unknown table format '" + name + "' (expected plain or latex)");
}

std::string EmitResults(const ResultsTable& table, TableFormat format) {
  if (table.empty()) Fail(ErrorKind::kContract, "empty results table");
  using text::FormatFixed;
  std::ostringstream os;
  if (format == TableFormat::kPlain) {
    if (!table.asv.empty()) {
      os << "# ASV  dataset  Enr  Trl  Gen  EER,%  Cllr_min  Cllr  source\n";
      for (const AsvRow& r : table.asv) {
        os << "asv  " << std::left << std::setw(16) << r.dataset << ' '
           << r.enrollment << "  " << r.trial << "  " << std::setw(3)
           << r.gender << std::right << std::setw(9)
           << FormatFixed(r.eer_percent, 3) << std::setw(8)
           << FormatFixed(r.cllr_min, 3) << std::setw(10)
           << FormatFixed(r.cllr, 3) << "  " << SourceField(r.source) << '\n';
      }
    }
    if (!table.wer.empty()) {
      os << "# WER  dataset  Data  WER,%  source\n";
      for (const WerRow& r : table.wer) {
        os << "wer  " << std::left << std::setw(16) << r.dataset << ' '
           << r.condition << std::right << std::setw(9)
           << FormatFixed(r.wer_percent, 2) << "  " << SourceField(r.source)
           << '\n';
      }
    }
    return os.str();
  }

  if (!table.asv.empty()) {
    os << "% # & Dev. set & EER,\\% & $C_{llr}^{min}$ & $C_{llr}$ & Enr & Trl "
          "& Gen\n";
    std::size_t index = 1;
    for (const AsvRow& r : table.asv) {
      os << index++ << " & " << LatexEscape(r.dataset) << " & "
         << FormatFixed(r.eer_percent, 3) << " & " << FormatFixed(r.cllr_min, 3)
         << " & " << FormatFixed(r.cllr, 3) << " & " << r.enrollment << " & "
         << r.trial << " & " << LatexEscape(r.gender) << " \\\\ \\hline\n";
    }
  }
  if (!table.wer.empty()) {
    os << "% # & Dev. set & WER,\\% & Data\n";
    std::vector<std::pair<std::string, char>> order;
    std::map<std::pair<std::string, char>, std::vector<double>> cells;
    for (const WerRow& r : table.wer) {
      auto key = std::make_pair(r.dataset, r.condition);
      if (!cells.count(key)) order.push_back(key);
      cells[key].push_back(r.wer_percent);
    }
    std::size_t index = 1;
    for (const auto& key : order) {
      os << index++ << " & " << LatexEscape(key.first);
      for (double w : cells[key]) os << " & " << FormatFixed(w, 2);
      os << " & " << key.second << " \\\\ \\hline\n";
    }
  }
  return os.str();
}

ResultsTable ParseResults(const std::string& text, const std::string& origin) {
  ResultsTable table;
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) {
      raw.resize(hash);
    }
    const std::vector<std::string> f = text::SplitWhitespace(raw);
    if (f.empty()) continue;
    const std::string source = f.back() == "-" ? "" : f.back();
    if (f[0] == "asv") {
      if (f.size() != 9) {
        text::ParseFail(origin, number,
                        "asv row needs dataset, Enr, Trl, Gen, EER, Cllr_min, "
                        "Cllr and source");
      }
      AsvRow r;
      r.dataset = f[1];
      r.enrollment = ParseCondition(f[2], origin, number);
      r.trial = ParseCondition(f[3], origin, number);
      r.gender = f[4];
      r.eer_percent = text::ParseDouble(f[5], origin, number);
      r.cllr_min = text::ParseDouble(f[6], origin, number);
      r.cllr = text::ParseDouble(f[7], origin, number);
      r.source = source;
      table.asv.push_back(std::move(r));
    } else if (f[0] == "wer") {
      if (f.size() != 5) {
        text::ParseFail(origin, number,
                        "wer row needs dataset, Data, WER and source");
      }
      WerRow r;
      r.dataset = f[1];
      r.condition = ParseCondition(f[2], origin, number);
      r.wer_percent = text::ParseDouble(f[3], origin, number);
      r.source = source;
      table.wer.push_back(std::move(r));
    } else {
      text::ParseFail(origin, number, "unknown row kind '" + f[0] + "'");
    }
  }
  return table;
}

ResultsTable ReadResults(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseResults(buf.str(), path);
}

}  // namespace voxanon::protocol
