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

#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "voxanon/protocol.hpp"

using namespace voxanon;
using namespace voxanon::protocol;
using embed::SubsetTag;
using voxanon::testing::TempDir;
using voxanon::testing::ThrowsKind;

namespace {

std::vector<MappingRecord> CompliantMapping(int speakers, int utts_per_tag) {
  std::vector<MappingRecord> m;
  for (int s = 0; s < speakers; ++s) {
    const std::string spk = "spk" + std::to_string(s);
    for (SubsetTag tag : {SubsetTag::kEnrollment, SubsetTag::kTrial}) {
      const std::string pseudo =
          "ps-" + spk + (tag == SubsetTag::kEnrollment ? "-e" : "-t");
      for (int u = 0; u < utts_per_tag; ++u) {
        m.push_back({spk + "-" + embed::TagName(tag) + std::to_string(u), spk, tag, pseudo});
      }
    }
  }
  return m;
}

std::vector<int> Rules(const ValidationReport& r) {
  std::vector<int> out;
  for (const Violation& v : r.violations) out.push_back(v.rule);
  return out;
}

}  // namespace

TEST_CASE("trial lists and counts") {
  TempDir dir("proto");
  testing::WriteFile(dir / "trials",
                     "# enroll test label\nA u1 target\nA u2 nontarget\nB u3 target\n"
                     "B u4 nontarget\nC u5 nontarget\n");
  const TrialList t = LoadTrials(dir / "trials");
  CHECK(t.Counts().target == 2);
  CHECK(t.Counts().nontarget == 3);

  testing::WriteFile(dir / "meta", "A f\nB m\n");
  const Metadata meta = ReadMetadata(dir / "meta");
  const auto by = t.CountsByGender(meta);
  CHECK(by.at("f").total() == 2);
  CHECK(by.at("m").total() == 2);
  CHECK(by.at("unknown").total() == 1);
  CHECK(t.FilterByGender(meta, "f").entries.size() == 2);

  testing::WriteFile(dir / "expected", "target all 2\nnontarget all 3\ntarget f 1\n");
  CHECK(CheckCounts(t, meta, ReadExpectedCounts(dir / "expected")).empty());
  testing::WriteFile(dir / "expected2", "target all 695\n");
  const std::vector<std::string> issues =
      CheckCounts(t, meta, ReadExpectedCounts(dir / "expected2"));
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].find("695") != std::string::npos);

  testing::WriteFile(dir / "dup", "A u1 target\nA u1 target\n");
  try {
    LoadTrials(dir / "dup");
    FAIL("duplicate accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    CHECK(std::string(e.what()).find("A/u1") != std::string::npos);
  }
  testing::WriteFile(dir / "badlabel", "A u1 maybe\n");
  CHECK(ThrowsKind([&] { LoadTrials(dir / "badlabel"); }, ErrorKind::kParse));
}

TEST_CASE("score reconciliation") {
  TempDir dir("proto");
  testing::WriteFile(dir / "trials",
                     "A u1 target\nA u2 nontarget\nB u3 target\nB u4 nontarget\nC u5 nontarget\n");
  const TrialList t = LoadTrials(dir / "trials");
  testing::WriteFile(dir / "scores", "C u5 -1\nA u1 2.5\nA u2 0.1\nB u3 1\nB u4 -0.5\n");
  const metrics::ScoreSet s = ScoreTrials(dir / "scores", t);
  CHECK(s.target_scores.size() == 2);
  CHECK(s.impostor_scores.size() == 3);
  CHECK(s.target_scores[0] == 2.5);

  testing::WriteFile(dir / "missing", "A u1 2.5\nA u2 0.1\nB u3 1\nB u4 -0.5\n");
  try {
    ScoreTrials(dir / "missing", t);
    FAIL("missing row accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kReconcile);
    CHECK(std::string(e.what()).find("C/u5") != std::string::npos);
  }
  testing::WriteFile(dir / "extra", "C u5 -1\nA u1 2.5\nA u2 0.1\nB u3 1\nB u4 -0.5\nZ u9 3\n");
  CHECK(ThrowsKind([&] { ScoreTrials(dir / "extra", t); }, ErrorKind::kReconcile));
  testing::WriteFile(dir / "twice", "C u5 -1\nA u1 2.5\nA u2 0.1\nB u3 1\nB u4 -0.5\nB u4 1\n");
  CHECK(ThrowsKind([&] { ScoreTrials(dir / "twice", t); }, ErrorKind::kReconcile));

  const Metadata meta{{"A", "f"}, {"B", "m"}, {"C", "m"}};
  std::size_t total = 0;
  for (const std::string g : {"f", "m"}) {
    const TrialList part = t.FilterByGender(meta, g);
    const metrics::ScoreSet ps = ScoreTrials(dir / "scores", t, &part);
    total += ps.target_scores.size() + ps.impostor_scores.size();
  }
  CHECK(total == t.entries.size());
}

TEST_CASE("mapping validation") {
  CHECK(ValidatePseudoMapping(CompliantMapping(10, 3)).compliant());

  std::vector<MappingRecord> shared = CompliantMapping(3, 2);
  for (MappingRecord& r : shared) {
    if (r.speaker_id == "spk1" && r.tag == SubsetTag::kTrial) r.pseudo_id = "ps-spk0-t";
  }
  CHECK(Rules(ValidatePseudoMapping(shared)) == std::vector<int>{2});

  std::vector<MappingRecord> same = CompliantMapping(3, 2);
  for (MappingRecord& r : same) {
    if (r.speaker_id == "spk2" && r.tag == SubsetTag::kTrial) r.pseudo_id = "ps-spk2-e";
  }
  CHECK(Rules(ValidatePseudoMapping(same)) == std::vector<int>{3});

  std::vector<MappingRecord> split = CompliantMapping(3, 2);
  split[0].pseudo_id = "fresh";
  CHECK(Rules(ValidatePseudoMapping(split)) == std::vector<int>{1});

  // A speaker present in only one tag satisfies rule 3 vacuously.
  std::vector<MappingRecord> one_sided = CompliantMapping(2, 1);
  one_sided.push_back({"x1", "solo", SubsetTag::kTrial, "ps-solo"});
  CHECK(ValidatePseudoMapping(one_sided).compliant());

  const std::string json = ValidatePseudoMapping(shared).ToJson();
  CHECK(json.find("\"rule\": 2") != std::string::npos);

  TempDir dir("proto");
  testing::WriteFile(dir / "map", "u1 s1 enrollment p1\nu2 s1 trial p2\n");
  CHECK(ReadMapping(dir / "map").size() == 2);
  testing::WriteFile(dir / "bad", "u1 s1 test p1\n");
  CHECK(ThrowsKind([&] { ReadMapping(dir / "bad"); }, ErrorKind::kParse));
}

TEST_CASE("results tables") {
  ResultsTable t;
  t.asv.push_back({"libri_dev", 'o', 'o', "f", 8.665, 0.304, 42.857, "scores.txt"});
  const std::string latex = EmitResults(t, TableFormat::kLatex);
  CHECK(latex.find("1 & libri\\_dev & 8.665 & 0.304 & 42.857 & o & o & f") != std::string::npos);

  ResultsTable w;
  w.wer.push_back({"libri_dev", 'o', 5.25, "lm_small"});
  w.wer.push_back({"libri_dev", 'o', 3.83, "lm_large"});
  const std::string wl = EmitResults(w, TableFormat::kLatex);
  CHECK(wl.find("1 & libri\\_dev & 5.25 & 3.83 & o") != std::string::npos);

  CHECK(ThrowsKind([] { EmitResults(ResultsTable{}, TableFormat::kPlain); }, ErrorKind::kContract));

  ResultsTable both = t;
  both.wer = w.wer;
  const std::string plain = EmitResults(both, TableFormat::kPlain);
  const ResultsTable back = ParseResults(plain);
  REQUIRE(back.asv.size() == 1);
  REQUIRE(back.wer.size() == 2);
  CHECK(back.asv[0].eer_percent == 8.665);
  CHECK(back.asv[0].cllr == 42.857);
  CHECK(back.asv[0].source == "scores.txt");
  CHECK(back.wer[1].wer_percent == 3.83);
  CHECK(EmitResults(back, TableFormat::kPlain) == plain);
  CHECK(ParseTableFormat("latex") == TableFormat::kLatex);
  CHECK(ThrowsKind([] { ParseTableFormat("html"); }, ErrorKind::kConfig));
  CHECK(ThrowsKind([] { ParseResults("asv libri_dev o\n"); }, ErrorKind::kParse));
}
