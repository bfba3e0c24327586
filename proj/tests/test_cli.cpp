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

// Runs the voxanon executable end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include "doctest.h"
#include "test_util.hpp"
#include "voxanon/audio.hpp"

#ifndef VOXANON_CLI
#error "VOXANON_CLI must name the voxanon executable"
#endif

using voxanon::testing::ReadFile;
using voxanon::testing::TempDir;
using voxanon::testing::WriteFile;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result Run(const TempDir& dir, const std::string& args,
           const std::string& env = "") {
  const std::string out = dir / ".stdout", err = dir / ".stderr";
  const std::string cmd = env + " \"" VOXANON_CLI "\" " + args + " >\"" + out +
                          "\" 2>\"" + err + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = ReadFile(out);
  r.err = ReadFile(err);
  return r;
}

std::string Q(const std::string& path) { return "\"" + path + "\""; }

}  // namespace

TEST_CASE("usage errors exit 2") {
  TempDir dir("cli");
  CHECK(Run(dir, "").code == 2);
  CHECK(Run(dir, "frobnicate").code == 2);
  CHECK(Run(dir, "eval-asv --scores x").code == 2);
  CHECK(Run(dir, "--help").code == 0);
}

TEST_CASE("anonymize") {
  TempDir dir("cli");
  for (int i = 0; i < 2; ++i) {
    voxanon::audio::AudioBuffer b;
    b.samples = voxanon::testing::ResonantNoise(6000, 16000, {800, 2000}, 0.95, i, 0.3);
    voxanon::audio::WriteWav(b, dir / ("f" + std::to_string(i) + ".wav"));
  }
  WriteFile(dir / "m.txt", "f0 f0.wav\nf1 f1.wav\n");
  const Result r = Run(dir, "anonymize --manifest " + Q(dir / "m.txt") + " --out " + Q(dir / "out"));
  CHECK(r.code == 0);
  CHECK(r.err.find("alpha=0.8 (default)") != std::string::npos);
  CHECK(r.err.find("lpc_order=20 (default)") != std::string::npos);
  const std::string report = ReadFile(dir / "out/report.json");
  CHECK(report.find("\"processed\": 2") != std::string::npos);
  const std::string first = ReadFile(dir / "out/f0.wav");
  CHECK(!first.empty());

  const Result again = Run(dir, "anonymize --manifest " + Q(dir / "m.txt") + " --out " +
                                    Q(dir / "out") + " --alpha 0.8 --jobs 2");
  CHECK(again.code == 0);
  CHECK(again.err.find("alpha=0.8\n") != std::string::npos);
  CHECK(ReadFile(dir / "out/f0.wav") == first);

  WriteFile(dir / "m2.txt", "f0 f0.wav\nbad nothere.wav\n");
  CHECK(Run(dir, "anonymize --manifest " + Q(dir / "m2.txt") + " --out " + Q(dir / "o2")).code == 1);
  CHECK(Run(dir, "anonymize --manifest " + Q(dir / "none.txt") + " --out " + Q(dir / "o3")).code == 2);
  CHECK(Run(dir, "anonymize --manifest " + Q(dir / "m.txt") + " --out " + Q(dir / "o4") +
                     " --alpha -1").code == 2);
}

TEST_CASE("anon-embed") {
  TempDir dir("cli");
  std::string pool;
  for (int i = 0; i < 50; ++i) {
    pool += "p" + std::to_string(i) + " ps" + std::to_string(i) + " " +
            std::to_string(std::cos(0.13 * i)) + " " + std::to_string(std::sin(0.37 * i)) +
            " " + std::to_string(0.01 * i) + "\n";
  }
  WriteFile(dir / "pool", pool);
  WriteFile(dir / "emb", "u1 s1 1 0 0\nu2 s1 0.8 0.2 0\nu3 s2 0 1 0.5\nu4 s3 -1 0.3 0\nu5 s4 0.2 0.2 0.2\n");
  const std::string base = "anon-embed --embeddings " + Q(dir / "emb") + " --pool " + Q(dir / "pool") +
                           " --tag enrollment --n-farthest 20 --n-subset 10 ";
  const Result a = Run(dir, base + "--seed 3 --out " + Q(dir / "a"));
  CHECK(a.code == 0);
  const Result b = Run(dir, base + "--seed 3 --out " + Q(dir / "b"));
  CHECK(b.code == 0);
  CHECK(ReadFile(dir / "a") == ReadFile(dir / "b"));
  CHECK(ReadFile(dir / "a.audit.json") == ReadFile(dir / "b.audit.json"));
  CHECK(ReadFile(dir / "a.audit.json").find("\"seed\": 3") != std::string::npos);

  const Result env = Run(dir, base + "--out " + Q(dir / "c"), "VOXANON_SEED=3");
  CHECK(env.code == 0);
  CHECK(env.err.find("VOXANON_SEED") != std::string::npos);
  CHECK(ReadFile(dir / "c") == ReadFile(dir / "a"));

  const Result big = Run(dir, "anon-embed --embeddings " + Q(dir / "emb") + " --pool " +
                                  Q(dir / "pool") + " --tag trial --n-farthest 200 --out " + Q(dir / "d"));
  CHECK(big.code == 2);
  CHECK(big.err.find("pool too small") != std::string::npos);
}

TEST_CASE("eval-asv") {
  TempDir dir("cli");
  WriteFile(dir / "trials", "A u1 target\nA u2 nontarget\nB u3 target\nB u4 nontarget\n");
  WriteFile(dir / "sep", "A u1 3\nA u2 -1\nB u3 2\nB u4 -2\n");
  const Result sep = Run(dir, "eval-asv --scores " + Q(dir / "sep") + " --trials " + Q(dir / "trials"));
  CHECK(sep.code == 0);
  CHECK(sep.out.find("EER,%     0.000") != std::string::npos);

  WriteFile(dir / "zero", "A u1 0\nA u2 0\nB u3 0\nB u4 0\n");
  const Result zero = Run(dir, "eval-asv --scores " + Q(dir / "zero") + " --trials " +
                                   Q(dir / "trials") + " --dataset libri_dev --emit latex");
  CHECK(zero.code == 0);
  CHECK(zero.out.find("Cllr      1.000") != std::string::npos);
  CHECK(zero.out.find("1 & libri\\_dev & 50.000 & 1.000 & 1.000 & o & o & all") != std::string::npos);

  WriteFile(dir / "short", "A u1 0\n");
  CHECK(Run(dir, "eval-asv --scores " + Q(dir / "short") + " --trials " + Q(dir / "trials")).code == 1);
  WriteFile(dir / "expected", "target all 5\n");
  CHECK(Run(dir, "eval-asv --scores " + Q(dir / "sep") + " --trials " + Q(dir / "trials") +
                     " --expected " + Q(dir / "expected")).code == 1);

  const std::string res = dir / "results.txt";
  CHECK(Run(dir, "eval-asv --scores " + Q(dir / "sep") + " --trials " + Q(dir / "trials") +
                     " --dataset libri_dev --append-results " + Q(res)).code == 0);
  CHECK(Run(dir, "eval-asv --scores " + Q(dir / "zero") + " --trials " + Q(dir / "trials") +
                     " --dataset libri_dev --enr a --trl a --append-results " + Q(res)).code == 0);
  const Result rep = Run(dir, "report --results " + Q(res) + " --format latex");
  CHECK(rep.code == 0);
  CHECK(rep.out.find("2 & libri\\_dev & 50.000 & 1.000 & 1.000 & a & a & all") != std::string::npos);
  CHECK(Run(dir, "report --results " + Q(dir / "missing")).code == 2);
}

TEST_CASE("eval-asr") {
  TempDir dir("cli");
  WriteFile(dir / "ref", "u1 a b c\n");
  WriteFile(dir / "hyp", "u1 a x c d\n");
  const Result same = Run(dir, "eval-asr --ref " + Q(dir / "ref") + " --hyp " + Q(dir / "ref"));
  CHECK(same.code == 0);
  CHECK(same.out.find("WER,%  0.00") != std::string::npos);
  const Result ex = Run(dir, "eval-asr --ref " + Q(dir / "ref") + " --hyp " + Q(dir / "hyp") + " --per-utt");
  CHECK(ex.code == 0);
  CHECK(ex.out.find("WER,%  66.67") != std::string::npos);
  CHECK(ex.out.find("u1  66.67") != std::string::npos);
  WriteFile(dir / "hyp2", "u1 a b c\nu7 q\n");
  CHECK(Run(dir, "eval-asr --ref " + Q(dir / "ref") + " --hyp " + Q(dir / "hyp2")).code == 1);
  WriteFile(dir / "empty", "");
  CHECK(Run(dir, "eval-asr --ref " + Q(dir / "empty") + " --hyp " + Q(dir / "hyp")).code == 2);
}

TEST_CASE("validate") {
  TempDir dir("cli");
  WriteFile(dir / "ok", "u1 s1 enrollment p1\nu2 s1 trial p2\nu3 s2 enrollment p3\nu4 s2 trial p4\n");
  CHECK(Run(dir, "validate --mapping " + Q(dir / "ok")).code == 0);
  WriteFile(dir / "r2", "u1 s1 trial p1\nu2 s2 trial p1\n");
  const Result r2 = Run(dir, "validate --mapping " + Q(dir / "r2"));
  CHECK(r2.code == 1);
  CHECK(r2.out.find("rule 2") != std::string::npos);
  WriteFile(dir / "bad", "u1 s1 enrollment\n");
  CHECK(Run(dir, "validate --mapping " + Q(dir / "bad")).code == 2);
}
