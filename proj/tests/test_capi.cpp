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

// Exercises libvoxanon through its C header only.

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "voxanon/voxanon.h"

using voxanon::testing::TempDir;

TEST_CASE("status names and errors") {
  CHECK(std::string(vxa_status_name(VXA_OK)) == "ok");
  CHECK(std::string(vxa_status_name(VXA_ERR_RECONCILE)) == "reconcile");
  CHECK(std::strlen(vxa_version()) > 0);
  vxa_audio* a = nullptr;
  CHECK(vxa_audio_read_wav(nullptr, &a) == VXA_ERR_INVALID_ARGUMENT);
  CHECK(vxa_audio_read_wav("/nonexistent/x.wav", &a) == VXA_ERR_IO);
  CHECK(std::string(vxa_last_error()).find("x.wav") != std::string::npos);
  CHECK(a == nullptr);
}

TEST_CASE("audio handles and anonymization") {
  TempDir dir("capi");
  std::vector<double> x = voxanon::testing::ResonantNoise(8000, 16000, {900}, 0.95, 1, 0.4);
  vxa_audio* in = nullptr;
  REQUIRE(vxa_audio_new(x.data(), x.size(), 16000, &in) == VXA_OK);
  CHECK(vxa_audio_num_samples(in) == 8000);
  CHECK(vxa_audio_sample_rate(in) == 16000);

  vxa_mcadams_params p;
  vxa_mcadams_params_default(&p);
  CHECK(p.alpha == 0.8);
  CHECK(p.lpc_order == 20);
  p.alpha = 1.0;
  vxa_audio* out = nullptr;
  REQUIRE(vxa_mcadams_anonymize(in, &p, &out) == VXA_OK);
  std::vector<double> y(vxa_audio_samples(out), vxa_audio_samples(out) + vxa_audio_num_samples(out));
  CHECK(voxanon::testing::SnrDb(x, y) >= 60.0);

  size_t clipped = 99;
  REQUIRE(vxa_audio_write_wav(out, (dir / "o.wav").c_str(), &clipped) == VXA_OK);
  CHECK(clipped == 0);
  vxa_audio* back = nullptr;
  REQUIRE(vxa_audio_read_wav((dir / "o.wav").c_str(), &back) == VXA_OK);
  CHECK(vxa_audio_num_samples(back) == 8000);

  p.alpha = -1.0;
  vxa_audio* bad = nullptr;
  CHECK(vxa_mcadams_anonymize(in, &p, &bad) == VXA_ERR_CONFIG);
  CHECK(bad == nullptr);

  vxa_audio_free(back);
  vxa_audio_free(out);
  vxa_audio_free(in);
  vxa_audio_free(nullptr);
}

TEST_CASE("corpus through the C API") {
  TempDir dir("capi");
  std::vector<double> x = voxanon::testing::ResonantNoise(4000, 16000, {900}, 0.95, 2, 0.4);
  vxa_audio* a = nullptr;
  REQUIRE(vxa_audio_new(x.data(), x.size(), 16000, &a) == VXA_OK);
  REQUIRE(vxa_audio_write_wav(a, (dir / "a.wav").c_str(), nullptr) == VXA_OK);
  vxa_audio_free(a);
  voxanon::testing::WriteFile(dir / "m.txt", "a a.wav\nb missing.wav\n");
  vxa_mcadams_params p;
  vxa_mcadams_params_default(&p);
  char* json = nullptr;
  size_t failed = 0;
  REQUIRE(vxa_mcadams_anonymize_corpus((dir / "m.txt").c_str(), (dir / "out").c_str(), &p, 2,
                                       &json, &failed) == VXA_OK);
  CHECK(failed == 1);
  REQUIRE(json != nullptr);
  CHECK(std::string(json).find("\"processed\": 1") != std::string::npos);
  vxa_string_free(json);
}

TEST_CASE("scores and metrics") {
  const double tar[] = {2.0};
  const double imp[] = {-2.0};
  vxa_scores* s = nullptr;
  REQUIRE(vxa_scores_new(tar, 1, imp, 1, &s) == VXA_OK);
  double cllr = 0, cmin = 0, eer = -1, theta = 0, fa = 0, miss = 0;
  CHECK(vxa_cllr(s, &cllr) == VXA_OK);
  CHECK(std::abs(cllr - 0.183118412081596) <= 1e-12);
  CHECK(vxa_cllr_min(s, &cmin) == VXA_OK);
  CHECK(cmin == 0.0);
  CHECK(vxa_eer(s, &eer, &theta) == VXA_OK);
  CHECK(eer == 0.0);
  CHECK(vxa_error_rates(s, 0.0, &fa, &miss) == VXA_OK);
  CHECK(fa == 0.0);
  vxa_scores_free(s);

  vxa_scores* empty = nullptr;
  CHECK(vxa_scores_new(tar, 1, nullptr, 0, &empty) == VXA_ERR_CONTRACT);

  TempDir dir("capi");
  voxanon::testing::WriteFile(dir / "t", "A u1 target\nA u2 nontarget\nB u3 target\nB u4 nontarget\n");
  voxanon::testing::WriteFile(dir / "s", "A u1 1\nA u2 0\nB u3 0.5\nB u4 2\n");
  voxanon::testing::WriteFile(dir / "m", "A f\nB m\n");
  vxa_scores* f = nullptr;
  REQUIRE(vxa_scores_from_files((dir / "s").c_str(), (dir / "t").c_str(), (dir / "m").c_str(), "f",
                                &f) == VXA_OK);
  size_t nt = 0, ni = 0;
  vxa_scores_counts(f, &nt, &ni);
  CHECK(nt == 1);
  CHECK(ni == 1);
  vxa_scores_free(f);
  voxanon::testing::WriteFile(dir / "s2", "A u1 1\n");
  CHECK(vxa_scores_from_files((dir / "s2").c_str(), (dir / "t").c_str(), nullptr, nullptr, &f) ==
        VXA_ERR_RECONCILE);
}

TEST_CASE("WER, validation and results") {
  vxa_wer w;
  REQUIRE(vxa_wer_strings("a b c", "a x c d", &w) == VXA_OK);
  CHECK(w.n_sub == 1);
  CHECK(w.n_ins == 1);
  CHECK(std::abs(w.wer - 2.0 / 3.0) <= 1e-15);
  CHECK(vxa_wer_strings("", "a", &w) == VXA_ERR_CONTRACT);

  TempDir dir("capi");
  voxanon::testing::WriteFile(dir / "map", "u1 s1 enrollment p1\nu2 s2 enrollment p1\n");
  char* json = nullptr;
  size_t n = 0;
  REQUIRE(vxa_validate_mapping_file((dir / "map").c_str(), &json, &n) == VXA_OK);
  CHECK(n == 1);
  vxa_string_free(json);

  vxa_results* r = nullptr;
  REQUIRE(vxa_results_new(&r) == VXA_OK);
  REQUIRE(vxa_results_add_asv(r, "libri_dev", 'o', 'o', "f", 8.665, 0.304, 42.857, nullptr) == VXA_OK);
  CHECK(vxa_results_add_asv(r, "libri_dev", 'x', 'o', "f", 1, 1, 1, nullptr) == VXA_ERR_CONFIG);
  char* text = nullptr;
  REQUIRE(vxa_results_emit(r, "latex", &text) == VXA_OK);
  CHECK(std::string(text).find("1 & libri\\_dev & 8.665 & 0.304 & 42.857 & o & o & f") !=
        std::string::npos);
  vxa_string_free(text);
  CHECK(vxa_results_emit(r, "html", &text) == VXA_ERR_CONFIG);
  vxa_results_free(r);
}

TEST_CASE("pool anonymization through files") {
  TempDir dir("capi");
  std::string pool, emb;
  for (int i = 0; i < 30; ++i) {
    pool += "p" + std::to_string(i) + " ps" + std::to_string(i) + " " +
            std::to_string(std::cos(0.3 * i)) + " " + std::to_string(std::sin(0.3 * i)) + "\n";
  }
  emb = "u1 s1 1 0\nu2 s1 0.9 0.1\nu3 s2 0 1\n";
  voxanon::testing::WriteFile(dir / "pool", pool);
  voxanon::testing::WriteFile(dir / "emb", emb);
  vxa_pool_params p;
  vxa_pool_params_default(&p);
  CHECK(p.n_farthest == 200);
  REQUIRE(vxa_anon_embed_files((dir / "emb").c_str(), nullptr, (dir / "pool").c_str(), &p, "trial",
                               (dir / "out").c_str(), nullptr) == VXA_ERR_CONFIG);
  p.n_farthest = 10;
  p.n_subset = 5;
  char* audit = nullptr;
  REQUIRE(vxa_anon_embed_files((dir / "emb").c_str(), nullptr, (dir / "pool").c_str(), &p, "trial",
                               (dir / "out").c_str(), &audit) == VXA_OK);
  CHECK(std::string(audit).find("\"tag\": \"trial\"") != std::string::npos);
  vxa_string_free(audit);
  const std::string first = voxanon::testing::ReadFile(dir / "out");
  REQUIRE(vxa_anon_embed_files((dir / "emb").c_str(), nullptr, (dir / "pool").c_str(), &p, "trial",
                               (dir / "out").c_str(), nullptr) == VXA_OK);
  CHECK(voxanon::testing::ReadFile(dir / "out") == first);
  CHECK(vxa_anon_embed_files((dir / "emb").c_str(), nullptr, (dir / "pool").c_str(), &p, "test",
                             (dir / "out").c_str(), nullptr) == VXA_ERR_CONFIG);
  double d = 0;
  const double a[] = {1, 0}, b[] = {0, 1};
  CHECK(vxa_cosine_distance(a, b, 2, &d) == VXA_OK);
  CHECK(d == 1.0);
}
