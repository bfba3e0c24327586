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

#include <cmath>
#include <complex>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "spectral.hpp"
#include "test_util.hpp"
#include "voxanon/audio.hpp"
#include "voxanon/mcadams.hpp"

using namespace voxanon;
using namespace voxanon::mcadams;
using Complex = std::complex<double>;
using voxanon::testing::TempDir;
using voxanon::testing::ThrowsKind;

TEST_CASE("angle shift") {
  // 0.5^1.1 evaluated with mpmath at 50 digits.
  CHECK(std::abs(ShiftAngle(0.5, 1.1) - 0.466516495768404) <= 1e-12);
  CHECK(ShiftAngle(0.5, 1.1) < 0.5);
  for (double a : {0.5, 0.8, 0.9, 1.1, 1.25, 2.0}) CHECK(ShiftAngle(1.0, a) == 1.0);
  CHECK(ShiftAngle(2.0, 0.8) < 2.0);
  CHECK(ShiftAngle(2.0, 1.1) > 2.0);
  CHECK(ShiftAngle(0.3, 0.8) > 0.3);

  bool clamped = false;
  const double hi = ShiftAngle(3.0, 1.5, &clamped);
  CHECK(clamped);
  CHECK(hi == std::numbers::pi - kAngleMargin);
  // Angles already inside the margin are never pushed against the shift.
  const double tiny = ShiftAngle(1e-6, 1.1, &clamped);
  CHECK(tiny <= 1e-6);
  CHECK(ShiftAngle(1e-6, 0.9, &clamped) > 1e-6);
}

TEST_CASE("pole transform") {
  const Complex z1 = std::polar(0.9, 0.5);
  const Complex z2 = std::polar(0.7, 2.0);
  const lpc::PoleSet poles({0.8, -0.3}, {z1, z2});

  const lpc::PoleSet same = TransformPoles(poles, 1.0);
  CHECK(same.real() == poles.real());
  CHECK(same.upper() == poles.upper());

  AnonymizeStats stats;
  const lpc::PoleSet moved = TransformPoles(poles, 0.9, 0.998, &stats);
  CHECK(moved.real() == poles.real());
  REQUIRE(moved.upper().size() == 2);
  CHECK(std::abs(std::abs(moved.upper()[0]) - 0.9) <= 1e-15);
  CHECK(std::abs(std::arg(moved.upper()[0]) - std::pow(0.5, 0.9)) <= 1e-15);
  CHECK(std::abs(std::arg(moved.upper()[1]) - std::pow(2.0, 0.9)) <= 1e-15);
  CHECK(stats.clamp_events == 0);

  const lpc::PoleSet wide({0.9995}, {std::polar(0.9999, 1.0)});
  AnonymizeStats s2;
  const lpc::PoleSet clamped = TransformPoles(wide, 1.0, 0.998, &s2);
  CHECK(s2.clamp_events == 2);
  CHECK(clamped.real()[0] == 0.998);
  CHECK(std::abs(std::abs(clamped.upper()[0]) - 0.998) <= 1e-15);
  CHECK(std::abs(std::arg(clamped.upper()[0]) - 1.0) <= 1e-15);
}

TEST_CASE("frame at alpha 1 is reproduced") {
  const std::vector<double> x = testing::ResonantNoise(320, 16000, {700, 1500}, 0.95, 2);
  McAdamsParams p;
  p.alpha = 1.0;
  const audio::Frame y = AnonymizeFrame(x, p);
  REQUIRE(y.size() == x.size());
  double err = 0.0, sig = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    err += (y[i] - x[i]) * (y[i] - x[i]);
    sig += x[i] * x[i];
  }
  CHECK(std::sqrt(err / sig) <= 1e-6);

  AnonymizeStats stats;
  const std::vector<double> silent(320, 0.0);
  CHECK(AnonymizeFrame(silent, p, &stats) == silent);
  CHECK(stats.degenerate_frames == 1);
}

TEST_CASE("two-formant signal shifts up at alpha 0.8") {
  const double rate = 16000.0;
  audio::AudioBuffer in;
  in.samples = testing::ResonantNoise(64000, rate, {800, 1800}, 0.97, 9);
  McAdamsParams p;
  p.alpha = 0.8;
  const audio::AudioBuffer out = AnonymizeBuffer(in, p);
  const std::vector<double> before = testing::WelchSpectrum(in.samples);
  const std::vector<double> after = testing::WelchSpectrum(out.samples);
  CHECK(testing::PeakBin(after, rate, 500, 1300) > testing::PeakBin(before, rate, 500, 1300));
  CHECK(testing::PeakBin(after, rate, 1300, 2400) > testing::PeakBin(before, rate, 1300, 2400));
}

TEST_CASE("buffer anonymization") {
  McAdamsParams p;
  p.alpha = 1.0;
  audio::AudioBuffer in;
  in.samples = testing::ResonantNoise(16000, 16000, {600, 2200}, 0.95, 3);
  CHECK(testing::SnrDb(in.samples, AnonymizeBuffer(in, p).samples) >= 60.0);

  // Pre-emphasis and the rectangular path are inverted exactly as well.
  McAdamsParams pe = p;
  pe.preemphasis = 0.97;
  CHECK(testing::SnrDb(in.samples, AnonymizeBuffer(in, pe).samples) >= 60.0);
  McAdamsParams rect = p;
  rect.window = audio::Window::kRectangular;
  rect.hop_ms = rect.frame_ms;
  CHECK(testing::SnrDb(in.samples, AnonymizeBuffer(in, rect).samples) >= 60.0);

  audio::AudioBuffer zeros;
  zeros.samples.assign(3000, 0.0);
  AnonymizeStats stats;
  const audio::AudioBuffer z = AnonymizeBuffer(zeros, McAdamsParams{}, &stats);
  CHECK(z.samples == zeros.samples);
  CHECK(stats.degenerate_frames == stats.frames);

  CHECK(AnonymizeBuffer(audio::AudioBuffer{}, McAdamsParams{}).samples.empty());

  audio::AudioBuffer shorty;
  shorty.samples = {0.1, -0.2, 0.3};
  CHECK(AnonymizeBuffer(shorty, McAdamsParams{}).samples.size() == 3);

  const audio::AudioBuffer a = AnonymizeBuffer(in, McAdamsParams{});
  const audio::AudioBuffer b = AnonymizeBuffer(in, McAdamsParams{});
  CHECK(a.samples == b.samples);
  CHECK(a.samples.size() == in.samples.size());
}

TEST_CASE("parameter validation") {
  const auto bad = [](auto mutate) {
    McAdamsParams p;
    mutate(p);
    return ThrowsKind([&] { p.Validate(); }, ErrorKind::kConfig);
  };
  CHECK(bad([](McAdamsParams& p) { p.alpha = 0.0; }));
  CHECK(bad([](McAdamsParams& p) { p.alpha = NAN; }));
  CHECK(bad([](McAdamsParams& p) { p.stability_clamp = 1.0; }));
  CHECK(bad([](McAdamsParams& p) { p.lpc_order = 0; }));
  CHECK(bad([](McAdamsParams& p) { p.preemphasis = 1.0; }));
  CHECK(bad([](McAdamsParams& p) { p.hop_ms = 30.0; }));
  CHECK_NOTHROW(McAdamsParams{}.Validate());
}

TEST_CASE("corpus processing") {
  TempDir dir("corpus");
  std::string manifest;
  for (int i = 0; i < 3; ++i) {
    audio::AudioBuffer b;
    b.samples = testing::ResonantNoise(8000, 16000, {700, 1900}, 0.95, 40 + i, 0.3);
    const std::string name = "utt" + std::to_string(i) + ".wav";
    audio::WriteWav(b, dir / name);
    manifest += "utt" + std::to_string(i) + " " + name + "\n";
  }
  testing::WriteFile(dir / "m.txt", "# three files\n" + manifest);

  const CorpusReport r = AnonymizeCorpus(dir / "m.txt", McAdamsParams{}, dir / "out", 2);
  CHECK(r.processed == 3);
  CHECK(r.failed == 0);
  for (int i = 0; i < 3; ++i) {
    const std::string out = dir / ("out/utt" + std::to_string(i) + ".wav");
    REQUIRE(std::filesystem::exists(out));
    CHECK(audio::ReadWav(out).samples.size() == 8000);
  }
  const std::string first = testing::ReadFile(dir / "out/utt1.wav");
  AnonymizeCorpus(dir / "m.txt", McAdamsParams{}, dir / "out", 1);
  CHECK(testing::ReadFile(dir / "out/utt1.wav") == first);

  testing::WriteFile(dir / "bad.wav", "garbage");
  testing::WriteFile(dir / "m2.txt", manifest + "broken bad.wav\n");
  const CorpusReport r2 = AnonymizeCorpus(dir / "m2.txt", McAdamsParams{}, dir / "out2");
  CHECK(r2.processed == 3);
  CHECK(r2.failed == 1);
  CHECK_FALSE(r2.files[3].ok);
  CHECK_FALSE(r2.files[3].error.empty());
  CHECK(r2.ToJson().find("\"failed\": 1") != std::string::npos);

  testing::WriteFile(dir / "m3.txt", "a utt0.wav\nb utt0.wav\n");
  const CorpusReport r3 = AnonymizeCorpus(dir / "m3.txt", McAdamsParams{}, dir / "out3");
  CHECK(r3.failed == 1);

  testing::WriteFile(dir / "m4.txt", "only-one-field\n");
  CHECK(ThrowsKind([&] { AnonymizeCorpus(dir / "m4.txt", McAdamsParams{}, dir / "o4"); },
                   ErrorKind::kParse));
  CHECK(ThrowsKind([&] { AnonymizeCorpus(dir / "none.txt", McAdamsParams{}, dir / "o5"); },
                   ErrorKind::kIo));
}
