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

// Mono 16-bit PCM WAV I/O and the framing / overlap-add machinery used by
// the frame-based anonymizer.

#ifndef VOXANON_AUDIO_HPP_
#define VOXANON_AUDIO_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace voxanon::audio {

struct AudioBuffer {
  std::vector<double> samples;  // nominally in [-1, 1]
  int32_t sample_rate = 16000;
};

enum class Window { kRectangular, kHann };

const char* WindowName(Window window);
// Accepts "rectangular" / "rect" and "hann"; throws kConfig otherwise.
Window ParseWindow(const std::string& name);

using Frame = std::vector<double>;

struct FramePlan {
  std::size_t frame_len = 320;
  std::size_t hop = 160;
  Window window = Window::kHann;

  // Frame geometry in milliseconds at a given rate; lengths are rounded to
  // the nearest sample.
  static FramePlan FromMilliseconds(double frame_ms, double hop_ms,
                                    int32_t sample_rate, Window window);

  // Throws kContract unless 0 < hop <= frame_len.
  void Validate() const;

  // ceil((len - frame_len) / hop) + 1, and 1 for len <= frame_len.
  std::size_t NumFrames(std::size_t signal_len) const;
};

// Periodic window of length n (the Hann variant sums to a constant at 50%
// overlap).
std::vector<double> MakeWindow(Window window, std::size_t n);

// Reads a RIFF/WAVE file holding mono 16-bit PCM. Samples are scaled by
// 1/32768. Unsupported encodings raise kFormat naming the header field;
// short reads raise kIo.
AudioBuffer ReadWav(const std::string& path);

// Writes mono 16-bit PCM. Samples outside [-1, 1] are clipped; the number of
// clipped samples is returned.
std::size_t WriteWav(const AudioBuffer& buffer, const std::string& path);

// Quantization used by WriteWav, exposed for tests.
int16_t QuantizeSample(double value, bool* clipped = nullptr);

// Frame i covers samples [i*hop, i*hop + frame_len), zero-padded past the end,
// with the analysis window applied.
std::vector<Frame> FrameSignal(std::span<const double> signal,
                               const FramePlan& plan);

// Weighted overlap-add: out[n] = sum_i w[n-i*hop] f_i[n-i*hop] /
// sum_i w[n-i*hop]^2, and 0 where that envelope is below 1e-8. The result is
// truncated (or zero-extended) to `length` samples.
std::vector<double> OverlapAdd(const std::vector<Frame>& frames,
                               const FramePlan& plan, std::size_t length);

}  // namespace voxanon::audio

#endif  // VOXANON_AUDIO_HPP_
