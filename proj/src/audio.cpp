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

#include "voxanon/audio.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

#include "voxanon/error.hpp"

namespace voxanon::audio {

namespace {

constexpr double kPcmScale = 32768.0;
constexpr double kEnvelopeFloor = 1e-8;

uint32_t ReadLe32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadLe16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutLe32(std::vector<unsigned char>* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back((v >> (8 * i)) & 0xff);
}

void PutLe16(std::vector<unsigned char>* out, uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

}  // namespace

const char* WindowName(Window window) {
  return window == Window::kHann ? "hann" : "rectangular";
}

Window ParseWindow(const std::string& name) {
  if (name == "hann") return Window::kHann;
  if (name == "rectangular" || name == "rect") return Window::kRectangular;
  Fail(ErrorKind::kConfig, "unknown window '" + name +
                               "' (expected hann or rectangular)");
}

FramePlan FramePlan::FromMilliseconds(double frame_ms, double hop_ms,
                                      int32_t sample_rate, Window window) {
  if (!(frame_ms > 0) || !(hop_ms > 0) || sample_rate <= 0) {
    Fail(ErrorKind::kConfig, "frame and hop durations and sample rate must "
                             "be positive");
  }
  FramePlan plan;
  plan.frame_len = static_cast<std::size_t>(
      std::lround(frame_ms * 1e-3 * sample_rate));
  plan.hop =
      static_cast<std::size_t>(std::lround(hop_ms * 1e-3 * sample_rate));
  plan.window = window;
  plan.Validate();
  return plan;
}

void FramePlan::Validate() const {
  if (hop == 0 || frame_len == 0 || hop > frame_len) {
    Fail(ErrorKind::kContract,
         "invalid frame plan: frame_len=" + std::to_string(frame_len) +
             " hop=" + std::to_string(hop) +
             " (need 0 < hop <= frame_len)");
  }
}

std::size_t FramePlan::NumFrames(std::size_t signal_len) const {
  if (signal_len <= frame_len) return 1;
  return (signal_len - frame_len + hop - 1) / hop + 1;
}

std::vector<double> MakeWindow(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::kHann) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi *
                                  static_cast<double>(i) /
                                  static_cast<double>(n));
    }
  }
  return w;
}

AudioBuffer ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "read error on " + path);

  if (bytes.size() < 12) Fail(ErrorKind::kIo, path + ": truncated header");
  if (std::string(bytes.begin(), bytes.begin() + 4) != "RIFF" ||
      std::string(bytes.begin() + 8, bytes.begin() + 12) != "WAVE") {
    Fail(ErrorKind::kFormat, path + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  AudioBuffer buffer;
  std::size_t pos = 12;
  while (true) {
    if (pos + 8 > bytes.size()) {
      Fail(have_fmt ? ErrorKind::kIo : ErrorKind::kFormat,
           path + ": no data chunk");
    }
    const std::string id(bytes.begin() + pos, bytes.begin() + pos + 4);
    const std::size_t size = ReadLe32(&bytes[pos + 4]);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      Fail(ErrorKind::kIo, path + ": truncated '" + id + "' chunk (declares " +
                               std::to_string(size) + " bytes, " +
                               std::to_string(bytes.size() - body) +
                               " present)");
    }
    if (id == "fmt ") {
      if (size < 16) Fail(ErrorKind::kFormat, path + ": fmt chunk too short");
      const uint16_t format = ReadLe16(&bytes[body]);
      const uint16_t channels = ReadLe16(&bytes[body + 2]);
      const uint32_t rate = ReadLe32(&bytes[body + 4]);
      const uint16_t bits = ReadLe16(&bytes[body + 14]);
      if (format != 1) {
        Fail(ErrorKind::kFormat, path + ": audio_format=" +
                                     std::to_string(format) +
                                     " unsupported (need 1, integer PCM)");
      }
      if (channels != 1) {
        Fail(ErrorKind::kFormat, path + ": num_channels=" +
                                     std::to_string(channels) +
                                     " unsupported (need mono)");
      }
      if (bits != 16) {
        Fail(ErrorKind::kFormat, path + ": bits_per_sample=" +
                                     std::to_string(bits) +
                                     " unsupported (need 16)");
      }
      if (rate == 0 || rate > 0x7fffffffu) {
        Fail(ErrorKind::kFormat,
             path + ": sample_rate=" + std::to_string(rate) + " invalid");
      }
      buffer.sample_rate = static_cast<int32_t>(rate);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) {
        Fail(ErrorKind::kFormat, path + ": data chunk precedes fmt chunk");
      }
      if (size % 2 != 0) {
        Fail(ErrorKind::kFormat, path + ": data chunk size " +
                                     std::to_string(size) +
                                     " is not a whole number of samples");
      }
      buffer.samples.resize(size / 2);
      for (std::size_t i = 0; i < buffer.samples.size(); ++i) {
        const auto raw = static_cast<int16_t>(ReadLe16(&bytes[body + 2 * i]));
        buffer.samples[i] = raw / kPcmScale;
      }
      return buffer;
    }
    pos = body + size + (size & 1);
  }
}

int16_t QuantizeSample(double value, bool* clipped) {
  bool clip = !(value >= -1.0 && value <= 1.0);
  if (std::isnan(value)) value = 0.0;
  const double scaled = std::nearbyint(std::clamp(value, -1.0, 1.0) * kPcmScale);
  if (clipped != nullptr) *clipped = clip;
  return static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::size_t WriteWav(const AudioBuffer& buffer, const std::string& path) {
  if (buffer.sample_rate <= 0) {
    Fail(ErrorKind::kContract, "sample_rate must be positive");
  }
  const auto data_bytes = static_cast<uint32_t>(buffer.samples.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  for (char c : std::string("RIFF")) out.push_back(c);
  PutLe32(&out, 36 + data_bytes);
  for (char c : std::string("WAVEfmt ")) out.push_back(c);
  PutLe32(&out, 16);
  PutLe16(&out, 1);  // PCM
  PutLe16(&out, 1);  // mono
  PutLe32(&out, static_cast<uint32_t>(buffer.sample_rate));
  PutLe32(&out, static_cast<uint32_t>(buffer.sample_rate) * 2);
  PutLe16(&out, 2);
  PutLe16(&out, 16);
  for (char c : std::string("data")) out.push_back(c);
  PutLe32(&out, data_bytes);

  std::size_t clipped = 0;
  for (double s : buffer.samples) {
    bool clip = false;
    const int16_t q = QuantizeSample(s, &clip);
    clipped += clip;
    PutLe16(&out, static_cast<uint16_t>(q));
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) Fail(ErrorKind::kIo, "cannot open " + path + " for writing");
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) Fail(ErrorKind::kIo, "write error on " + path);
  return clipped;
}

std::vector<Frame> FrameSignal(std::span<const double> signal,
                               const FramePlan& plan) {
  plan.Validate();
  const std::vector<double> window = MakeWindow(plan.window, plan.frame_len);
  const std::size_t n_frames = plan.NumFrames(signal.size());
  std::vector<Frame> frames(n_frames, Frame(plan.frame_len, 0.0));
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::size_t start = i * plan.hop;
    for (std::size_t k = 0; k < plan.frame_len && start + k < signal.size();
         ++k) {
      frames[i][k] = signal[start + k] * window[k];
    }
  }
  return frames;
}

std::vector<double> OverlapAdd(const std::vector<Frame>& frames,
                               const FramePlan& plan, std::size_t length) {
  plan.Validate();
  const std::vector<double> window = MakeWindow(plan.window, plan.frame_len);
  const std::size_t span_len =
      frames.empty() ? 0 : (frames.size() - 1) * plan.hop + plan.frame_len;
  std::vector<double> acc(std::max(span_len, length), 0.0);
  std::vector<double> envelope(acc.size(), 0.0);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].size() != plan.frame_len) {
      Fail(ErrorKind::kContract,
           "frame " + std::to_string(i) + " has length " +
               std::to_string(frames[i].size()) + ", expected " +
               std::to_string(plan.frame_len));
    }
    const std::size_t start = i * plan.hop;
    for (std::size_t k = 0; k < plan.frame_len; ++k) {
      acc[start + k] += window[k] * frames[i][k];
      envelope[start + k] += window[k] * window[k];
    }
  }
  for (std::size_t n = 0; n < acc.size(); ++n) {
    acc[n] = envelope[n] < kEnvelopeFloor ? 0.0 : acc[n] / envelope[n];
  }
  acc.resize(length);
  return acc;
}

}  // namespace voxanon::audio
