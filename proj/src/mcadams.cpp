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

#include "voxanon/mcadams.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <thread>

#include "json.hpp"
#include "text_util.hpp"
#include "voxanon/error.hpp"

namespace voxanon::mcadams {

namespace fs = std::filesystem;
using Complex = std::complex<double>;

void McAdamsParams::Validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    Fail(ErrorKind::kConfig, "alpha must be a positive finite number");
  }
  if (!(stability_clamp > 0.0 && stability_clamp < 1.0)) {
    Fail(ErrorKind::kConfig, "stability clamp must lie in (0, 1)");
  }
  if (lpc_order == 0) Fail(ErrorKind::kConfig, "LPC order must be positive");
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) {
    Fail(ErrorKind::kConfig, "pre-emphasis must lie in [0, 1)");
  }
  if (!(frame_ms > 0.0) || !(hop_ms > 0.0) || hop_ms > frame_ms) {
    Fail(ErrorKind::kConfig, "need 0 < hop-ms <= frame-ms");
  }
}

AnonymizeStats& AnonymizeStats::operator+=(const AnonymizeStats& other) {
  frames += other.frames;
  degenerate_frames += other.degenerate_frames;
  clamp_events += other.clamp_events;
  angle_clamps += other.angle_clamps;
  return *this;
}

double ShiftAngle(double phi, double alpha, bool* clamped) {
  const double shifted = std::pow(phi, alpha);
  const double lo = std::min(phi, kAngleMargin);
  const double hi = std::max(phi, std::numbers::pi - kAngleMargin);
  const double out = std::clamp(shifted, lo, hi);
  if (clamped != nullptr) *clamped = out != shifted;
  return out;
}

lpc::PoleSet TransformPoles(const lpc::PoleSet& poles, double alpha,
                            double stability_clamp, AnonymizeStats* stats) {
  std::size_t clamps = 0, angle_clamps = 0;
  std::vector<double> real = poles.real();
  for (double& r : real) {
    if (std::abs(r) > stability_clamp) {
      r = std::copysign(stability_clamp, r);
      ++clamps;
    }
  }
  std::vector<Complex> upper;
  upper.reserve(poles.upper().size());
  for (const Complex& z : poles.upper()) {
    const double phi = std::arg(z);
    double radius = std::abs(z);
    bool angle_clamped = false;
    const double new_phi = ShiftAngle(phi, alpha, &angle_clamped);
    angle_clamps += angle_clamped;
    if (radius > stability_clamp) {
      radius = stability_clamp;
      ++clamps;
    } else if (new_phi == phi) {
      upper.push_back(z);
      continue;
    }
    upper.push_back(std::polar(radius, new_phi));
  }
  if (stats != nullptr) {
    stats->clamp_events += clamps;
    stats->angle_clamps += angle_clamps;
  }
  return lpc::PoleSet(std::move(real), std::move(upper));
}

audio::Frame AnonymizeFrame(std::span<const double> frame,
                            const McAdamsParams& params,
                            AnonymizeStats* stats,
                            const FilterHistory* history) {
  AnonymizeStats local;
  local.frames = 1;
  const lpc::LpcModel model = lpc::Analyze(frame, params.lpc_order);
  audio::Frame out;
  if (model.degenerate) {
    local.degenerate_frames = 1;
    out.assign(frame.begin(), frame.end());
  } else {
    std::span<const double> in_hist, out_hist;
    if (history != nullptr) {
      in_hist = history->input;
      out_hist = history->output;
    }
    const std::vector<double> residual =
        lpc::InverseFilter(frame, model, in_hist);
    const lpc::PoleSet shifted = TransformPoles(
        lpc::FindPoles(model), params.alpha, params.stability_clamp, &local);
    out = lpc::SynthesisFilter(residual, lpc::PolesToCoeffs(shifted),
                               out_hist);
  }
  if (stats != nullptr) *stats += local;
  return out;
}

audio::AudioBuffer AnonymizeBuffer(const audio::AudioBuffer& buffer,
                                   const McAdamsParams& params,
                                   AnonymizeStats* stats) {
  params.Validate();
  const audio::FramePlan plan = audio::FramePlan::FromMilliseconds(
      params.frame_ms, params.hop_ms, buffer.sample_rate, params.window);
  const std::size_t n = buffer.samples.size();
  audio::AudioBuffer result;
  result.sample_rate = buffer.sample_rate;
  if (n == 0) return result;

  // Pad both ends so every input sample sees the full overlap envelope.
  const std::size_t pad = plan.frame_len - plan.hop;
  std::vector<double> padded(n + 2 * pad, 0.0);
  const double mu = params.preemphasis;
  for (std::size_t i = 0; i < n; ++i) {
    padded[pad + i] =
        buffer.samples[i] - (i > 0 ? mu * buffer.samples[i - 1] : 0.0);
  }

  const std::vector<audio::Frame> frames = audio::FrameSignal(padded, plan);
  const bool carry_state = plan.window == audio::Window::kRectangular &&
                           plan.hop == plan.frame_len;
  std::vector<audio::Frame> processed(frames.size());
  FilterHistory history;
  AnonymizeStats local;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    try {
      processed[i] = AnonymizeFrame(frames[i], params, &local,
                                    carry_state ? &history : nullptr);
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + std::to_string(i) + ": " + e.what());
    }
    if (carry_state) {
      history.input = frames[i];
      history.output = processed[i];
    }
  }

  std::vector<double> y = audio::OverlapAdd(processed, plan, padded.size());
  result.samples.assign(y.begin() + static_cast<std::ptrdiff_t>(pad),
                        y.begin() + static_cast<std::ptrdiff_t>(pad + n));
  if (mu > 0.0) {
    for (std::size_t i = 1; i < n; ++i) {
      result.samples[i] += mu * result.samples[i - 1];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(result.samples[i])) {
      Fail(ErrorKind::kNumerical,
           "non-finite output sample at index " + std::to_string(i));
    }
  }
  if (stats != nullptr) *stats += local;
  return result;
}

std::vector<ManifestEntry> ReadManifest(const std::string& path) {
  const fs::path base = fs::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  for (const text::Line& line : text::ReadRecords(path)) {
    if (line.fields.size() != 2) {
      text::ParseFail(path, line.number,
                      "expected '<utterance-id> <wav-path>', got " +
                          std::to_string(line.fields.size()) + " fields");
    }
    fs::path wav(line.fields[1]);
    if (wav.is_relative()) wav = base / wav;
    entries.push_back({line.fields[0], wav.string()});
  }
  return entries;
}

std::string CorpusReport::ToJson() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["params"] = {
      {"alpha", params.alpha},
      {"lpc_order", params.lpc_order},
      {"frame_ms", params.frame_ms},
      {"hop_ms", params.hop_ms},
      {"window", audio::WindowName(params.window)},
      {"stability_clamp", params.stability_clamp},
      {"preemphasis", params.preemphasis},
      {"rng_seed", params.rng_seed},
  };
  j["processed"] = processed;
  j["failed"] = failed;
  j["clipped"] = clipped;
  ordered_json list = ordered_json::array();
  for (const FileOutcome& f : files) {
    ordered_json item;
    item["utterance_id"] = f.utterance_id;
    item["input"] = f.input;
    item["output"] = f.output;
    item["status"] = f.ok ? "ok" : "failed";
    if (!f.ok) item["error"] = f.error;
    item["clipped"] = f.clipped;
    item["frames"] = f.stats.frames;
    item["degenerate_frames"] = f.stats.degenerate_frames;
    item["clamp_events"] = f.stats.clamp_events;
    item["angle_clamps"] = f.stats.angle_clamps;
    list.push_back(std::move(item));
  }
  j["files"] = std::move(list);
  return j.dump(2);
}

CorpusReport AnonymizeCorpus(const std::string& manifest_path,
                             const McAdamsParams& params,
                             const std::string& out_dir, int jobs) {
  params.Validate();
  const std::vector<ManifestEntry> entries = ReadManifest(manifest_path);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    Fail(ErrorKind::kIo, "cannot create output directory " + out_dir);
  }

  CorpusReport report;
  report.params = params;
  report.files.resize(entries.size());

  // Output names must be unique; later duplicates fail without running.
  std::map<std::string, std::size_t> first_owner;
  std::vector<bool> collides(entries.size(), false);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    FileOutcome& f = report.files[i];
    f.utterance_id = entries[i].utterance_id;
    f.input = entries[i].path;
    const std::string name = fs::path(entries[i].path).filename().string();
    f.output = (fs::path(out_dir) / name).string();
    auto [it, inserted] = first_owner.emplace(f.output, i);
    if (!inserted) {
      collides[i] = true;
      f.error = "output name " + name + " collides with utterance " +
                entries[it->second].utterance_id;
    }
  }

  const auto process = [&](std::size_t i) {
    FileOutcome& f = report.files[i];
    if (collides[i]) return;
    try {
      const audio::AudioBuffer in = audio::ReadWav(f.input);
      const audio::AudioBuffer out = AnonymizeBuffer(in, params, &f.stats);
      f.clipped = audio::WriteWav(out, f.output);
      f.ok = true;
    } catch (const std::exception& e) {
      f.error = e.what();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(jobs, 1)), 1,
      std::max<std::size_t>(entries.size(), 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) process(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  for (const FileOutcome& f : report.files) {
    if (f.ok) {
      ++report.processed;
      report.clipped += f.clipped;
    } else {
      ++report.failed;
    }
  }
  return report;
}

}  // namespace voxanon::mcadams
