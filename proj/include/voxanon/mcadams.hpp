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

// McAdams-coefficient anonymization: LPC pole angles phi in (0, pi) are
// mapped to phi^alpha, which contracts (alpha > 1) or expands (alpha < 1) the
// formant structure around phi = 1 rad.

#ifndef VOXANON_MCADAMS_HPP_
#define VOXANON_MCADAMS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "voxanon/audio.hpp"
#include "voxanon/lpc.hpp"

namespace voxanon::mcadams {

// Shifted angles are kept this far away from 0 and pi.
inline constexpr double kAngleMargin = 1e-4;

struct McAdamsParams {
  double alpha = 0.8;
  std::size_t lpc_order = 20;
  double frame_ms = 20.0;
  double hop_ms = 10.0;
  audio::Window window = audio::Window::kHann;
  double stability_clamp = 0.998;
  double preemphasis = 0.0;  // 0 disables; 0.97 is the usual value
  uint64_t rng_seed = 0;     // reserved, unused by the deterministic path

  // Throws kConfig on alpha <= 0, clamp outside (0, 1), order 0 or
  // pre-emphasis outside [0, 1).
  void Validate() const;
};

struct AnonymizeStats {
  std::size_t frames = 0;
  std::size_t degenerate_frames = 0;
  std::size_t clamp_events = 0;  // poles pulled in to the stability clamp
  std::size_t angle_clamps = 0;  // phi^alpha pulled back inside (0, pi)

  AnonymizeStats& operator+=(const AnonymizeStats& other);
};

// phi^alpha for phi in (0, pi), kept inside [min(phi, margin),
// max(phi, pi - margin)] so the shift never changes sign.
double ShiftAngle(double phi, double alpha, bool* clamped = nullptr);

// Real poles keep their position; each conjugate pair gets angle
// ShiftAngle(phi, alpha) at the same modulus. Any pole with modulus above
// `stability_clamp` is scaled back onto it.
lpc::PoleSet TransformPoles(const lpc::PoleSet& poles, double alpha,
                            double stability_clamp = 0.998,
                            AnonymizeStats* stats = nullptr);

// Filter memory carried between contiguous frames.
struct FilterHistory {
  std::vector<double> input;
  std::vector<double> output;
};

// LPC analysis -> residual -> poles -> TransformPoles -> coefficients ->
// resynthesis from the retained residual. Silent frames come back unchanged.
audio::Frame AnonymizeFrame(std::span<const double> frame,
                            const McAdamsParams& params,
                            AnonymizeStats* stats = nullptr,
                            const FilterHistory* history = nullptr);

// Frames the buffer, anonymizes every frame, and overlap-adds the result.
// Output length and sample rate equal the input's.
audio::AudioBuffer AnonymizeBuffer(const audio::AudioBuffer& buffer,
                                   const McAdamsParams& params,
                                   AnonymizeStats* stats = nullptr);

struct ManifestEntry {
  std::string utterance_id;
  std::string path;
};

// `<utterance-id> <wav-path>` lines; relative paths resolve against the
// manifest's directory.
std::vector<ManifestEntry> ReadManifest(const std::string& path);

struct FileOutcome {
  std::string utterance_id;
  std::string input;
  std::string output;
  bool ok = false;
  std::string error;
  std::size_t clipped = 0;
  AnonymizeStats stats;
};

struct CorpusReport {
  McAdamsParams params;
  std::vector<FileOutcome> files;
  std::size_t processed = 0;
  std::size_t failed = 0;
  std::size_t clipped = 0;

  std::string ToJson() const;
};

// One output WAV per manifest entry, written to out_dir under the input's
// file name. Per-file failures are recorded and the batch continues. Files
// are processed on `jobs` threads; the report is independent of scheduling.
CorpusReport AnonymizeCorpus(const std::string& manifest_path,
                             const McAdamsParams& params,
                             const std::string& out_dir, int jobs = 1);

}  // namespace voxanon::mcadams

#endif  // VOXANON_MCADAMS_HPP_
