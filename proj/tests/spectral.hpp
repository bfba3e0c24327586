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

// Spectral peak tracking for the formant-shift checks: a Welch power
// spectrum on a 512-point DFT grid, computed with a direct DFT.

#ifndef VOXANON_TESTS_SPECTRAL_HPP_
#define VOXANON_TESTS_SPECTRAL_HPP_

#include <cmath>
#include <cstddef>
#include <vector>

namespace voxanon::testing {

inline constexpr std::size_t kDftSize = 512;

// Power per bin 0..kDftSize/2, averaged over Hann-windowed segments with
// 50% overlap.
inline std::vector<double> WelchSpectrum(const std::vector<double>& x) {
  const std::size_t n = kDftSize;
  std::vector<double> win(n), cosv(n), sinv(n);
  for (std::size_t i = 0; i < n; ++i) {
    win[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / n);
    cosv[i] = std::cos(2.0 * M_PI * i / n);
    sinv[i] = std::sin(2.0 * M_PI * i / n);
  }
  std::vector<double> power(n / 2 + 1, 0.0);
  std::size_t segments = 0;
  std::vector<double> seg(n);
  for (std::size_t start = 0; start + n <= x.size(); start += n / 2) {
    for (std::size_t i = 0; i < n; ++i) seg[i] = x[start + i] * win[i];
    for (std::size_t k = 0; k <= n / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = (k * i) % n;
        re += seg[i] * cosv[idx];
        im -= seg[i] * sinv[idx];
      }
      power[k] += re * re + im * im;
    }
    ++segments;
  }
  for (double& p : power) p /= static_cast<double>(segments);
  return power;
}

// Bin of the largest value in [lo_hz, hi_hz].
inline std::size_t PeakBin(const std::vector<double>& power, double rate,
                           double lo_hz, double hi_hz) {
  const double hz_per_bin = rate / static_cast<double>(kDftSize);
  std::size_t best = 0;
  double best_v = -1.0;
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double f = static_cast<double>(k) * hz_per_bin;
    if (f < lo_hz || f > hi_hz) continue;
    if (power[k] > best_v) {
      best_v = power[k];
      best = k;
    }
  }
  return best;
}

}  // namespace voxanon::testing

#endif  // VOXANON_TESTS_SPECTRAL_HPP_
