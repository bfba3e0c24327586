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

// Linear prediction numerics. Models use the prediction convention
//   A(z) = 1 - sum_{k=1..p} a_k z^-k,   x[n] ~ sum_k a_k x[n-k],
// so the poles are the roots of z^p - a_1 z^(p-1) - ... - a_p.

#ifndef VOXANON_LPC_HPP_
#define VOXANON_LPC_HPP_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace voxanon::lpc {

// Frames whose zero-lag autocorrelation is below this are treated as silent.
inline constexpr double kSilenceThreshold = 1e-12;

struct LpcModel {
  std::vector<double> coeffs;      // a_1 .. a_p
  std::vector<double> reflection;  // k_1 .. k_p, when produced by recursion
  double gain = 0.0;               // residual RMS of the analysed frame
  bool degenerate = false;         // silent frame; callers pass it through

  std::size_t order() const { return coeffs.size(); }
};

// Conjugate-closed multiset of poles. Complex poles are stored once, as the
// representative with positive imaginary part; the partner is implied.
class PoleSet {
 public:
  using Complex = std::complex<double>;

  PoleSet() = default;
  PoleSet(std::vector<double> real, std::vector<Complex> upper);

  // Pairs an arbitrary root multiset into conjugates. Roots with
  // |imag| <= tol * max(1, |z|) count as real. Throws kContract when a complex
  // root has no partner within tol.
  static PoleSet FromRoots(std::span<const Complex> roots, double tol = 1e-8);

  const std::vector<double>& real() const { return real_; }
  const std::vector<Complex>& upper() const { return upper_; }

  // Full multiset: each representative followed by its conjugate, then the
  // real poles.
  std::vector<Complex> All() const;
  std::size_t size() const { return real_.size() + 2 * upper_.size(); }
  double MaxModulus() const;

 private:
  std::vector<double> real_;
  std::vector<Complex> upper_;
};

// r[k] = sum_n x[n] x[n+k] for k = 0..max_lag; lags past the frame are zero.
std::vector<double> Autocorrelate(std::span<const double> frame,
                                  std::size_t max_lag);

// Solves the Toeplitz normal equations by the Levinson-Durbin recursion.
// `frame_len` normalizes the gain to a per-sample RMS. A zero-lag value below
// kSilenceThreshold yields a degenerate model; a sequence that is not positive
// definite (|k_i| >= 1) raises kNumerical.
LpcModel LevinsonDurbin(std::span<const double> autocorr, std::size_t order,
                        std::size_t frame_len = 1);

// Autocorrelate followed by LevinsonDurbin.
LpcModel Analyze(std::span<const double> frame, std::size_t order);

// e[n] = x[n] - sum_k a_k x[n-k]. `history` holds the samples immediately
// preceding the frame in time order (history.back() is x[-1]); missing
// samples are zero.
std::vector<double> InverseFilter(std::span<const double> frame,
                                  const LpcModel& model,
                                  std::span<const double> history = {});

// y[n] = e[n] + sum_k a_k y[n-k], the exact inverse of InverseFilter for the
// same model and history. Raises kNumerical when the model is unstable.
std::vector<double> SynthesisFilter(std::span<const double> residual,
                                    const LpcModel& model,
                                    std::span<const double> history = {});

// Schur-Cohn step-down test: true iff every pole is strictly inside the unit
// circle.
bool IsStable(std::span<const double> coeffs);

// Roots of the prediction polynomial. Each returned pole satisfies
// |P(z)| <= 1e-8 * sum_k |c_k| |z|^k; failure raises kNumerical with the
// coefficients in the message. An order-0 model has no poles.
PoleSet FindPoles(const LpcModel& model);

// Monic expansion of the pole set back to prediction coefficients.
LpcModel PolesToCoeffs(const PoleSet& poles);
// Same, from a raw multiset; raises kContract if it is not conjugate-closed.
LpcModel PolesToCoeffs(std::span<const std::complex<double>> poles);

}  // namespace voxanon::lpc

#endif  // VOXANON_LPC_HPP_
