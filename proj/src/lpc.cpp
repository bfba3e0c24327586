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

#include "voxanon/lpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "voxanon/error.hpp"

namespace voxanon::lpc {

namespace {

using Complex = std::complex<double>;

constexpr double kRootCertificate = 1e-8;
constexpr int kNewtonSteps = 4;

// Monic polynomial coefficients c_0 = 1, c_k = -a_k, highest power first.
std::vector<double> MonicFromPrediction(std::span<const double> a) {
  std::vector<double> c(a.size() + 1);
  c[0] = 1.0;
  for (std::size_t k = 0; k < a.size(); ++k) c[k + 1] = -a[k];
  return c;
}

// Horner evaluation of P and P' at z.
void EvaluatePoly(const std::vector<double>& c, Complex z, Complex* value,
                  Complex* derivative) {
  Complex p = c[0];
  Complex dp = 0.0;
  for (std::size_t k = 1; k < c.size(); ++k) {
    dp = dp * z + p;
    p = p * z + c[k];
  }
  *value = p;
  *derivative = dp;
}

double PolyScale(const std::vector<double>& c, Complex z) {
  const double r = std::abs(z);
  double s = 0.0;
  for (double ck : c) s = s * r + std::abs(ck);
  return s;
}

Complex Polish(const std::vector<double>& c, Complex z) {
  Complex value, deriv;
  EvaluatePoly(c, z, &value, &deriv);
  for (int step = 0; step < kNewtonSteps; ++step) {
    if (value == 0.0 || deriv == 0.0) break;
    const Complex next = z - value / deriv;
    Complex next_value, next_deriv;
    EvaluatePoly(c, next, &next_value, &next_deriv);
    if (!(std::abs(next_value) < std::abs(value))) break;
    z = next;
    value = next_value;
    deriv = next_deriv;
  }
  return z;
}

std::string FormatCoeffs(std::span<const double> a) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (std::size_t k = 0; k < a.size(); ++k) os << (k ? ", " : "") << a[k];
  os << "]";
  return os.str();
}

}  // namespace

PoleSet::PoleSet(std::vector<double> real, std::vector<Complex> upper)
    : real_(std::move(real)), upper_(std::move(upper)) {
  for (Complex& z : upper_) {
    if (z.imag() < 0) z = std::conj(z);
  }
}

PoleSet PoleSet::FromRoots(std::span<const Complex> roots, double tol) {
  std::vector<double> real;
  std::vector<Complex> upper, lower;
  for (const Complex& z : roots) {
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= tol * scale) {
      real.push_back(z.real());
    } else if (z.imag() > 0) {
      upper.push_back(z);
    } else {
      lower.push_back(z);
    }
  }
  if (upper.size() != lower.size()) {
    Fail(ErrorKind::kContract,
         "pole set is not conjugate-closed: " + std::to_string(upper.size()) +
             " poles above the real axis, " + std::to_string(lower.size()) +
             " below");
  }
  std::vector<Complex> paired;
  std::vector<bool> used(lower.size(), false);
  for (const Complex& u : upper) {
    std::size_t best = lower.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(u - std::conj(lower[j]));
      if (d < best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == lower.size() ||
        best_dist > tol * std::max(1.0, std::abs(u))) {
      std::ostringstream os;
      os << "pole set is not conjugate-closed: no partner for " << u;
      Fail(ErrorKind::kContract, os.str());
    }
    used[best] = true;
    paired.push_back(0.5 * (u + std::conj(lower[best])));
  }
  return PoleSet(std::move(real), std::move(paired));
}

std::vector<Complex> PoleSet::All() const {
  std::vector<Complex> out;
  out.reserve(size());
  for (const Complex& z : upper_) {
    out.push_back(z);
    out.push_back(std::conj(z));
  }
  for (double r : real_) out.emplace_back(r, 0.0);
  return out;
}

double PoleSet::MaxModulus() const {
  double m = 0.0;
  for (double r : real_) m = std::max(m, std::abs(r));
  for (const Complex& z : upper_) m = std::max(m, std::abs(z));
  return m;
}

std::vector<double> Autocorrelate(std::span<const double> frame,
                                  std::size_t max_lag) {
  std::vector<double> r(max_lag + 1, 0.0);
  const std::size_t n = frame.size();
  for (std::size_t k = 0; k <= max_lag && k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) acc += frame[i] * frame[i + k];
    r[k] = acc;
  }
  return r;
}

LpcModel LevinsonDurbin(std::span<const double> autocorr, std::size_t order,
                        std::size_t frame_len) {
  if (autocorr.size() < order + 1) {
    Fail(ErrorKind::kContract,
         "Levinson-Durbin needs " + std::to_string(order + 1) +
             " autocorrelation lags, got " + std::to_string(autocorr.size()));
  }
  const double norm = static_cast<double>(std::max<std::size_t>(frame_len, 1));
  LpcModel model;
  const double r0 = autocorr[0];
  if (!std::isfinite(r0) || r0 < 0.0) {
    Fail(ErrorKind::kNumerical, "autocorrelation r[0]=" + std::to_string(r0) +
                                    " is not a valid energy");
  }
  if (r0 < kSilenceThreshold) {
    model.coeffs.assign(order, 0.0);
    model.reflection.assign(order, 0.0);
    model.degenerate = true;
    model.gain = std::sqrt(r0 / norm);
    return model;
  }

  std::vector<double> a(order, 0.0), prev(order, 0.0);
  double error = r0;
  for (std::size_t i = 1; i <= order; ++i) {
    double acc = autocorr[i];
    for (std::size_t j = 1; j < i; ++j) acc -= a[j - 1] * autocorr[i - j];
    const double k = acc / error;
    if (!std::isfinite(k) || std::abs(k) >= 1.0) {
      Fail(ErrorKind::kNumerical,
           "autocorrelation is not positive definite: reflection "
           "coefficient k_" + std::to_string(i) + "=" + std::to_string(k));
    }
    prev = a;
    for (std::size_t j = 1; j < i; ++j) a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
    a[i - 1] = k;
    model.reflection.push_back(k);
    error *= (1.0 - k * k);
    if (!(error > 0.0)) {
      Fail(ErrorKind::kNumerical,
           "prediction error vanished at order " + std::to_string(i));
    }
  }
  model.coeffs = std::move(a);
  model.gain = std::sqrt(error / norm);
  return model;
}

LpcModel Analyze(std::span<const double> frame, std::size_t order) {
  const std::vector<double> r = Autocorrelate(frame, order);
  return LevinsonDurbin(r, order, frame.size());
}

std::vector<double> InverseFilter(std::span<const double> frame,
                                  const LpcModel& model,
                                  std::span<const double> history) {
  const std::size_t p = model.order();
  const auto past = [&](std::ptrdiff_t idx) -> double {
    if (idx >= 0) return frame[static_cast<std::size_t>(idx)];
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(history.size()) + idx;
    return h >= 0 ? history[static_cast<std::size_t>(h)] : 0.0;
  };
  std::vector<double> e(frame.size());
  for (std::size_t n = 0; n < frame.size(); ++n) {
    double acc = frame[n];
    for (std::size_t k = 1; k <= p; ++k) {
      acc -= model.coeffs[k - 1] *
             past(static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(k));
    }
    e[n] = acc;
  }
  return e;
}

std::vector<double> SynthesisFilter(std::span<const double> residual,
                                    const LpcModel& model,
                                    std::span<const double> history) {
  if (!IsStable(model.coeffs)) {
    Fail(ErrorKind::kNumerical,
         "synthesis filter is unstable (pole on or outside the unit circle)");
  }
  const std::size_t p = model.order();
  std::vector<double> y(residual.size());
  const auto past = [&](std::ptrdiff_t idx) -> double {
    if (idx >= 0) return y[static_cast<std::size_t>(idx)];
    const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(history.size()) + idx;
    return h >= 0 ? history[static_cast<std::size_t>(h)] : 0.0;
  };
  for (std::size_t n = 0; n < residual.size(); ++n) {
    double acc = residual[n];
    for (std::size_t k = 1; k <= p; ++k) {
      acc += model.coeffs[k - 1] *
             past(static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(k));
    }
    y[n] = acc;
  }
  return y;
}

bool IsStable(std::span<const double> coeffs) {
  // Step down from A(z) = 1 + sum c_k z^-k, c_k = -a_k.
  std::vector<double> c(coeffs.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) c[k] = -coeffs[k];
  for (std::size_t i = c.size(); i > 0; --i) {
    const double k = c[i - 1];
    if (!std::isfinite(k) || std::abs(k) >= 1.0) return false;
    const double denom = 1.0 - k * k;
    std::vector<double> next(i - 1);
    for (std::size_t j = 1; j < i; ++j) {
      next[j - 1] = (c[j - 1] - k * c[i - j - 1]) / denom;
    }
    c = std::move(next);
  }
  return true;
}

PoleSet FindPoles(const LpcModel& model) {
  const std::size_t p = model.order();
  if (p == 0) return PoleSet();
  for (double a : model.coeffs) {
    if (!std::isfinite(a)) {
      Fail(ErrorKind::kNumerical,
           "non-finite prediction coefficients " + FormatCoeffs(model.coeffs));
    }
  }
  const std::vector<double> c = MonicFromPrediction(model.coeffs);

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < p; ++k) {
    companion(0, static_cast<Eigen::Index>(k)) = model.coeffs[k];
  }
  for (std::size_t k = 1; k < p; ++k) {
    companion(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1)) =
        1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    Fail(ErrorKind::kNumerical,
         "root finder did not converge for coefficients " +
             FormatCoeffs(model.coeffs));
  }

  std::vector<double> real;
  std::vector<Complex> upper;
  const auto& eig = solver.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    const Complex z = eig(i);
    if (z.imag() == 0.0) {
      real.push_back(Polish(c, z).real());
    } else if (z.imag() > 0.0) {
      Complex polished = Polish(c, z);
      if (polished.imag() <= 0.0) polished = z;
      upper.push_back(polished);
    }
  }
  if (real.size() + 2 * upper.size() != p) {
    Fail(ErrorKind::kNumerical,
         "root finder returned unpaired complex roots for coefficients " +
             FormatCoeffs(model.coeffs));
  }

  PoleSet poles(std::move(real), std::move(upper));
  for (const Complex& z : poles.All()) {
    Complex value, deriv;
    EvaluatePoly(c, z, &value, &deriv);
    if (!(std::abs(value) <= kRootCertificate * PolyScale(c, z))) {
      std::ostringstream os;
      os << "root " << z << " fails the residual check (|P|=" << std::abs(value)
         << ") for coefficients " << FormatCoeffs(model.coeffs);
      Fail(ErrorKind::kNumerical, os.str());
    }
  }
  return poles;
}

LpcModel PolesToCoeffs(const PoleSet& poles) {
  // Multiply real quadratic and linear factors; highest power first.
  std::vector<double> c{1.0};
  const auto multiply = [&c](std::span<const double> factor) {
    std::vector<double> out(c.size() + factor.size() - 1, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < factor.size(); ++j) {
        out[i + j] += c[i] * factor[j];
      }
    }
    c = std::move(out);
  };
  for (const Complex& z : poles.upper()) {
    const double quad[3] = {1.0, -2.0 * z.real(), std::norm(z)};
    multiply(quad);
  }
  for (double r : poles.real()) {
    const double lin[2] = {1.0, -r};
    multiply(lin);
  }
  LpcModel model;
  model.coeffs.resize(c.size() - 1);
  for (std::size_t k = 1; k < c.size(); ++k) model.coeffs[k - 1] = -c[k];
  return model;
}

LpcModel PolesToCoeffs(std::span<const std::complex<double>> poles) {
  return PolesToCoeffs(PoleSet::FromRoots(poles));
}

}  // namespace voxanon::lpc
