// Copyright 2026 The optomech Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "optomech/decoherence.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "optomech/errors.hpp"
#include "optomech/fock.hpp"

namespace optomech {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_vacuum_mirror(const ScaledParams& params) {
  params.validate();
  if (std::abs(params.beta) != 0.0) {
    throw ParameterError("the damped closed form assumes the mirror starts in vacuum (beta = 0)");
  }
}

double relaxation_integral(double gamma, double t) {
  // (1 - e^{-gamma t}) / gamma
  if (gamma < kSmallGamma) {
    const double gt = gamma * t;
    return t * (1.0 - gt / 2.0 + gt * gt / 6.0);
  }
  return -std::expm1(-gamma * t) / gamma;
}

// Exact coherent overlap <a|b>.
Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

double kerr_phase(double k, double gamma, double n, double m, double t, DampedPhase phase) {
  const double theta = phase == DampedPhase::exact ? damped_kerr_exponent(gamma, t) : t - std::sin(t);
  return k * k * (n * n - m * m) * theta;
}

void check_loss(double loss, double tolerance, const char* mode, std::size_t dim, std::size_t needed) {
  if (loss > tolerance) throw TruncationError(mode, dim, needed, loss);
}

std::size_t needed_mirror_dim(const Vector& c, const ScaledParams& params, double t, double tolerance) {
  std::vector<double> w(c.size());
  std::vector<double> r(c.size());
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    w[n] = std::norm(c(n));
    r[n] = std::abs(damped_mirror_amplitude(static_cast<double>(n), params.k, params.gamma, t));
  }
  return weighted_dim(w, r, tolerance);
}

}  // namespace

Complex damped_mirror_amplitude(double n, double k, double gamma, double t) {
  const Complex z(gamma / 2.0, 1.0);  // i + gamma/2
  return kI * k * n / z * (1.0 - std::exp(-z * t));
}

double damped_kerr_exponent(double gamma, double t) {
  const Complex z{0.5 * gamma, 1.0};  // i + gamma/2
  return std::real(kI / z * (t + (std::exp(-z * t) - 1.0) / z));
}

double decoherence_D(double n, double m, double k, double gamma, double t) {
  if (gamma < 0.0) throw ParameterError("gamma must be >= 0");
  if (gamma == 0.0 || n == m) return 0.0;
  const double dn = n - m;
  const Complex zp(-gamma / 2.0, 1.0);  // i - gamma/2
  const Complex zm(gamma / 2.0, 1.0);   // i + gamma/2
  const Complex oscillatory = (std::exp(zp * t) - 1.0) / zp - (std::exp(-zm * t) - 1.0) / zm;
  const double bracket = t + relaxation_integral(gamma, t) - oscillatory.real();
  return k * k * dn * dn * gamma / (2.0 * (1.0 + gamma * gamma / 4.0)) * bracket;
}

DampedDensity damped_density(const ScaledParams& params, double t, std::size_t field_dim,
                             std::size_t mirror_dim, double tolerance, DampedPhase phase) {
  require_vacuum_mirror(params);
  const std::size_t F = field_dim;
  const std::size_t M = mirror_dim;
  const Vector c = coherent_amplitudes(params.alpha, F);
  std::vector<Vector> branch(F);
  for (std::size_t n = 0; n < F; ++n) {
    branch[n] = c(n) * coherent_amplitudes(
                           damped_mirror_amplitude(static_cast<double>(n), params.k, params.gamma, t), M);
  }
  Matrix rho(F * M, F * M);
  for (std::size_t n = 0; n < F; ++n) {
    const double nn = static_cast<double>(n);
    for (std::size_t m = 0; m <= n; ++m) {
      const double mm = static_cast<double>(m);
      const Complex coef = std::exp(kI * kerr_phase(params.k, params.gamma, nn, mm, t, phase)) *
                           std::exp(-decoherence_D(nn, mm, params.k, params.gamma, t));
      rho.block(n * M, m * M, M, M) = coef * branch[n] * branch[m].adjoint();
      if (m != n) rho.block(m * M, n * M, M, M) = rho.block(n * M, m * M, M, M).adjoint();
    }
  }
  const double trace = rho.trace().real();
  const double loss = std::max(0.0, 1.0 - trace);
  if (loss > tolerance) {
    const double field_tail = coherent_tail(std::abs(params.alpha), F);
    if (field_tail > tolerance) {
      check_loss(loss, tolerance, "field", F, dim_for_amplitude(std::abs(params.alpha), tolerance));
    }
    check_loss(loss, tolerance, "mirror", M, needed_mirror_dim(c, params, t, tolerance));
  }
  rho /= trace;
  return {DensityOperator({F, M}, std::move(rho)), loss};
}

DampedDensity damped_field_state(const ScaledParams& params, double t, std::size_t field_dim,
                                 double tolerance, DampedPhase phase) {
  require_vacuum_mirror(params);
  const std::size_t F = field_dim;
  const Vector c = coherent_amplitudes(params.alpha, F);
  std::vector<Complex> phi(F);
  for (std::size_t n = 0; n < F; ++n) {
    phi[n] = damped_mirror_amplitude(static_cast<double>(n), params.k, params.gamma, t);
  }
  Matrix rho(F, F);
  for (std::size_t n = 0; n < F; ++n) {
    const double nn = static_cast<double>(n);
    for (std::size_t m = 0; m <= n; ++m) {
      const double mm = static_cast<double>(m);
      // Tr_M |phi_n><phi_m| = <phi_m|phi_n>
      rho(n, m) = c(n) * std::conj(c(m)) * std::exp(kI * kerr_phase(params.k, params.gamma, nn, mm, t, phase)) *
                  std::exp(-decoherence_D(nn, mm, params.k, params.gamma, t)) *
                  coherent_overlap(phi[m], phi[n]);
      rho(m, n) = std::conj(rho(n, m));
    }
    rho(n, n) = std::norm(c(n));
  }
  const double trace = rho.trace().real();
  const double loss = std::max(0.0, 1.0 - trace);
  check_loss(loss, tolerance, "field", F, dim_for_amplitude(std::abs(params.alpha), tolerance));
  rho /= trace;
  return {DensityOperator({F}, std::move(rho)), loss};
}

DampedDensity damped_mirror_state(const ScaledParams& params, double t, std::size_t field_dim,
                                  std::size_t mirror_dim, double tolerance) {
  require_vacuum_mirror(params);
  const std::size_t M = mirror_dim;
  const Vector c = coherent_amplitudes(params.alpha, field_dim);
  Matrix rho = Matrix::Zero(M, M);
  for (std::size_t n = 0; n < field_dim; ++n) {
    const Vector v = coherent_amplitudes(
        damped_mirror_amplitude(static_cast<double>(n), params.k, params.gamma, t), M);
    rho.noalias() += std::norm(c(n)) * (v * v.adjoint());
  }
  const double trace = rho.trace().real();
  const double loss = std::max(0.0, 1.0 - trace);
  if (loss > tolerance) {
    if (coherent_tail(std::abs(params.alpha), field_dim) > tolerance) {
      check_loss(loss, tolerance, "field", field_dim, dim_for_amplitude(std::abs(params.alpha), tolerance));
    }
    check_loss(loss, tolerance, "mirror", M, needed_mirror_dim(c, params, t, tolerance));
  }
  rho /= trace;
  return {DensityOperator({M}, std::move(rho)), loss};
}

double decoherence_timescale(const PhysicalParams& p, double gamma_absolute) {
  p.validate();
  if (gamma_absolute < 0.0) throw ParameterError("gamma_absolute must be >= 0");
  if (gamma_absolute == 0.0) return std::numeric_limits<double>::infinity();
  const double k = coupling_from_physical(p).k;
  const double gamma = gamma_absolute / p.omega_m;
  auto D = [&](double t) { return decoherence_D(0.0, 1.0, k, gamma, t); };

  // D is an integral of a non-negative integrand, hence non-decreasing in t.
  double lo = 0.0;
  double hi = 1.0;
  while (D(hi) < 1.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (D(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / p.omega_m;
}

double coherence_attenuation_at_measurement(double n, double m, double k, double gamma) {
  return std::exp(-decoherence_D(n, m, k, gamma, std::numbers::pi));
}

}  // namespace optomech
