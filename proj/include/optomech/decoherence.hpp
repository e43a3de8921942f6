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

#pragma once

#include <cstddef>

#include "optomech/state.hpp"

namespace optomech {

/// Below this damping the (1 - e^{-gamma t}) / gamma term is evaluated by series.
inline constexpr double kSmallGamma = 1e-8;

/// Mirror amplitude for field photon number n under damping, vacuum start:
///   phi_n(gamma, t) = i k n / (i + gamma/2) (1 - e^{-(i + gamma/2) t}).
Complex damped_mirror_amplitude(double n, double k, double gamma, double t);

/// Self-phase exponent theta(t) with branch phase k^2 n^2 theta(t):
///   theta = Re[ i/(i + gamma/2) ( t - (1 - e^{-(i + gamma/2) t})/(i + gamma/2) ) ],
/// the integral of Re phi_n(gamma, t') / (k n). Equals t - sin t at gamma = 0.
double damped_kerr_exponent(double gamma, double t);

/// Decoherence exponent
///   D = k^2 (n-m)^2 gamma / (2 (1 + gamma^2/4))
///       [ t + (1 - e^{-gamma t})/gamma
///         - ( (e^{(i - gamma/2) t} - 1)/(i - gamma/2) - (e^{-(i + gamma/2) t} - 1)/(i + gamma/2) ) ],
/// which equals (gamma/2) int_0^t |phi_n - phi_m|^2 dt'.
double decoherence_D(double n, double m, double k, double gamma, double t);

struct DampedTrajectory {
  std::size_t n = 0;
  double k = 0.0;
  double gamma = 0.0;

  Complex operator()(double t) const { return damped_mirror_amplitude(static_cast<double>(n), k, gamma, t); }
};

struct DecoherenceExponent {
  double k = 0.0;

  double operator()(double n, double m, double gamma, double t) const { return decoherence_D(n, m, k, gamma, t); }
};

/// Branch self-phase used by the damped solution. `exact` integrates k n Re phi_n(gamma, t)
/// and solves the master equation; `printed` keeps the undamped k^2 n^2 (t - sin t).
enum class DampedPhase { exact, printed };

struct DampedDensity {
  DensityOperator rho;
  double renormalization = 0.0;  ///< 1 - trace before renormalizing (truncation loss).
};

/// Joint field (x) mirror density operator under mirror damping, starting from
/// |alpha><alpha| (x) |0><0|. Requires params.beta == 0. Throws TruncationError
/// when the discarded trace exceeds `tolerance`.
DampedDensity damped_density(const ScaledParams& params, double t, std::size_t field_dim,
                             std::size_t mirror_dim, double tolerance = 1e-8,
                             DampedPhase phase = DampedPhase::exact);

/// Reduced field state of the same solution, using closed-form coherent
/// overlaps (no mirror truncation).
DampedDensity damped_field_state(const ScaledParams& params, double t, std::size_t field_dim,
                                 double tolerance = 1e-8, DampedPhase phase = DampedPhase::exact);

/// Reduced mirror state sum_n |c_n|^2 |phi_n(gamma,t)><phi_n(gamma,t)|.
DampedDensity damped_mirror_state(const ScaledParams& params, double t, std::size_t field_dim,
                                  std::size_t mirror_dim, double tolerance = 1e-8);

/// Absolute time (seconds) at which D(0, 1, gamma, t) reaches 1 for the given
/// laboratory parameters and absolute damping rate (1/s). Scales as omega_m^3
/// once t >> 1. Returns +infinity when gamma_absolute == 0.
double decoherence_timescale(const PhysicalParams& p, double gamma_absolute);

/// e^{-D(n, m, gamma, pi)}: surviving fraction of the coherence between mirror
/// branches n and m at the usual measurement time t = pi.
double coherence_attenuation_at_measurement(double n, double m, double k, double gamma);

}  // namespace optomech
