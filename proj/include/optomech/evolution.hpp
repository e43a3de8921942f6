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
#include <vector>

#include "optomech/fock.hpp"
#include "optomech/state.hpp"

namespace optomech {

/// Whether the free field rotation exp(-i r a^dagger a t) is kept.
/// The mirror's own rotation is always kept.
enum class Picture { interaction, full };

/// Scalar ingredients of the factorized propagator at scaled time t.
struct PropagatorFactors {
  double t = 0.0;
  Complex eta{0.0, 0.0};            ///< 1 - e^{-it}
  double kerr_phase_exponent = 0.0;  ///< k^2 (t - sin t)
  double free_field_phase = 0.0;     ///< r t
};

PropagatorFactors propagator_factors(const ScaledParams& params, double t);

/// U(t) = e^{-i r N t} e^{i k^2 N^2 (t - sin t)} exp[k N (eta b^dag - eta^* b)] e^{-i b^dag b t}
/// on the field (x) mirror Fock space. Each field block is built from the exact
/// displacement matrix elements, so the result is the compression of the
/// infinite-dimensional propagator onto the truncated space.
Matrix propagator_matrix(const ScaledParams& params, double t, std::size_t field_dim,
                         std::size_t mirror_dim, Picture picture = Picture::interaction);

/// phi_n(t) = beta e^{-it} + k n (1 - e^{-it}). `n` may be any non-negative
/// excitation weight (multimode states use sum_j eta_j n_j).
Complex mirror_amplitude(double n, const ScaledParams& params, double t);

/// Phase k n Im[beta^* (e^{it} - 1)] picked up when the displacement acts on the
/// rotated mirror state |beta e^{-it}>. Vanishes at t = 2 pi, and at t = pi for real beta.
double displacement_phase(double n, const ScaledParams& params, double t);

/// Mirror coherent amplitude attached to field photon number n, as a function of t.
struct CoherentTrajectory {
  std::size_t n = 0;
  ScaledParams params;

  Complex operator()(double t) const { return mirror_amplitude(static_cast<double>(n), params, t); }
};

struct TruncationDims {
  std::size_t field = 1;
  std::size_t mirror = 1;
};

/// Default truncation for undamped single-mode runs: the field keeps the tail
/// of |alpha> under `tolerance`; the mirror keeps the photon-number weighted
/// tail of amplitudes up to |beta| + 2 k n under `tolerance`.
TruncationDims default_dims(const ScaledParams& params, double tolerance = kDefaultDimTolerance);

struct JointState {
  StateVector state;
  double truncation_loss = 0.0;  ///< Norm discarded before renormalization.
};

/// Closed-form joint state from |alpha> (x) |beta>:
///   sum_n c_n(alpha) e^{i k^2 n^2 (t - sin t)} e^{i displacement_phase(n)} |n> (x) |phi_n(t)>.
/// Throws TruncationError (naming the mode) when more than `tolerance` of the norm is lost.
JointState joint_state(const ScaledParams& params, double t, std::size_t field_dim,
                       std::size_t mirror_dim, double tolerance = kDefaultTruncationTolerance,
                       Picture picture = Picture::interaction);

/// N field modes sharing the mirror. Mode j has frequency eta_j * omega_c1 and
/// coupling k_j = eta_j * k1.
struct MultimodeConfig {
  std::vector<int> eta;
  double k1 = 0.0;
  std::vector<Complex> alphas;
  int p = 1;  ///< Exponent of the (a_1 ... a_N)^p eigenstate construction.

  std::size_t mode_count() const { return eta.size(); }
  void validate() const;
};

/// Joint state of N field modes and the mirror, ordered (c1, ..., cN, mirror),
/// in the interaction picture. Each Fock configuration evolves like the
/// single-mode case with n replaced by sum_j eta_j n_j.
JointState multimode_joint_state(const MultimodeConfig& config, Complex beta, double t,
                                 const Dims& field_dims, std::size_t mirror_dim,
                                 double tolerance = kDefaultTruncationTolerance);

/// Two-mode state at t = 2 pi conditioned on Fock index m of mode `conditioned_mode`:
///   sum_n (alpha_o e^{i 4 pi k1^2 eta_c eta_o m})^n / sqrt(n!) e^{i 2 pi k1^2 eta_o^2 n^2} |n>,
/// normalized, for the other mode o.
StateVector conditional_mode_state(std::size_t m, const MultimodeConfig& config,
                                   std::size_t conditioned_mode, std::size_t dim,
                                   double tolerance = kDefaultTruncationTolerance);

}  // namespace optomech
