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
#include <string>
#include <vector>

#include "optomech/catalog.hpp"
#include "optomech/evolution.hpp"
#include "optomech/params.hpp"
#include "optomech/state.hpp"

namespace optomech {

using RealMatrix = Eigen::MatrixXd;

// Phase-space coordinates: x = a + a^dagger, y = -i(a - a^dagger). Vacuum has unit
// variance along each axis, and W integrates to 1 over dx dy.

enum class MassPolicy { widen, error, report };

struct WignerGridSpec {
  double x_min = -6.0;
  double x_max = 6.0;
  double y_min = -6.0;
  double y_max = 6.0;
  std::size_t nx = 121;
  std::size_t ny = 121;
  MassPolicy on_deficit = MassPolicy::widen;
  double mass_tolerance = 1e-2;

  void validate() const;
};

struct WignerGrid {
  RealVector x_axis;
  RealVector y_axis;
  RealMatrix values;  ///< values(i, j) = W(x_axis[i], y_axis[j]).
  double mass = 0.0;  ///< Trapezoid integral of W over the grid.
  std::size_t widenings = 0;
  std::string diagnostic;
};

/// W(x, y) = (1/2 pi) Tr[rho D(beta) P D(beta)^dagger], beta = (x + i y)/2, P the parity.
/// Evaluated with OPTOMECH_THREADS worker threads (default: hardware concurrency).
WignerGrid wigner(const DensityOperator& rho, const WignerGridSpec& spec = {});
WignerGrid wigner(const StateVector& psi, const WignerGridSpec& spec = {});

/// W at a single phase-space point.
double wigner_point(const DensityOperator& rho, double x, double y);

/// A single-mode state written with coherent kets and no Fock truncation:
///   rho = sum_i w_i |psi_i><psi_i| / <psi_i|psi_i>,  |psi_i> = sum_j c_ij |a_ij>.
/// Weights are normalized on use.
struct CoherentEnsemble {
  struct Member {
    double weight = 1.0;
    std::vector<Complex> coefficients;
    std::vector<Complex> amplitudes;
  };
  std::vector<Member> members;

  void validate() const;
};

/// Single-mode cat as a one-member ensemble.
CoherentEnsemble coherent_ensemble(const CatSpec& spec);

/// Sum of Gaussian cross terms; exact for any grid extent.
WignerGrid wigner(const CoherentEnsemble& ensemble, const WignerGridSpec& spec = {});
double wigner_point(const CoherentEnsemble& ensemble, double x, double y);

/// Reduced mirror state sum_n P(n) |phi_n(t)><phi_n(t)| of the closed-form evolution
/// (damped amplitudes when params.gamma > 0, which requires beta = 0). Throws
/// TruncationError when the field tail beyond field_dim exceeds `tolerance`.
CoherentEnsemble mirror_branches(const ScaledParams& params, double t, std::size_t field_dim,
                                 double tolerance = 1e-10);

/// Mirror state after the field quadrature returns x at time t (undamped):
///   sum_n c_n e^{i theta_n} <x|n> |phi_n(t)>, theta_n the branch phase of joint_state.
CoherentEnsemble projected_mirror_branches(const ScaledParams& params, double x, double t,
                                           std::size_t field_dim, double tolerance = 1e-10,
                                           Picture picture = Picture::interaction);

struct NegativityCertificate {
  double min_value = 0.0;
  double x = 0.0;  ///< Grid point attaining the minimum.
  double y = 0.0;
  double epsilon = 0.0;
  bool negative = false;  ///< min_value < -epsilon.
};

NegativityCertificate negativity(const WignerGrid& grid, double epsilon = 1e-9);

/// Fock-basis populations of one mode.
RealVector number_distribution(const StateVector& psi, std::size_t mode = 0);
RealVector number_distribution(const DensityOperator& rho, std::size_t mode = 0);

struct EntropyScenario {
  ScaledParams params;
  bool damped = false;
  std::size_t field_dim = 0;   ///< 0 selects default_dims.
  std::size_t mirror_dim = 0;  ///< 0 selects default_dims.
  double tolerance = 1e-10;
};

struct EntropyPoint {
  double t = 0.0;
  double entropy = 0.0;
  double truncation_loss = 0.0;
};

/// Linear entropy of the reduced mirror state at each time. Undamped scenarios use
/// the closed-form joint state; damped ones require beta == 0.
std::vector<EntropyPoint> entropy_curve(const EntropyScenario& scenario, const std::vector<double>& times);

/// Number of worker threads for grid evaluation.
std::size_t worker_threads();

}  // namespace optomech
