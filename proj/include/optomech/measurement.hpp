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
#include <span>
#include <vector>

#include "optomech/state.hpp"

namespace optomech {

// Quadratures use the x = b + b^dagger convention: the vacuum position
// density is a unit-variance Gaussian.

/// <x|n>, built upward from <x|0> = (2 pi)^{-1/4} e^{-x^2/4}.
double hermite_position_amplitude(double x, std::size_t n);

/// <x|n> for n = 0..dim-1.
RealVector position_amplitudes(double x, std::size_t dim);

/// Closed-form <x|amp> of a coherent state, in the phase convention fixed by
/// the Fock series sum_n c_n <x|n>.
Complex coherent_position_amplitude(double x, Complex amp);

enum class MeasurementTarget { mirror_position, field_quadrature };

struct MeasurementRecord {
  MeasurementTarget target = MeasurementTarget::mirror_position;
  double x = 0.0;
  double t = 0.0;
  double norm = 0.0;  ///< Born-rule probability density of the outcome.
};

struct FieldProjection {
  StateVector field_state;
  MeasurementRecord record;
};

struct MirrorProjection {
  StateVector mirror_state;
  MeasurementRecord record;
};

struct MirrorDensityProjection {
  DensityOperator mirror_state;
  MeasurementRecord record;
};

/// Ideal projection of the last (mirror) mode onto position x. The remaining
/// modes are returned normalized. `t` is recorded, not used.
FieldProjection project_mirror_position(const StateVector& joint, double x, double t);

/// Ideal projection of field mode c1 (first mode of a field (x) mirror state)
/// onto x = a + a^dagger. Returns the normalized mirror state.
MirrorProjection project_field_quadrature(const StateVector& joint, double x, double t);

/// Mixed-state version: rho_M ~ sum_{nm} <x|n><m|x> rho_{(n,.),(m,.)}.
MirrorDensityProjection project_field_quadrature(const DensityOperator& joint, double x, double t);

/// Born density of the outcome at each grid point. Throws GridError when the
/// trapezoid integral over the grid misses more than 1e-3 of the probability.
std::vector<double> outcome_density(const StateVector& joint, MeasurementTarget target,
                                    std::span<const double> grid);

}  // namespace optomech
