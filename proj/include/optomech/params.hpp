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

#include <complex>

namespace optomech {

using Complex = std::complex<double>;

/// Reduced Planck constant in J s (CODATA 2018, exact).
inline constexpr double kHbar = 1.054571817e-34;

/// Laboratory parameters of the cavity and the movable mirror (SI units).
struct PhysicalParams {
  double omega_0 = 0.0;  ///< Cavity field angular frequency, rad/s.
  double omega_m = 0.0;  ///< Mirror angular frequency, rad/s.
  double length = 0.0;   ///< Cavity length, m.
  double mass = 0.0;     ///< Mirror mass, kg.

  /// Throws ParameterError unless every field is strictly positive and finite.
  void validate() const;
};

/// Dimensionless knobs of the model. Time is measured in units of 1/omega_m.
struct ScaledParams {
  double k = 0.0;      ///< Coupling g / omega_m.
  double r = 0.0;      ///< Frequency ratio omega_0 / omega_m.
  double gamma = 0.0;  ///< Mirror damping rate / omega_m.
  Complex alpha{0.0, 0.0};  ///< Initial field coherent amplitude.
  Complex beta{0.0, 0.0};   ///< Initial mirror coherent amplitude.

  void validate() const;
};

struct Coupling {
  double g = 0.0;  ///< Radiation-pressure coupling, rad/s.
  double k = 0.0;
  double r = 0.0;
};

/// g = (omega_0 / L) sqrt(hbar / (2 m omega_m)), k = g / omega_m, r = omega_0 / omega_m.
Coupling coupling_from_physical(const PhysicalParams& p);

}  // namespace optomech
