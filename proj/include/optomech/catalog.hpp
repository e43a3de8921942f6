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
#include <optional>
#include <string>
#include <vector>

#include "optomech/evolution.hpp"
#include "optomech/fock.hpp"
#include "optomech/state.hpp"

namespace optomech {

/// Field state reached at t = 2 pi from |alpha>:
///   sum_n e^{-|alpha|^2/2} alpha^n / sqrt(n!) e^{i 2 pi k^2 n^2} |n>, normalized.
StateVector zeta_state(Complex alpha, double k, std::size_t dim,
                       double tolerance = kDefaultTruncationTolerance);

/// One term c |amp_1> (x) |amp_2> (x) ... of a superposition of coherent products.
struct CatComponent {
  Complex coefficient{1.0, 0.0};
  std::vector<Complex> amplitudes;  ///< One coherent amplitude per mode.
};

struct CatSpec {
  std::vector<CatComponent> components;
  bool normalized = true;  ///< Normalize the superposition on construction.

  std::size_t mode_count() const;
  void validate() const;
};

/// Sum of the components in the Fock basis (exact truncated components).
/// Throws ZeroNormError when the coefficients cancel.
StateVector cat_superposition(const CatSpec& spec, const Dims& dims);

/// (1+i)/2 |alpha> + (1-i)/2 |-alpha>.
CatSpec two_component_cat(Complex alpha);
/// |-alpha> + c (|alpha e^{i pi/3}> + |alpha e^{-i pi/3}>), c = e^{2 i pi/3}.
/// Equals zeta_state(alpha, 1/sqrt(6)).
CatSpec three_component_cat(Complex alpha);
/// |-alpha> + c |alpha e^{i pi/3}> - c |alpha e^{-i pi/3}>, c = (1 + e^{i pi/3}) / (2i sin(pi/3)),
/// the coefficient pattern as printed. Does not reproduce zeta_state(alpha, 1/sqrt(6)).
CatSpec three_component_cat_printed(Complex alpha);
/// e^{i pi/4}/2 (|alpha> - |-alpha>) + 1/2 (|i alpha> + |-i alpha>).
CatSpec four_component_cat(Complex alpha);
/// (1+i) |alpha1, alpha2> + (1-i) |-alpha1, -alpha2>.
CatSpec entangled_two_mode_cat(Complex alpha1, Complex alpha2);
/// |alpha> + sign |-alpha>; sign = +1 even, -1 odd.
CatSpec parity_cat(Complex alpha, int sign);

struct EigenstateCheck {
  /// Predicted (alpha_1 ... alpha_N)^p e^{i pi p (sum eta_j)^2}; empty when
  /// 2 pi k1^2 != pi / p, in which case the residual is against the Rayleigh quotient.
  std::optional<Complex> eigenvalue;
  double relative_residual = 0.0;
  std::size_t guarded_components = 0;
  std::string diagnostic;
};

/// Applies (a_1 a_2 ... a_N)^p to an N-mode field state and measures
/// ||O psi - lambda psi|| / ||lambda psi|| over Fock components with every
/// n_j <= dim_j - 1 - p - guard. Throws TruncationError when no component survives.
EigenstateCheck eigenstate_residual(const StateVector& state, const MultimodeConfig& config,
                                    std::size_t guard = 2);

}  // namespace optomech
