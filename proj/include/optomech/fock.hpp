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

/// Default ceiling on the norm discarded when a coherent state is truncated.
inline constexpr double kDefaultTruncationTolerance = 1e-10;

/// Tail budget used when choosing default truncation dimensions.
inline constexpr double kDefaultDimTolerance = 1e-12;

/// Ladder matrix with <n-1|a|n> = sqrt(n).
Matrix annihilation_matrix(std::size_t dim);

/// diag(0, 1, ..., dim-1).
Matrix number_matrix(std::size_t dim);

/// Exact (untruncated) Fock components e^{-|amp|^2/2} amp^n / sqrt(n!) for n < dim.
/// Evaluated by two-sided recursion from the modal index, so large amplitudes
/// do not underflow.
Vector coherent_amplitudes(Complex amp, std::size_t dim);

/// Poisson tail P(N >= dim) for mean |amp|^2; the norm lost by truncating |amp>.
double coherent_tail(double abs_amp, std::size_t dim);

/// Smallest dim whose coherent tail is below `tolerance`.
std::size_t dim_for_amplitude(double abs_amp, double tolerance = kDefaultDimTolerance);

/// Smallest dim M with sum_n weights[n] * coherent_tail(reaches[n], M) < tolerance.
/// Used for the mirror, whose amplitude depends on the field photon number.
std::size_t weighted_dim(std::span<const double> weights, std::span<const double> reaches,
                         double tolerance = kDefaultDimTolerance);

struct CoherentState {
  StateVector state;
  double truncation_loss = 0.0;
};

/// Renormalized truncated coherent state. Throws TruncationError when the
/// discarded norm exceeds `tolerance`.
CoherentState coherent_state(Complex amp, std::size_t dim,
                             double tolerance = kDefaultTruncationTolerance);

/// Normalized associated-Laguerre sequence used by displacement and Wigner kernels:
///   out[n] = sqrt(n!/(n+d)!) r^d e^{-r^2/2} L_n^{(d)}(r^2),  n = 0..out.size()-1.
void laguerre_kernel(double r, std::size_t d, std::span<double> out);

/// Matrix elements <m|D(amp)|n> of the untruncated displacement operator,
/// restricted to m, n < dim. Not unitary near the truncation edge.
Matrix displacement_matrix(Complex amp, std::size_t dim);

}  // namespace optomech
