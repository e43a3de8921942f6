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

/// Kronecker product, left operand on the slower index.
Matrix kron(const Matrix& a, const Matrix& b);

StateVector tensor_product(std::span<const StateVector> parts);
StateVector tensor_product(const StateVector& a, const StateVector& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

/// Reduced operator on the modes listed in `keep` (any order; output keeps ascending order).
DensityOperator partial_trace(const DensityOperator& rho, std::vector<std::size_t> keep);

/// Reduced operator of a pure state, computed as Psi Psi^dagger without forming |psi><psi|.
DensityOperator partial_trace(const StateVector& psi, std::vector<std::size_t> keep);

/// Tr(rho^2).
double purity(const DensityOperator& rho);

/// 1 - Tr(rho^2).
double linear_entropy(const DensityOperator& rho);

/// Linear entropy of the reduced state on `keep`. For a pure global state both
/// sides of the cut share the same spectrum, so the smaller side is used.
double reduced_linear_entropy(const StateVector& psi, std::vector<std::size_t> keep);

/// |<a|b>|^2 after normalizing both vectors.
double fidelity(const StateVector& a, const StateVector& b);
/// <psi|rho|psi>.
double fidelity(const StateVector& psi, const DensityOperator& rho);
double fidelity(const DensityOperator& rho, const StateVector& psi);
/// Uhlmann fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2; dense eigensolves.
double fidelity(const DensityOperator& a, const DensityOperator& b);

/// Half the trace norm of the difference.
double trace_distance(const DensityOperator& a, const DensityOperator& b);
double trace_distance(const StateVector& a, const StateVector& b);

}  // namespace optomech
