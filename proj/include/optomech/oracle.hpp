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

#include <Eigen/Sparse>

#include "optomech/evolution.hpp"
#include "optomech/ode.hpp"
#include "optomech/params.hpp"
#include "optomech/state.hpp"

namespace optomech {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// H / (hbar omega_m) on field (x) mirror. The interaction picture drops r a^dag a.
SparseMatrix hamiltonian_matrix(const ScaledParams& params, std::size_t field_dim,
                                std::size_t mirror_dim, Picture picture = Picture::interaction);

/// Several field modes sharing one mirror; mode j has ratio r_j and coupling k_j.
SparseMatrix multimode_hamiltonian(const std::vector<double>& couplings,
                                   const std::vector<double>& ratios, const Dims& field_dims,
                                   std::size_t mirror_dim, Picture picture = Picture::interaction);

/// exp(-i H t) for Hermitian H via a dense eigendecomposition.
Matrix dense_propagator(const SparseMatrix& hamiltonian, double t);

StateVector integrate_schrodinger(const StateVector& psi0, const SparseMatrix& hamiltonian,
                                  double t, const IntegratorConfig& cfg = {},
                                  IntegrationStats* stats = nullptr);

StateVector integrate_schrodinger(const StateVector& psi0, const ScaledParams& params, double t,
                                  const IntegratorConfig& cfg = {},
                                  Picture picture = Picture::interaction);

/// Master equation with mirror damping rate params.gamma (zero temperature).
/// The result is hermitized. IntegrationError if the trace drifts past 1e-8, or, for
/// sizes up to 800, if an eigenvalue falls below -1e-6.
DensityOperator integrate_lindblad(const DensityOperator& rho0, const ScaledParams& params,
                                   double t, const IntegratorConfig& cfg = {},
                                   Picture picture = Picture::interaction,
                                   IntegrationStats* stats = nullptr);

/// rho = sum_nm c_nm |n><m| (x) |lambda_n><lambda_m|.
struct BranchState {
  std::size_t field_dim = 0;
  std::size_t mirror_dim = 0;
  Matrix coefficients;
  std::vector<Complex> amplitudes;
};

/// Recovers the branch form of a field-mirror density. Throws UnsupportedStateError
/// when some block is not a coherent dyad to within `tolerance`.
BranchState decompose_branches(const DensityOperator& rho, double tolerance = 1e-8);

/// Product of coherent states |alpha> (x) |beta>, field truncated to field_dim.
BranchState product_branches(Complex alpha, Complex beta, std::size_t field_dim, std::size_t mirror_dim);

/// Dense density on field_dim x mirror_dim, renormalized to unit trace.
DensityOperator assemble_branches(const BranchState& branches);

/// Reduced states from exact coherent overlaps; neither forms the joint density.
DensityOperator branch_field_state(const BranchState& branches);
DensityOperator branch_mirror_state(const BranchState& branches);

/// Alternates exact unitary steps with exact amplitude-damping steps.
BranchState trotter_evolve(BranchState branches, const ScaledParams& params, double t,
                           std::size_t steps);

DensityOperator trotter_evolve(const DensityOperator& rho0, const ScaledParams& params, double t,
                               std::size_t steps);

}  // namespace optomech
