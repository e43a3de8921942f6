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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "optomech/errors.hpp"
#include "optomech/fock.hpp"
#include "optomech/metrics.hpp"
#include "optomech/params.hpp"
#include "optomech/state.hpp"
#include "test_util.hpp"

using namespace optomech;
using optomech::testing::basis;
using optomech::testing::basis_state;
using optomech::testing::series_coherent;

namespace {

PhysicalParams lab() {
  PhysicalParams p;
  p.omega_0 = 1e16;
  p.omega_m = 2.0 * std::numbers::pi * 1e3;
  p.length = 1.0;
  p.mass = 1e-5;
  return p;
}

}  // namespace

TEST(Params, coupling_square_root_mass_law) {
  PhysicalParams p = lab();
  const double g = coupling_from_physical(p).g;
  p.mass *= 4.0;
  EXPECT_NEAR(coupling_from_physical(p).g, 0.5 * g, 1e-15 * g);
}

TEST(Params, coupling_inverse_length_law) {
  PhysicalParams p = lab();
  const double g = coupling_from_physical(p).g;
  p.length *= 2.0;
  EXPECT_NEAR(coupling_from_physical(p).g, 0.5 * g, 1e-15 * g);
}

TEST(Params, coupling_for_quoted_laboratory_values) {
  // Direct evaluation: far from order unity.
  const Coupling c = coupling_from_physical(lab());
  EXPECT_NEAR(c.g, 0.28968976295422627, 1e-12);
  EXPECT_NEAR(c.k, 4.610555773728454e-05, 1e-17);
  EXPECT_NEAR(c.r, 1591549430918.9536, 1e-2);
  EXPECT_LT(c.k, 1e-3);
}

TEST(Params, rejects_non_positive_fields) {
  PhysicalParams p = lab();
  p.mass = 0.0;
  EXPECT_THROW(coupling_from_physical(p), ParameterError);
  p = lab();
  p.length = -1.0;
  EXPECT_THROW(p.validate(), ParameterError);
  ScaledParams s;
  s.gamma = -0.1;
  EXPECT_THROW(s.validate(), ParameterError);
  s.gamma = 0.0;
  s.k = -1.0;
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(State, length_must_match_dims) {
  EXPECT_THROW(StateVector({2, 3}, Vector::Zero(5)), DimensionError);
  EXPECT_NO_THROW(StateVector({2, 3}, Vector::Zero(6)));
}

TEST(State, normalized_flag_is_checked) {
  Vector v = Vector::Ones(2);
  EXPECT_THROW(StateVector({2}, v, true), Error);
  EXPECT_NO_THROW(StateVector({2}, v / std::sqrt(2.0), true));
  EXPECT_NEAR(StateVector({2}, v).normalize().norm(), 1.0, 1e-15);
  EXPECT_THROW(StateVector({2}, Vector::Zero(2)).normalize(), ZeroNormError);
}

TEST(State, multi_index_access_is_row_major_with_mirror_last) {
  Vector v = Vector::Zero(6);
  v(1 * 3 + 2) = 1.0;
  StateVector s({2, 3}, v, true);
  const std::size_t idx[] = {1, 2};
  EXPECT_EQ(s.at(idx), Complex(1.0, 0.0));
  EXPECT_EQ(strides({2, 3, 4}), (std::vector<std::size_t>{12, 4, 1}));
}

TEST(State, density_invariants) {
  Matrix m = Matrix::Identity(2, 2) * 0.5;
  EXPECT_NO_THROW(DensityOperator({2}, m));
  Matrix bad_trace = Matrix::Identity(2, 2);
  EXPECT_THROW(DensityOperator({2}, bad_trace), Error);
  Matrix non_herm = m;
  non_herm(0, 1) = Complex(0.0, 0.1);
  EXPECT_THROW(DensityOperator({2}, non_herm), Error);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  DensityOperator d({2}, neg);
  EXPECT_NEAR(d.min_eigenvalue(), -0.5, 1e-14);
  EXPECT_THROW(d.check_positive(), Error);
}

TEST(Fock, ladder_matrices) {
  const Matrix a2 = annihilation_matrix(2);
  EXPECT_EQ(a2(0, 1), Complex(1.0, 0.0));
  EXPECT_EQ(a2(0, 0), Complex(0.0, 0.0));
  EXPECT_EQ(a2(1, 0), Complex(0.0, 0.0));
  EXPECT_EQ(a2(1, 1), Complex(0.0, 0.0));

  const std::size_t dim = 7;
  const Matrix a = annihilation_matrix(dim);
  const Matrix num = number_matrix(dim);
  EXPECT_LT((a.adjoint() * a - num).norm(), 1e-14);
  for (std::size_t n = 0; n < dim; ++n) {
    EXPECT_LT((num * basis(dim, n) - static_cast<double>(n) * basis(dim, n)).norm(), 1e-14);
  }
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  for (std::size_t n = 0; n + 1 < dim; ++n) EXPECT_NEAR(comm(n, n).real(), 1.0, 1e-14);
  EXPECT_NEAR(comm(dim - 1, dim - 1).real(), 1.0 - static_cast<double>(dim), 1e-14);
}

TEST(Fock, coherent_vacuum) {
  const CoherentState c = coherent_state(0.0, 5);
  EXPECT_LT((c.state.amplitudes() - basis(5, 0)).norm(), 1e-15);
  EXPECT_EQ(c.truncation_loss, 0.0);
}

TEST(Fock, coherent_poisson_weight) {
  const Vector v = coherent_amplitudes(2.0, 16);
  EXPECT_NEAR(std::norm(v(2)), 8.0 * std::exp(-4.0), 1e-15);
  EXPECT_NEAR(std::norm(v(2)), 0.1465251111, 1e-10);
}

TEST(Fock, coherent_matches_series) {
  for (Complex amp : {Complex(2.0, 0.0), Complex(-1.3, 0.7), Complex(0.0, 3.5), Complex(5.0, 5.0)}) {
    const Vector a = coherent_amplitudes(amp, 90);
    const Vector b = series_coherent(amp, 90);
    EXPECT_LT((a - b).norm(), 1e-13) << amp;
  }
}

TEST(Fock, coherent_large_amplitude_does_not_underflow) {
  const Vector v = coherent_amplitudes(30.0, 1200);
  EXPECT_NEAR(v.squaredNorm(), 1.0, 1e-12);
  EXPECT_GT(std::abs(v(900)), 0.0);
}

TEST(Fock, coherent_truncation_error) {
  EXPECT_THROW(coherent_state(2.0, 4, 1e-10), TruncationError);
  try {
    coherent_state(2.0, 4, 1e-10);
  } catch (const TruncationError& e) {
    EXPECT_EQ(e.dim(), 4u);
    EXPECT_GT(e.needed_dim(), 4u);
    EXPECT_NEAR(e.loss(), coherent_tail(2.0, 4), 1e-15);
    EXPECT_NE(std::string(e.what()).find("coherent"), std::string::npos);
  }
}

TEST(Fock, truncation_monotone_and_renormalized) {
  double prev = 1.0;
  for (std::size_t d = 1; d < 40; ++d) {
    const double tail = coherent_tail(2.5, d);
    EXPECT_LE(tail, prev);
    prev = tail;
    const CoherentState c = coherent_state(2.5, d, 1.0);
    EXPECT_NEAR(c.state.norm(), 1.0, 1e-12);
    EXPECT_NEAR(c.truncation_loss, tail, 1e-12);
  }
}

TEST(Fock, dim_rules) {
  const std::size_t d = dim_for_amplitude(2.0, 1e-12);
  EXPECT_LT(coherent_tail(2.0, d), 1e-12);
  EXPECT_GE(coherent_tail(2.0, d - 1), 1e-12);
  const double w[] = {0.5, 0.5};
  const double r[] = {0.0, 3.0};
  const std::size_t m = weighted_dim(w, r, 1e-10);
  EXPECT_LT(0.5 * coherent_tail(3.0, m), 1e-10);
  EXPECT_GE(0.5 * coherent_tail(3.0, m - 1), 1e-10);
}

TEST(Fock, displacement_maps_vacuum_to_coherent) {
  const Complex amp(0.8, -1.1);
  const Matrix d = displacement_matrix(amp, 40);
  EXPECT_LT((d.col(0) - series_coherent(amp, 40)).norm(), 1e-13);
  // Exact elements: the guarded block is unitary.
  const Matrix g = d.adjoint() * d;
  EXPECT_LT((g.topLeftCorner(10, 10) - Matrix::Identity(10, 10)).norm(), 1e-10);
}

TEST(Fock, displacement_matches_matrix_exponential) {
  const Complex amp(0.6, 0.4);
  const std::size_t big = 80, small = 10;
  const Matrix a = annihilation_matrix(big);
  const Matrix gen = amp * a.adjoint() - std::conj(amp) * a;
  // Anti-Hermitian generator: exponentiate i * (Hermitian).
  Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0.0, -1.0) * gen);
  const Vector ph = (Complex(0.0, 1.0) * es.eigenvalues().cast<Complex>()).array().exp();
  const Matrix expd = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
  const Matrix d = displacement_matrix(amp, small);
  EXPECT_LT((d - expd.topLeftCorner(small, small)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Metrics, product_state_reduces_to_pure) {
  const StateVector a = coherent_state(Complex(1.0, 0.5), 20).state;
  const StateVector b = coherent_state(Complex(-0.5, 0.2), 15).state;
  const StateVector ab = tensor_product(a, b);
  EXPECT_EQ(ab.mode_dims(), (Dims{20, 15}));
  EXPECT_NEAR(purity(partial_trace(ab, {0})), 1.0, 1e-12);
  EXPECT_NEAR(purity(partial_trace(ab, {1})), 1.0, 1e-12);
  EXPECT_NEAR(fidelity(partial_trace(ab, {1}), b), 1.0, 1e-12);
}

TEST(Metrics, bell_state_reduces_to_identity_half) {
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const StateVector bell({2, 2}, v, true);
  for (std::size_t keep : {0u, 1u}) {
    const DensityOperator r = partial_trace(bell, {keep});
    EXPECT_LT((r.matrix() - 0.5 * Matrix::Identity(2, 2)).norm(), 1e-15);
    EXPECT_NEAR(linear_entropy(r), 0.5, 1e-15);
  }
  EXPECT_NEAR(reduced_linear_entropy(bell, {1}), 0.5, 1e-15);
}

TEST(Metrics, partial_trace_of_product_density) {
  Matrix ma(2, 2), mb(3, 3);
  ma << 0.7, Complex(0.1, 0.2), Complex(0.1, -0.2), 0.3;
  mb << 0.5, 0.1, 0.0, 0.1, 0.3, Complex(0.0, 0.05), 0.0, Complex(0.0, -0.05), 0.2;
  const DensityOperator a({2}, ma), b({3}, mb);
  const DensityOperator ab = tensor_product(a, b);
  EXPECT_LT((partial_trace(ab, {0}).matrix() - ma).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((partial_trace(ab, {1}).matrix() - mb).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(partial_trace(ab, {1}).trace(), ab.trace(), 1e-14);
  EXPECT_THROW(partial_trace(ab, {2}), DimensionError);
}

TEST(Metrics, partial_trace_density_and_pure_paths_agree) {
  Vector v(12);
  for (int i = 0; i < 12; ++i) v(i) = Complex(std::sin(1.0 + i), std::cos(2.0 * i));
  const StateVector psi = StateVector({3, 4}, v).normalize();
  const DensityOperator rho = DensityOperator::from_pure(psi);
  for (std::size_t keep : {0u, 1u}) {
    EXPECT_LT((partial_trace(rho, {keep}).matrix() - partial_trace(psi, {keep}).matrix()).norm(), 1e-14);
  }
}

TEST(Metrics, fidelity_and_distance_limits) {
  const StateVector f1 = basis_state(4, 1), f2 = basis_state(4, 2);
  EXPECT_NEAR(fidelity(f1, f1), 1.0, 1e-15);
  EXPECT_NEAR(fidelity(f1, f2), 0.0, 1e-15);
  EXPECT_NEAR(trace_distance(f1, f1), 0.0, 1e-7);
  EXPECT_NEAR(trace_distance(f1, f2), 1.0, 1e-15);
  const DensityOperator r1 = DensityOperator::from_pure(f1), r2 = DensityOperator::from_pure(f2);
  EXPECT_NEAR(fidelity(r1, r1), 1.0, 1e-7);
  EXPECT_NEAR(fidelity(r1, r2), 0.0, 1e-12);
  EXPECT_NEAR(trace_distance(r1, r2), 1.0, 1e-12);
  EXPECT_NEAR(trace_distance(r1, r1), 0.0, 1e-12);
  EXPECT_THROW(fidelity(f1, basis_state(5, 1)), DimensionError);
}

TEST(Metrics, coherent_overlap_identity) {
  for (double a : {0.3, 1.0, 1.5}) {
    const StateVector p = coherent_state(a, 40).state, m = coherent_state(-a, 40).state;
    EXPECT_NEAR(fidelity(p, m), std::exp(-4.0 * a * a), 1e-12);
  }
}

TEST(Metrics, mixed_fidelity_matches_pure_formula) {
  const StateVector a = coherent_state(Complex(0.4, 0.1), 20).state;
  const StateVector b = coherent_state(Complex(-0.2, 0.3), 20).state;
  const DensityOperator ra = DensityOperator::from_pure(a), rb = DensityOperator::from_pure(b);
  EXPECT_NEAR(fidelity(ra, rb), fidelity(a, b), 1e-6);
  EXPECT_NEAR(fidelity(a, rb), fidelity(a, b), 1e-12);
  Matrix mix = 0.5 * (ra.matrix() + rb.matrix());
  const DensityOperator rm({20}, mix);
  EXPECT_NEAR(fidelity(a, rm), 0.5 * (1.0 + fidelity(a, b)), 1e-12);
  EXPECT_NEAR(linear_entropy(DensityOperator({2}, 0.5 * Matrix::Identity(2, 2))), 0.5, 1e-15);
}
