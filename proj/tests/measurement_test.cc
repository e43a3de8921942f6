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
#include <vector>

#include "optomech/errors.hpp"
#include "optomech/evolution.hpp"
#include "optomech/fock.hpp"
#include "optomech/measurement.hpp"
#include "optomech/metrics.hpp"
#include "test_util.hpp"

using namespace optomech;
using optomech::testing::basis_state;
using optomech::testing::series_coherent;

namespace {

constexpr double kPi = std::numbers::pi;

ScaledParams params(double k, Complex alpha, Complex beta) {
  ScaledParams p;
  p.k = k;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

JointState near_fock_joint() {
  const ScaledParams p = params(1.0, 2.0, 2.0);
  const TruncationDims d = default_dims(p);
  return joint_state(p, kPi, d.field, d.mirror);
}

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double x = lo; x <= hi + 1e-12; x += step) g.push_back(x);
  return g;
}

}  // namespace

TEST(Position, odd_parity_vanishes_at_origin) {
  EXPECT_EQ(hermite_position_amplitude(0.0, 1), 0.0);
  EXPECT_EQ(hermite_position_amplitude(0.0, 3), 0.0);
  EXPECT_NEAR(hermite_position_amplitude(0.0, 0), std::pow(2 * kPi, -0.25), 1e-16);
}

TEST(Position, orthonormality) {
  const double h = 0.01;
  const std::size_t dim = 11;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  for (double x : grid(-20.0, 20.0, h)) {
    const RealVector v = position_amplitudes(x, dim);
    gram += h * v * v.transpose();
  }
  EXPECT_LT((gram - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Position, fock_series_reproduces_coherent_wavefunction) {
  for (Complex amp : {Complex(1.0, 0.0), Complex(-0.7, 1.2), Complex(2.0, -1.0)}) {
    const Vector c = series_coherent(amp, 60);
    for (double x : {-3.0, -0.5, 0.0, 1.7, 4.2}) {
      const Complex series = position_amplitudes(x, 60).cast<Complex>().dot(c.conjugate());
      // dot conjugates its first argument; undo to get sum_n <x|n> c_n.
      const Complex direct = std::conj(series);
      EXPECT_LT(std::abs(direct - coherent_position_amplitude(x, amp)), 1e-8) << amp << " x=" << x;
      EXPECT_NEAR(std::norm(direct), std::exp(-0.5 * std::pow(x - 2 * amp.real(), 2)) / std::sqrt(2 * kPi), 1e-8);
    }
  }
}

TEST(MirrorProjection, origin_gives_near_single_photon) {
  const FieldProjection fp = project_mirror_position(near_fock_joint().state, 0.0, kPi);
  const Vector& a = fp.field_state.amplitudes();
  EXPECT_NEAR(fp.field_state.norm(), 1.0, 1e-10);
  // e^{-4}|0> - 2|1> + 2 sqrt(2) e^{-4}|2> - (8/sqrt 6) e^{-16}|3> + ...
  EXPECT_LT(std::abs(a(0) / a(1) - Complex(-std::exp(-4.0) / 2.0, 0.0)), 1e-12);
  EXPECT_LT(std::abs(a(2) / a(1) - Complex(-std::sqrt(2.0) * std::exp(-4.0), 0.0)), 1e-12);
  EXPECT_LT(std::abs(a(3) / a(1)), 1e-6);
  const double f = fidelity(fp.field_state, basis_state(a.size(), 1));
  EXPECT_GE(f, 0.999);
  EXPECT_NEAR(f, 1.0 / (1.0 + std::exp(-8.0) / 4.0 + 2.0 * std::exp(-8.0)), 1e-9);
  EXPECT_EQ(fp.record.target, MeasurementTarget::mirror_position);
  EXPECT_EQ(fp.record.x, 0.0);
  EXPECT_GT(fp.record.norm, 0.0);
}

TEST(MirrorProjection, far_outcome_selects_five_photons) {
  const FieldProjection fp = project_mirror_position(near_fock_joint().state, 16.0, kPi);
  const Vector& a = fp.field_state.amplitudes();
  Eigen::Index best = 0;
  a.cwiseAbs2().maxCoeff(&best);
  EXPECT_EQ(best, 5);
  EXPECT_GE(std::norm(a(5)), 0.99);
  // Neighbours n=4 and n=6 sit 4 units away: weights (p_n/p_5) e^{-8}.
  const double w4 = 5.0 / 4.0 * std::exp(-8.0), w6 = 4.0 / 6.0 * std::exp(-8.0);
  EXPECT_NEAR(std::norm(a(5)), 1.0 / (1.0 + w4 + w6), 1e-6);
}

TEST(MirrorProjection, midway_outcome_gives_adjacent_superposition) {
  const FieldProjection fp = project_mirror_position(near_fock_joint().state, 2.0, kPi);
  const Vector& a = fp.field_state.amplitudes();
  EXPECT_LT(std::abs(a(2) / a(1) - Complex(-std::sqrt(2.0), 0.0)), 1e-12);
  EXPECT_GE(std::norm(a(1)) + std::norm(a(2)), 1.0 - 1e-6);
}

TEST(MirrorProjection, zero_probability_outcome) {
  const StateVector joint = tensor_product(basis_state(3, 0), basis_state(10, 0));
  EXPECT_THROW(project_mirror_position(joint, 60.0, 0.0), ZeroNormError);
}

TEST(MirrorProjection, idempotent) {
  const ScaledParams p = params(0.6, 1.2, 0.8);
  const TruncationDims d = default_dims(p);
  const JointState js = joint_state(p, kPi, d.field, d.mirror);
  const double x = 1.3;
  const FieldProjection first = project_mirror_position(js.state, x, kPi);
  const StateVector pointer =
      StateVector({d.mirror}, position_amplitudes(x, d.mirror).cast<Complex>()).normalize();
  const FieldProjection second = project_mirror_position(tensor_product(first.field_state, pointer), x, kPi);
  EXPECT_GE(fidelity(first.field_state, second.field_state), 1.0 - 1e-10);
}

TEST(MirrorProjection, peak_spacing_grows_with_coupling) {
  for (double k : {0.5, 1.0, 1.5}) {
    const ScaledParams p = params(k, 1.0, 2.0);
    for (int n = 0; n < 5; ++n) {
      const double xn = 2.0 * mirror_amplitude(n, p, kPi).real();
      const double xn1 = 2.0 * mirror_amplitude(n + 1, p, kPi).real();
      EXPECT_NEAR(xn1 - xn, 4.0 * k, 1e-13);
    }
  }
}

TEST(MirrorProjection, completeness_over_outcomes) {
  const ScaledParams p = params(0.5, 1.0, 0.5);
  const JointState js = joint_state(p, kPi, 14, 160);
  const DensityOperator field = partial_trace(js.state, {0});
  Matrix mix = Matrix::Zero(14, 14);
  const double h = 0.01;
  for (double x : grid(-20.0, 25.0, h)) {
    const FieldProjection fp = project_mirror_position(js.state, x, kPi);
    mix += h * fp.record.norm * fp.field_state.amplitudes() * fp.field_state.amplitudes().adjoint();
  }
  EXPECT_LT(trace_distance(DensityOperator({14}, mix / mix.trace().real()), field), 1e-6);
}

TEST(FieldProjection, mirror_state_is_normalized) {
  const ScaledParams p = params(1.0, 0.8, 2.0);
  const TruncationDims d = default_dims(p);
  const JointState js = joint_state(p, kPi, d.field, d.mirror);
  for (double x : {-2.0, 0.0, 0.5, 3.0}) {
    const MirrorProjection mp = project_field_quadrature(js.state, x, kPi);
    EXPECT_NEAR(mp.mirror_state.norm(), 1.0, 1e-10);
    EXPECT_EQ(mp.record.target, MeasurementTarget::field_quadrature);
  }
}

TEST(FieldProjection, matches_series_formula) {
  const ScaledParams p = params(1.0, 0.8, 2.0);
  const TruncationDims d = default_dims(p);
  const std::size_t f = d.field, m = d.mirror;
  const JointState js = joint_state(p, kPi, f, m);
  const double x = 0.7;
  const MirrorProjection mp = project_field_quadrature(js.state, x, kPi);
  const Vector c = series_coherent(p.alpha, f);
  Vector expect = Vector::Zero(m);
  for (std::size_t n = 0; n < f; ++n) {
    expect += c(n) * std::exp(Complex(0.0, kPi * n * n)) * hermite_position_amplitude(x, n) *
              series_coherent(mirror_amplitude(n, p, kPi), m);
  }
  EXPECT_GE(optomech::testing::overlap_fidelity(mp.mirror_state.amplitudes(), expect), 1.0 - 1e-12);
}

TEST(FieldProjection, vacuum_field_leaves_coherent_mirror) {
  const ScaledParams p = params(1.0, 0.0, 2.0);
  const JointState js = joint_state(p, kPi, 4, 40);
  const MirrorProjection mp = project_field_quadrature(js.state, 0.3, kPi);
  EXPECT_GE(fidelity(mp.mirror_state, coherent_state(mirror_amplitude(0, p, kPi), 40).state), 1.0 - 1e-12);
}

TEST(FieldProjection, density_overload_agrees_with_pure) {
  const ScaledParams p = params(0.7, 0.9, 1.0);
  const JointState js = joint_state(p, kPi, 12, 240);
  const MirrorProjection pure = project_field_quadrature(js.state, 0.4, kPi);
  const MirrorDensityProjection mixed =
      project_field_quadrature(DensityOperator::from_pure(js.state), 0.4, kPi);
  EXPECT_GE(fidelity(pure.mirror_state, mixed.mirror_state), 1.0 - 1e-10);
  EXPECT_NEAR(pure.record.norm, mixed.record.norm, 1e-12);
}

TEST(OutcomeDensity, mirror_density_is_poisson_mixture_of_gaussians) {
  const JointState js = near_fock_joint();
  const std::vector<double> xs = grid(-15.0, 110.0, 0.05);
  const std::vector<double> dens = outcome_density(js.state, MeasurementTarget::mirror_position, xs);
  double mass = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double expect = 0.0;
    for (int n = 0; n < 26; ++n) {
      const double pn = std::exp(-4.0 + n * std::log(4.0) - std::lgamma(n + 1.0));
      expect += pn * std::exp(-0.5 * std::pow(xs[i] - (4.0 * n - 4.0), 2)) / std::sqrt(2 * kPi);
    }
    EXPECT_NEAR(dens[i], expect, 1e-10);
    EXPECT_GE(dens[i], 0.0);
    if (i > 0) mass += 0.5 * 0.05 * (dens[i] + dens[i - 1]);
  }
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(OutcomeDensity, vacuum_field_gives_single_gaussian) {
  const ScaledParams p = params(0.5, 0.0, Complex(1.5, 0.5));
  const JointState js = joint_state(p, 0.0, 2, 40);
  const std::vector<double> xs = grid(-10.0, 15.0, 0.05);
  const std::vector<double> dens = outcome_density(js.state, MeasurementTarget::mirror_position, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    EXPECT_NEAR(dens[i], std::exp(-0.5 * std::pow(xs[i] - 3.0, 2)) / std::sqrt(2 * kPi), 1e-10);
  }
}

TEST(OutcomeDensity, field_quadrature_integrates_to_one) {
  const ScaledParams p = params(1.0, 0.8, 2.0);
  const TruncationDims d = default_dims(p);
  const JointState js = joint_state(p, kPi, d.field, d.mirror);
  const std::vector<double> xs = grid(-12.0, 12.0, 0.02);
  const std::vector<double> dens = outcome_density(js.state, MeasurementTarget::field_quadrature, xs);
  double mass = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) mass += 0.5 * 0.02 * (dens[i] + dens[i - 1]);
  EXPECT_NEAR(mass, 1.0, 1e-6);
}

TEST(OutcomeDensity, narrow_grid_is_rejected) {
  const JointState js = near_fock_joint();
  EXPECT_THROW(outcome_density(js.state, MeasurementTarget::mirror_position, grid(-2.0, 2.0, 0.1)), GridError);
}
