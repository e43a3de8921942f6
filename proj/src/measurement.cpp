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

#include "optomech/measurement.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kZeroOutcome = 1e-300;

void require_joint(const StateVector& joint) {
  if (joint.mode_count() < 2) throw DimensionError("joint state needs field and mirror modes");
}

// Rows: all modes but the last; columns: the last mode.
Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
split_last(const StateVector& joint) {
  const std::size_t last = joint.mode_dims().back();
  return {joint.amplitudes().data(), static_cast<Eigen::Index>(joint.size() / last),
          static_cast<Eigen::Index>(last)};
}

// Rows: the first mode; columns: everything after it.
Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
split_first(const StateVector& joint) {
  const std::size_t first = joint.mode_dims().front();
  return {joint.amplitudes().data(), static_cast<Eigen::Index>(first),
          static_cast<Eigen::Index>(joint.size() / first)};
}

}  // namespace

double hermite_position_amplitude(double x, std::size_t n) {
  return position_amplitudes(x, n + 1)(static_cast<Eigen::Index>(n));
}

RealVector position_amplitudes(double x, std::size_t dim) {
  RealVector psi(dim);
  if (dim == 0) return psi;
  // x <x|n> = sqrt(n) <x|n-1> + sqrt(n+1) <x|n+1>, run on rescaled values so that
  // e^{-x^2/4} cannot underflow before the recursion climbs out of it.
  constexpr double kRescale = 1e150;
  double log_scale = -0.25 * std::log(2.0 * std::numbers::pi) - 0.25 * x * x;
  double prev = 0.0, cur = 1.0;
  psi(0) = std::exp(log_scale);
  for (std::size_t n = 0; n + 1 < dim; ++n) {
    const double nn = static_cast<double>(n);
    const double next = (x * cur - std::sqrt(nn) * prev) / std::sqrt(nn + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescale) {
      prev /= kRescale;
      cur /= kRescale;
      log_scale += std::log(kRescale);
    }
    psi(n + 1) = cur * std::exp(log_scale);
  }
  return psi;
}

Complex coherent_position_amplitude(double x, Complex amp) {
  const double re = amp.real();
  const double im = amp.imag();
  const double gauss = std::pow(2.0 * std::numbers::pi, -0.25) * std::exp(-0.25 * (x - 2.0 * re) * (x - 2.0 * re));
  return gauss * std::exp(Complex(0.0, im * x - re * im));
}

FieldProjection project_mirror_position(const StateVector& joint, double x, double t) {
  require_joint(joint);
  const auto m = split_last(joint);
  const Vector bra = position_amplitudes(x, joint.mode_dims().back()).cast<Complex>();
  const Vector rest = m * bra;
  const double density = rest.squaredNorm() / joint.amplitudes().squaredNorm();
  if (!(density > kZeroOutcome)) {
    throw ZeroNormError("mirror position outcome x=" + std::to_string(x) + " has zero probability");
  }
  Dims dims(joint.mode_dims().begin(), joint.mode_dims().end() - 1);
  return {StateVector(std::move(dims), rest / rest.norm(), true),
          {MeasurementTarget::mirror_position, x, t, density}};
}

MirrorProjection project_field_quadrature(const StateVector& joint, double x, double t) {
  require_joint(joint);
  const auto m = split_first(joint);
  const Vector bra = position_amplitudes(x, joint.mode_dims().front()).cast<Complex>();
  const Vector rest = m.transpose() * bra;
  const double density = rest.squaredNorm() / joint.amplitudes().squaredNorm();
  if (!(density > kZeroOutcome)) {
    throw ZeroNormError("field quadrature outcome x=" + std::to_string(x) + " has zero probability");
  }
  Dims dims(joint.mode_dims().begin() + 1, joint.mode_dims().end());
  return {StateVector(std::move(dims), rest / rest.norm(), true),
          {MeasurementTarget::field_quadrature, x, t, density}};
}

MirrorDensityProjection project_field_quadrature(const DensityOperator& joint, double x, double t) {
  if (joint.mode_count() < 2) throw DimensionError("joint state needs field and mirror modes");
  const std::size_t F = joint.mode_dims().front();
  const std::size_t R = joint.size() / F;
  const RealVector bra = position_amplitudes(x, F);
  Matrix out = Matrix::Zero(R, R);
  for (std::size_t n = 0; n < F; ++n) {
    for (std::size_t m = 0; m < F; ++m) {
      out += (bra(n) * bra(m)) * joint.matrix().block(n * R, m * R, R, R);
    }
  }
  const double density = out.trace().real();
  if (!(density > kZeroOutcome)) {
    throw ZeroNormError("field quadrature outcome x=" + std::to_string(x) + " has zero probability");
  }
  out /= density;
  out = 0.5 * (out + out.adjoint()).eval();
  Dims dims(joint.mode_dims().begin() + 1, joint.mode_dims().end());
  return {DensityOperator(std::move(dims), std::move(out)),
          {MeasurementTarget::field_quadrature, x, t, density}};
}

std::vector<double> outcome_density(const StateVector& joint, MeasurementTarget target,
                                    std::span<const double> grid) {
  require_joint(joint);
  const bool mirror = target == MeasurementTarget::mirror_position;
  const std::size_t dim = mirror ? joint.mode_dims().back() : joint.mode_dims().front();
  const double total = joint.amplitudes().squaredNorm();
  std::vector<double> density(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vector bra = position_amplitudes(grid[i], dim).cast<Complex>();
    const Vector rest = mirror ? Vector(split_last(joint) * bra) : Vector(split_first(joint).transpose() * bra);
    density[i] = rest.squaredNorm() / total;
  }
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    mass += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  if (grid.size() < 2 || 1.0 - mass > 1e-3) {
    throw GridError("outcome grid captures only " + std::to_string(mass) +
                    " of the probability; widen it");
  }
  return density;
}

}  // namespace optomech
