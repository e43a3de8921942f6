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

#include "optomech/state.hpp"

#include <cmath>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

std::size_t total_dim(const Dims& dims) {
  if (dims.empty()) throw DimensionError("mode list is empty");
  std::size_t n = 1;
  for (std::size_t d : dims) {
    if (d == 0) throw DimensionError("mode dimension must be >= 1");
    n *= d;
  }
  return n;
}

std::vector<std::size_t> strides(const Dims& dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

StateVector::StateVector(Dims mode_dims, Vector amplitudes, bool normalized)
    : mode_dims_(std::move(mode_dims)), amplitudes_(std::move(amplitudes)), normalized_(normalized) {
  if (total_dim(mode_dims_) != static_cast<std::size_t>(amplitudes_.size())) {
    throw DimensionError("amplitude count " + std::to_string(amplitudes_.size()) +
                         " does not match the product of mode dims " +
                         std::to_string(total_dim(mode_dims_)));
  }
  if (normalized_ && std::abs(amplitudes_.squaredNorm() - 1.0) > kNormTolerance) {
    throw Error("state flagged as normalized has squared norm " +
                std::to_string(amplitudes_.squaredNorm()));
  }
}

Complex StateVector::at(std::span<const std::size_t> idx) const {
  if (idx.size() != mode_dims_.size()) throw DimensionError("index rank mismatch");
  const auto s = strides(mode_dims_);
  std::size_t flat = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= mode_dims_[i]) throw DimensionError("index out of range");
    flat += idx[i] * s[i];
  }
  return amplitudes_(static_cast<Eigen::Index>(flat));
}

StateVector StateVector::normalize() const {
  const double n = amplitudes_.norm();
  if (!(n > 0.0)) throw ZeroNormError("cannot normalize a zero vector");
  return StateVector(mode_dims_, amplitudes_ / n, true);
}

DensityOperator::DensityOperator(Dims mode_dims, Matrix matrix)
    : mode_dims_(std::move(mode_dims)), matrix_(std::move(matrix)) {
  const std::size_t n = total_dim(mode_dims_);
  if (static_cast<std::size_t>(matrix_.rows()) != n ||
      static_cast<std::size_t>(matrix_.cols()) != n) {
    throw DimensionError("density matrix side does not match the product of mode dims");
  }
  const double asym = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (asym > kHermitianTolerance) {
    throw Error("density matrix is not Hermitian (max deviation " + std::to_string(asym) + ")");
  }
  if (std::abs(trace() - 1.0) > kTraceTolerance) {
    throw Error("density matrix trace is " + std::to_string(trace()));
  }
}

DensityOperator DensityOperator::from_pure(const StateVector& psi) {
  const Vector v = psi.amplitudes() / psi.norm();
  return DensityOperator(psi.mode_dims(), v * v.adjoint());
}

double DensityOperator::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityOperator::check_positive(double tolerance) const {
  const double lo = min_eigenvalue();
  if (lo < -tolerance) {
    throw Error("density matrix has negative eigenvalue " + std::to_string(lo));
  }
}

}  // namespace optomech
