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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "optomech/params.hpp"

namespace optomech {

using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Ordered truncation dimensions of a tensor-product space. Field modes come
/// first (c1, c2, ...), the mirror is always the last mode.
using Dims = std::vector<std::size_t>;

struct ModeSpec {
  std::size_t dim = 1;
  std::string label;
};

/// Product of the entries of `dims`; throws DimensionError on an empty list or a zero entry.
std::size_t total_dim(const Dims& dims);

/// Row-major strides for `dims` (last mode fastest).
std::vector<std::size_t> strides(const Dims& dims);

/// Pure state over a tensor product of truncated Fock spaces.
class StateVector {
 public:
  /// Tolerance on |sum |c|^2 - 1| for states flagged as normalized.
  static constexpr double kNormTolerance = 1e-10;

  StateVector(Dims mode_dims, Vector amplitudes, bool normalized = false);

  const Dims& mode_dims() const { return mode_dims_; }
  const Vector& amplitudes() const { return amplitudes_; }
  bool normalized() const { return normalized_; }
  std::size_t size() const { return static_cast<std::size_t>(amplitudes_.size()); }
  std::size_t mode_count() const { return mode_dims_.size(); }

  double norm() const { return amplitudes_.norm(); }

  /// Amplitude at the multi-index `idx` (one entry per mode).
  Complex at(std::span<const std::size_t> idx) const;

  /// Copy scaled to unit norm. Throws ZeroNormError on a zero vector.
  StateVector normalize() const;

 private:
  Dims mode_dims_;
  Vector amplitudes_;
  bool normalized_;
};

/// Hermitian, unit-trace operator on a tensor product of truncated Fock spaces.
class DensityOperator {
 public:
  static constexpr double kHermitianTolerance = 1e-10;
  static constexpr double kTraceTolerance = 1e-8;

  DensityOperator(Dims mode_dims, Matrix matrix);

  static DensityOperator from_pure(const StateVector& psi);

  const Dims& mode_dims() const { return mode_dims_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t mode_count() const { return mode_dims_.size(); }

  double trace() const { return matrix_.trace().real(); }

  /// Smallest eigenvalue (dense eigensolve; intended for small dims).
  double min_eigenvalue() const;

  /// Throws Error unless every eigenvalue is >= -tolerance.
  void check_positive(double tolerance = 1e-8) const;

 private:
  Dims mode_dims_;
  Matrix matrix_;
};

}  // namespace optomech
