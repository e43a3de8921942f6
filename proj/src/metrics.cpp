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

#include "optomech/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require_same_dims(const Dims& a, const Dims& b) {
  if (a != b) throw DimensionError("operands have different mode dimensions");
}

// Splits every flat index into (kept part, traced part) flat indices.
struct Split {
  Dims keep_dims;
  Dims trace_dims;
  std::vector<std::size_t> keep_index;
  std::vector<std::size_t> trace_index;
};

Split split_indices(const Dims& dims, std::vector<std::size_t>& keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  if (keep.empty()) throw DimensionError("partial trace must keep at least one mode");
  for (std::size_t k : keep) {
    if (k >= dims.size()) throw DimensionError("partial trace mode index out of range");
  }
  Split s;
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t k : keep) kept[k] = true;
  for (std::size_t i = 0; i < dims.size(); ++i) (kept[i] ? s.keep_dims : s.trace_dims).push_back(dims[i]);
  if (s.trace_dims.empty()) s.trace_dims.push_back(1);

  const std::size_t n = total_dim(dims);
  s.keep_index.resize(n);
  s.trace_index.resize(n);
  std::vector<std::size_t> idx(dims.size(), 0);
  for (std::size_t flat = 0; flat < n; ++flat) {
    std::size_t ki = 0;
    std::size_t ti = 0;
    for (std::size_t m = 0; m < dims.size(); ++m) {
      if (kept[m]) {
        ki = ki * dims[m] + idx[m];
      } else {
        ti = ti * dims[m] + idx[m];
      }
    }
    s.keep_index[flat] = ki;
    s.trace_index[flat] = ti;
    for (std::size_t m = dims.size(); m-- > 0;) {
      if (++idx[m] < dims[m]) break;
      idx[m] = 0;
    }
  }
  return s;
}

Matrix hermitian_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

StateVector tensor_product(std::span<const StateVector> parts) {
  if (parts.empty()) throw DimensionError("tensor product of nothing");
  Dims dims = parts.front().mode_dims();
  Vector v = parts.front().amplitudes();
  bool normalized = parts.front().normalized();
  for (std::size_t p = 1; p < parts.size(); ++p) {
    const Vector& w = parts[p].amplitudes();
    Vector next(v.size() * w.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) next.segment(i * w.size(), w.size()) = v(i) * w;
    v = std::move(next);
    dims.insert(dims.end(), parts[p].mode_dims().begin(), parts[p].mode_dims().end());
    normalized = normalized && parts[p].normalized();
  }
  return StateVector(std::move(dims), std::move(v), normalized);
}

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  const StateVector parts[] = {a, b};
  return tensor_product(std::span<const StateVector>(parts));
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  Dims dims = a.mode_dims();
  dims.insert(dims.end(), b.mode_dims().begin(), b.mode_dims().end());
  return DensityOperator(std::move(dims), kron(a.matrix(), b.matrix()));
}

DensityOperator partial_trace(const DensityOperator& rho, std::vector<std::size_t> keep) {
  const Split s = split_indices(rho.mode_dims(), keep);
  const std::size_t nk = total_dim(s.keep_dims);
  const std::size_t nt = total_dim(s.trace_dims);
  // Gather rows/cols by (keep, trace) so the trace runs over matching trace indices.
  std::vector<std::size_t> flat_of(nk * nt);
  for (std::size_t f = 0; f < flat_of.size(); ++f) flat_of[s.keep_index[f] * nt + s.trace_index[f]] = f;
  Matrix out = Matrix::Zero(nk, nk);
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < nk; ++i) {
    for (std::size_t j = 0; j < nk; ++j) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < nt; ++t) acc += m(flat_of[i * nt + t], flat_of[j * nt + t]);
      out(i, j) = acc;
    }
  }
  return DensityOperator(s.keep_dims, hermitize(out));
}

namespace {

// Rows indexed by kept modes, columns by traced modes.
Matrix reshape_pure(const StateVector& psi, const Split& s) {
  const std::size_t nk = total_dim(s.keep_dims);
  const std::size_t nt = total_dim(s.trace_dims);
  Matrix m(nk, nt);
  const Vector& v = psi.amplitudes();
  for (std::size_t f = 0; f < psi.size(); ++f) m(s.keep_index[f], s.trace_index[f]) = v(f);
  return m;
}

}  // namespace

DensityOperator partial_trace(const StateVector& psi, std::vector<std::size_t> keep) {
  const Split s = split_indices(psi.mode_dims(), keep);
  const Matrix m = reshape_pure(psi, s) / psi.norm();
  return DensityOperator(s.keep_dims, hermitize(m * m.adjoint()));
}

double purity(const DensityOperator& rho) {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.matrix().squaredNorm();
}

double linear_entropy(const DensityOperator& rho) { return 1.0 - purity(rho); }

double reduced_linear_entropy(const StateVector& psi, std::vector<std::size_t> keep) {
  const Split s = split_indices(psi.mode_dims(), keep);
  const Matrix m = reshape_pure(psi, s) / psi.norm();
  const Matrix small = m.rows() <= m.cols() ? Matrix(m * m.adjoint()) : Matrix(m.adjoint() * m);
  return 1.0 - small.squaredNorm();
}

double fidelity(const StateVector& a, const StateVector& b) {
  require_same_dims(a.mode_dims(), b.mode_dims());
  const Complex ov = a.amplitudes().dot(b.amplitudes());
  return std::norm(ov) / (a.amplitudes().squaredNorm() * b.amplitudes().squaredNorm());
}

double fidelity(const StateVector& psi, const DensityOperator& rho) {
  require_same_dims(psi.mode_dims(), rho.mode_dims());
  const Vector& v = psi.amplitudes();
  return std::clamp(v.dot(rho.matrix() * v).real() / v.squaredNorm(), 0.0, 1.0);
}

double fidelity(const DensityOperator& rho, const StateVector& psi) { return fidelity(psi, rho); }

double fidelity(const DensityOperator& a, const DensityOperator& b) {
  require_same_dims(a.mode_dims(), b.mode_dims());
  const Matrix sa = hermitian_sqrt(a.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(sa * b.matrix() * sa), Eigen::EigenvaluesOnly);
  const double root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root * root, 0.0, 1.0);
}

double trace_distance(const DensityOperator& a, const DensityOperator& b) {
  require_same_dims(a.mode_dims(), b.mode_dims());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(a.matrix() - b.matrix()),
                                           Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const StateVector& a, const StateVector& b) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(a, b)));
}

}  // namespace optomech
