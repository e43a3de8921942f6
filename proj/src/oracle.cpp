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

#include "optomech/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "optomech/errors.hpp"
#include "optomech/fock.hpp"

namespace optomech {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kPositivityCheckLimit = 800;

}  // namespace

SparseMatrix multimode_hamiltonian(const std::vector<double>& couplings,
                                   const std::vector<double>& ratios, const Dims& field_dims,
                                   std::size_t mirror_dim, Picture picture) {
  const std::size_t modes = field_dims.size();
  if (modes == 0 || couplings.size() != modes || ratios.size() != modes) {
    throw DimensionError("couplings, ratios and field_dims must have equal, nonzero length");
  }
  if (mirror_dim < 2) throw DimensionError("mirror_dim must be at least 2");
  for (std::size_t d : field_dims) {
    if (d == 0) throw DimensionError("field dims must be positive");
  }
  Dims all = field_dims;
  all.push_back(mirror_dim);
  const std::size_t n = total_dim(all);
  const auto st = strides(all);

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(3 * n);
  std::vector<std::size_t> idx(all.size(), 0);
  for (std::size_t row = 0; row < n; ++row) {
    std::size_t rem = row;
    for (std::size_t m = 0; m < all.size(); ++m) {
      idx[m] = rem / st[m];
      rem %= st[m];
    }
    const auto j = static_cast<double>(idx.back());
    double diag = j;
    double drive = 0.0;
    for (std::size_t m = 0; m < modes; ++m) {
      const auto nm = static_cast<double>(idx[m]);
      if (picture == Picture::full) diag += ratios[m] * nm;
      drive += couplings[m] * nm;
    }
    if (diag != 0.0) trip.emplace_back(row, row, diag);
    if (drive != 0.0 && idx.back() + 1 < mirror_dim) {
      const Complex v = -drive * std::sqrt(j + 1.0);
      trip.emplace_back(row + 1, row, v);
      trip.emplace_back(row, row + 1, v);
    }
  }
  SparseMatrix h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  h.setFromTriplets(trip.begin(), trip.end());
  h.makeCompressed();
  return h;
}

SparseMatrix hamiltonian_matrix(const ScaledParams& params, std::size_t field_dim,
                                std::size_t mirror_dim, Picture picture) {
  params.validate();
  return multimode_hamiltonian({params.k}, {params.r}, Dims{field_dim}, mirror_dim, picture);
}

Matrix dense_propagator(const SparseMatrix& hamiltonian, double t) {
  const Matrix h = Matrix(hamiltonian);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw IntegrationError("eigendecomposition failed");
  const Vector phases = (-kI * t * es.eigenvalues().cast<Complex>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

StateVector integrate_schrodinger(const StateVector& psi0, const SparseMatrix& hamiltonian,
                                  double t, const IntegratorConfig& cfg, IntegrationStats* stats) {
  if (static_cast<std::size_t>(hamiltonian.rows()) != psi0.size()) {
    throw DimensionError("Hamiltonian and state sizes differ");
  }
  auto rhs = [&](double, const Vector& y, Vector& dy) { dy.noalias() = -kI * (hamiltonian * y); };
  Vector out = integrate_ode(rhs, psi0.amplitudes(), 0.0, t, cfg, stats);
  return StateVector(psi0.mode_dims(), std::move(out));
}

StateVector integrate_schrodinger(const StateVector& psi0, const ScaledParams& params, double t,
                                  const IntegratorConfig& cfg, Picture picture) {
  const Dims& d = psi0.mode_dims();
  if (d.size() != 2) throw DimensionError("expected a field (x) mirror state");
  return integrate_schrodinger(psi0, hamiltonian_matrix(params, d[0], d[1], picture), t, cfg);
}

DensityOperator integrate_lindblad(const DensityOperator& rho0, const ScaledParams& params,
                                   double t, const IntegratorConfig& cfg, Picture picture,
                                   IntegrationStats* stats) {
  const Dims& d = rho0.mode_dims();
  if (d.size() != 2) throw DimensionError("expected a field (x) mirror density");
  const SparseMatrix h = hamiltonian_matrix(params, d[0], d[1], picture);
  const auto dim = static_cast<Eigen::Index>(total_dim(d));
  const auto mirror = static_cast<Eigen::Index>(d[1]);

  // H is tridiagonal in the joint basis: diagonal `hd`, couplings hu(i) = H(i, i+1).
  RealVector hd = RealVector::Zero(dim), hu = RealVector::Zero(dim);
  for (Eigen::Index col = 0; col < h.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(h, col); it; ++it) {
      if (it.row() == col) {
        hd(col) = it.value().real();
      } else if (it.row() + 1 == col) {
        hu(it.row()) = it.value().real();
      } else if (it.row() != col + 1) {
        throw DimensionError("Hamiltonian is not tridiagonal");
      }
    }
  }
  // Jump operator sqrt(gamma) (1 (x) b): lw(i) = <i|L|i+1>, zero across field blocks.
  RealVector lw = RealVector::Zero(dim), loss = RealVector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto j = static_cast<double>(i % mirror);
    loss(i) = 0.5 * params.gamma * j;
    if ((i + 1) % mirror != 0) lw(i) = std::sqrt(params.gamma * (j + 1.0));
  }

  auto rhs = [&](double, const Matrix& rho, Matrix& drho) {
    // drho = -i[H, rho] + L rho L^dag - (L^dag L rho + rho L^dag L)/2, using rho = rho^dag.
    // Only the lower triangle is computed; the upper follows by Hermiticity.
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Complex* col = rho.col(c).data();
      const Complex* prev = c > 0 ? rho.col(c - 1).data() : nullptr;
      const Complex* next = c + 1 < dim ? rho.col(c + 1).data() : nullptr;
      const double hu_c = c + 1 < dim ? hu(c) : 0.0;
      const double hu_p = c > 0 ? hu(c - 1) : 0.0;
      for (Eigen::Index i = c; i < dim; ++i) {
        Complex hr = (hd(i) - hd(c)) * col[i];
        if (i + 1 < dim) hr += hu(i) * col[i + 1];
        if (i > 0) hr += hu(i - 1) * col[i - 1];
        if (next) hr -= hu_c * next[i];
        if (prev) hr -= hu_p * prev[i];
        Complex v = Complex(hr.imag(), -hr.real()) - (loss(i) + loss(c)) * col[i];
        if (next && i + 1 < dim) v += lw(i) * lw(c) * next[i + 1];
        drho(i, c) = v;
      }
    }
    for (Eigen::Index c = 1; c < dim; ++c) {
      for (Eigen::Index i = 0; i < c; ++i) drho(i, c) = std::conj(drho(c, i));
    }
  };

  Matrix out = integrate_ode(rhs, rho0.matrix(), 0.0, t, cfg, stats);
  out = 0.5 * (out + out.adjoint()).eval();
  const double drift = std::abs(out.trace().real() - rho0.trace());
  if (drift > 1e-8) {
    throw IntegrationError("trace drift " + std::to_string(drift) + " exceeds 1e-8");
  }
  out /= out.trace().real();
  DensityOperator result(d, std::move(out));
  if (result.size() <= kPositivityCheckLimit && result.min_eigenvalue() < -1e-6) {
    throw IntegrationError("integrated density lost positivity beyond 1e-6");
  }
  return result;
}

BranchState decompose_branches(const DensityOperator& rho, double tolerance) {
  const Dims& d = rho.mode_dims();
  if (d.size() != 2) throw DimensionError("expected a field (x) mirror density");
  const std::size_t f = d[0], m = d[1];
  const auto mi = static_cast<Eigen::Index>(m);
  const Matrix& r = rho.matrix();
  const Matrix b = annihilation_matrix(m);

  BranchState out;
  out.field_dim = f;
  out.mirror_dim = m;
  out.coefficients = Matrix::Zero(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(f));
  out.amplitudes.assign(f, Complex{0.0, 0.0});
  std::vector<Vector> vecs(f);
  for (std::size_t n = 0; n < f; ++n) {
    const auto blk = r.block(static_cast<Eigen::Index>(n) * mi, static_cast<Eigen::Index>(n) * mi, mi, mi);
    const double p = blk.trace().real();
    if (p > tolerance) out.amplitudes[n] = (b * blk).trace() / p;
    vecs[n] = coherent_amplitudes(out.amplitudes[n], m).normalized();
  }
  for (std::size_t n = 0; n < f; ++n) {
    for (std::size_t k = 0; k < f; ++k) {
      const auto blk = r.block(static_cast<Eigen::Index>(n) * mi, static_cast<Eigen::Index>(k) * mi, mi, mi);
      const Complex c = vecs[n].dot(blk * vecs[k]);
      const double resid = (blk - c * vecs[n] * vecs[k].adjoint()).cwiseAbs().maxCoeff();
      if (resid > tolerance) {
        throw UnsupportedStateError("block (" + std::to_string(n) + "," + std::to_string(k) +
                                    ") is not a coherent dyad (residual " + std::to_string(resid) + ")");
      }
      out.coefficients(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = c;
    }
  }
  return out;
}

namespace {

void check_branches(const BranchState& br) {
  const auto f = static_cast<Eigen::Index>(br.field_dim);
  if (br.coefficients.rows() != f || br.coefficients.cols() != f ||
      br.amplitudes.size() != br.field_dim) {
    throw DimensionError("branch coefficients and amplitudes disagree with field_dim");
  }
}

// <b|a> for coherent states.
Complex coherent_overlap(Complex b, Complex a) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(b) * a);
}

}  // namespace

BranchState product_branches(Complex alpha, Complex beta, std::size_t field_dim, std::size_t mirror_dim) {
  if (field_dim == 0 || mirror_dim == 0) throw DimensionError("dims must be positive");
  const Vector a = coherent_amplitudes(alpha, field_dim);
  BranchState br;
  br.field_dim = field_dim;
  br.mirror_dim = mirror_dim;
  br.coefficients = a * a.adjoint();
  br.amplitudes.assign(field_dim, beta);
  return br;
}

DensityOperator branch_field_state(const BranchState& br) {
  check_branches(br);
  const auto f = static_cast<Eigen::Index>(br.field_dim);
  Matrix out(f, f);
  for (Eigen::Index n = 0; n < f; ++n) {
    for (Eigen::Index k = 0; k < f; ++k) {
      out(n, k) = br.coefficients(n, k) * coherent_overlap(br.amplitudes[k], br.amplitudes[n]);
    }
  }
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw ZeroNormError("branch state has zero trace");
  out /= tr;
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator({br.field_dim}, std::move(out));
}

DensityOperator branch_mirror_state(const BranchState& br) {
  check_branches(br);
  const auto m = static_cast<Eigen::Index>(br.mirror_dim);
  Matrix out = Matrix::Zero(m, m);
  for (std::size_t n = 0; n < br.field_dim; ++n) {
    const double w = br.coefficients(n, n).real();
    if (w == 0.0) continue;
    const Vector v = coherent_amplitudes(br.amplitudes[n], br.mirror_dim);
    out.noalias() += w * (v * v.adjoint());
  }
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw ZeroNormError("branch state has zero trace");
  out /= tr;
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator({br.mirror_dim}, std::move(out));
}

DensityOperator assemble_branches(const BranchState& br) {
  check_branches(br);
  const auto f = static_cast<Eigen::Index>(br.field_dim);
  const auto m = static_cast<Eigen::Index>(br.mirror_dim);
  std::vector<Vector> vecs(br.field_dim);
  for (std::size_t n = 0; n < br.field_dim; ++n) vecs[n] = coherent_amplitudes(br.amplitudes[n], br.mirror_dim);
  Matrix out = Matrix::Zero(f * m, f * m);
  for (Eigen::Index n = 0; n < f; ++n) {
    for (Eigen::Index k = 0; k < f; ++k) {
      const Complex c = br.coefficients(n, k);
      if (c == Complex{0.0, 0.0}) continue;
      out.block(n * m, k * m, m, m) = c * vecs[n] * vecs[k].adjoint();
    }
  }
  const double tr = out.trace().real();
  if (!(tr > 0.0)) throw ZeroNormError("assembled density has zero trace");
  out /= tr;
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityOperator({br.field_dim, br.mirror_dim}, std::move(out));
}

BranchState trotter_evolve(BranchState br, const ScaledParams& params, double t, std::size_t steps) {
  params.validate();
  if (steps == 0) throw ParameterError("steps must be positive");
  const double dt = t / static_cast<double>(steps);
  const Complex rot = std::exp(-kI * dt);
  const Complex eta = 1.0 - rot;
  const double shrink = std::exp(-0.5 * params.gamma * dt);
  const double frac = -std::expm1(-params.gamma * dt);
  const auto f = static_cast<Eigen::Index>(br.field_dim);
  std::vector<double> theta(br.field_dim);
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t n = 0; n < br.field_dim; ++n) {
      const auto dn = static_cast<double>(n);
      const Complex lam = br.amplitudes[n] * rot;
      const Complex shift = params.k * dn * eta;
      theta[n] = params.k * params.k * dn * dn * (dt - std::sin(dt)) + std::imag(shift * std::conj(lam));
      br.amplitudes[n] = lam + shift;
    }
    for (Eigen::Index n = 0; n < f; ++n) {
      for (Eigen::Index k = 0; k < f; ++k) {
        br.coefficients(n, k) *= std::exp(kI * (theta[n] - theta[k]));
      }
    }
    if (params.gamma > 0.0) {
      for (Eigen::Index n = 0; n < f; ++n) {
        for (Eigen::Index k = 0; k < f; ++k) {
          const Complex ln = br.amplitudes[n], lk = br.amplitudes[k];
          const Complex log_overlap = -0.5 * std::norm(ln) - 0.5 * std::norm(lk) + std::conj(lk) * ln;
          br.coefficients(n, k) *= std::exp(frac * log_overlap);
        }
      }
      for (auto& a : br.amplitudes) a *= shrink;
    }
  }
  return br;
}

DensityOperator trotter_evolve(const DensityOperator& rho0, const ScaledParams& params, double t,
                               std::size_t steps) {
  return assemble_branches(trotter_evolve(decompose_branches(rho0), params, t, steps));
}

}  // namespace optomech
