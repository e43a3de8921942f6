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

#include "optomech/evolution.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr Complex kI{0.0, 1.0};

std::vector<double> poisson_weights(Complex alpha, std::size_t dim) {
  const Vector c = coherent_amplitudes(alpha, dim);
  std::vector<double> w(dim);
  for (std::size_t n = 0; n < dim; ++n) w[n] = std::norm(c(n));
  return w;
}

// Raises the appropriate TruncationError when the joint loss is too large.
void check_joint_loss(double loss, double tolerance, double field_tail, std::size_t field_dim,
                      double abs_field_amp, const std::vector<double>& weights,
                      const std::vector<double>& reaches, std::size_t mirror_dim) {
  if (loss <= tolerance) return;
  if (field_tail > tolerance) {
    throw TruncationError("field", field_dim, dim_for_amplitude(abs_field_amp, tolerance), loss);
  }
  throw TruncationError("mirror", mirror_dim, weighted_dim(weights, reaches, tolerance), loss);
}

}  // namespace

PropagatorFactors propagator_factors(const ScaledParams& params, double t) {
  PropagatorFactors f;
  f.t = t;
  f.eta = 1.0 - std::exp(-kI * t);
  f.kerr_phase_exponent = params.k * params.k * (t - std::sin(t));
  f.free_field_phase = params.r * t;
  return f;
}

Matrix propagator_matrix(const ScaledParams& params, double t, std::size_t field_dim,
                         std::size_t mirror_dim, Picture picture) {
  params.validate();
  const PropagatorFactors f = propagator_factors(params, t);
  const std::size_t M = mirror_dim;
  Vector rotation(M);
  for (std::size_t j = 0; j < M; ++j) rotation(j) = std::exp(-kI * (static_cast<double>(j) * t));

  Matrix U = Matrix::Zero(field_dim * M, field_dim * M);
  for (std::size_t n = 0; n < field_dim; ++n) {
    const double nn = static_cast<double>(n);
    double phase = f.kerr_phase_exponent * nn * nn;
    if (picture == Picture::full) phase -= f.free_field_phase * nn;
    const Matrix D = displacement_matrix(params.k * nn * f.eta, M);
    U.block(n * M, n * M, M, M) = std::exp(kI * phase) * (D * rotation.asDiagonal());
  }
  return U;
}

Complex mirror_amplitude(double n, const ScaledParams& params, double t) {
  const Complex rot = std::exp(-kI * t);
  return params.beta * rot + params.k * n * (1.0 - rot);
}

TruncationDims default_dims(const ScaledParams& params, double tolerance) {
  TruncationDims d;
  d.field = dim_for_amplitude(std::abs(params.alpha), tolerance);
  const std::vector<double> w = poisson_weights(params.alpha, d.field);
  std::vector<double> reach(d.field);
  for (std::size_t n = 0; n < d.field; ++n) {
    reach[n] = std::abs(params.beta) + 2.0 * params.k * static_cast<double>(n);
  }
  d.mirror = weighted_dim(w, reach, tolerance);
  return d;
}

double displacement_phase(double n, const ScaledParams& params, double t) {
  return params.k * n * std::imag(std::conj(params.beta) * (std::exp(kI * t) - 1.0));
}

JointState joint_state(const ScaledParams& params, double t, std::size_t field_dim,
                       std::size_t mirror_dim, double tolerance, Picture picture) {
  params.validate();
  const std::size_t M = mirror_dim;
  const Vector c = coherent_amplitudes(params.alpha, field_dim);
  const PropagatorFactors f = propagator_factors(params, t);
  Vector amps(field_dim * M);
  std::vector<double> weights(field_dim);
  std::vector<double> reaches(field_dim);
  for (std::size_t n = 0; n < field_dim; ++n) {
    const double nn = static_cast<double>(n);
    double phase = f.kerr_phase_exponent * nn * nn + displacement_phase(nn, params, t);
    if (picture == Picture::full) phase -= f.free_field_phase * nn;
    const Complex phi = mirror_amplitude(nn, params, t);
    amps.segment(n * M, M) = (c(n) * std::exp(kI * phase)) * coherent_amplitudes(phi, M);
    weights[n] = std::norm(c(n));
    reaches[n] = std::abs(phi);
  }
  const double kept = amps.squaredNorm();
  const double loss = std::max(0.0, 1.0 - kept);
  check_joint_loss(loss, tolerance, coherent_tail(std::abs(params.alpha), field_dim), field_dim,
                   std::abs(params.alpha), weights, reaches, M);
  return {StateVector({field_dim, M}, amps / std::sqrt(kept), true), loss};
}

void MultimodeConfig::validate() const {
  if (eta.empty()) throw ParameterError("multimode config needs at least one mode");
  if (alphas.size() != eta.size()) {
    throw ParameterError("multimode config: alphas and eta must have the same length");
  }
  for (int e : eta) {
    if (e < 1) throw ParameterError("multimode config: eta_j must be positive integers");
  }
  if (!(k1 >= 0.0) || !std::isfinite(k1)) throw ParameterError("multimode config: k1 must be >= 0");
  if (p < 1) throw ParameterError("multimode config: p must be >= 1");
}

JointState multimode_joint_state(const MultimodeConfig& config, Complex beta, double t,
                                 const Dims& field_dims, std::size_t mirror_dim,
                                 double tolerance) {
  config.validate();
  const std::size_t N = config.mode_count();
  if (field_dims.size() != N) throw DimensionError("one field dim per mode required");
  const std::size_t M = mirror_dim;

  std::vector<Vector> c(N);
  for (std::size_t j = 0; j < N; ++j) c[j] = coherent_amplitudes(config.alphas[j], field_dims[j]);

  ScaledParams mirror_params;
  mirror_params.k = config.k1;
  mirror_params.beta = beta;
  const double kerr = config.k1 * config.k1 * (t - std::sin(t));

  Dims dims = field_dims;
  dims.push_back(M);
  const std::size_t field_total = total_dim(field_dims);
  Vector amps(field_total * M);

  std::map<long, std::pair<Vector, double>> mirror_cache;  // weight -> (components, |phi|)
  std::map<long, double> weight_of;                        // weight -> summed probability
  std::vector<std::size_t> idx(N, 0);
  for (std::size_t flat = 0; flat < field_total; ++flat) {
    Complex amp = 1.0;
    long excitation = 0;
    for (std::size_t j = 0; j < N; ++j) {
      amp *= c[j](idx[j]);
      excitation += static_cast<long>(config.eta[j]) * static_cast<long>(idx[j]);
    }
    auto it = mirror_cache.find(excitation);
    if (it == mirror_cache.end()) {
      const Complex phi = mirror_amplitude(static_cast<double>(excitation), mirror_params, t);
      it = mirror_cache.emplace(excitation, std::make_pair(coherent_amplitudes(phi, M), std::abs(phi)))
               .first;
    }
    const double e = static_cast<double>(excitation);
    const double phase = kerr * e * e + displacement_phase(e, mirror_params, t);
    amps.segment(flat * M, M) = (amp * std::exp(kI * phase)) * it->second.first;
    weight_of[excitation] += std::norm(amp);
    for (std::size_t j = N; j-- > 0;) {
      if (++idx[j] < field_dims[j]) break;
      idx[j] = 0;
    }
  }

  const double kept = amps.squaredNorm();
  const double loss = std::max(0.0, 1.0 - kept);
  if (loss > tolerance) {
    for (std::size_t j = 0; j < N; ++j) {
      if (coherent_tail(std::abs(config.alphas[j]), field_dims[j]) > tolerance / N) {
        throw TruncationError("c" + std::to_string(j + 1), field_dims[j],
                              dim_for_amplitude(std::abs(config.alphas[j]), tolerance / N), loss);
      }
    }
    std::vector<double> w;
    std::vector<double> r;
    for (const auto& [e, p] : weight_of) {
      w.push_back(p);
      r.push_back(mirror_cache.at(e).second);
    }
    throw TruncationError("mirror", M, weighted_dim(w, r, tolerance), loss);
  }
  return {StateVector(std::move(dims), amps / std::sqrt(kept), true), loss};
}

StateVector conditional_mode_state(std::size_t m, const MultimodeConfig& config,
                                   std::size_t conditioned_mode, std::size_t dim,
                                   double tolerance) {
  config.validate();
  if (config.mode_count() != 2) throw ParameterError("conditional state needs a two-mode config");
  if (conditioned_mode > 1) throw ParameterError("conditioned_mode must be 0 or 1");
  const std::size_t other = 1 - conditioned_mode;
  const double eta_c = config.eta[conditioned_mode];
  const double eta_o = config.eta[other];
  const double k2 = config.k1 * config.k1;
  const double two_pi = 2.0 * std::numbers::pi;
  const Complex amp = config.alphas[other] *
                      std::exp(kI * (2.0 * two_pi * k2 * eta_c * eta_o * static_cast<double>(m)));
  Vector v = coherent_amplitudes(amp, dim);
  const double loss = std::max(0.0, 1.0 - v.squaredNorm());
  if (loss > tolerance) {
    throw TruncationError("c" + std::to_string(other + 1), dim,
                          dim_for_amplitude(std::abs(amp), tolerance), loss);
  }
  for (std::size_t n = 0; n < dim; ++n) {
    const double nn = static_cast<double>(n);
    v(n) *= std::exp(kI * (two_pi * k2 * eta_o * eta_o * nn * nn));
  }
  return StateVector({dim}, v / v.norm(), true);
}

}  // namespace optomech
