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

#include "optomech/catalog.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "optomech/errors.hpp"
#include "optomech/metrics.hpp"

namespace optomech {

namespace {
constexpr Complex kI{0.0, 1.0};
}

StateVector zeta_state(Complex alpha, double k, std::size_t dim, double tolerance) {
  Vector v = coherent_amplitudes(alpha, dim);
  const double loss = std::max(0.0, 1.0 - v.squaredNorm());
  if (loss > tolerance) {
    throw TruncationError("field", dim, dim_for_amplitude(std::abs(alpha), tolerance), loss);
  }
  const double w = 2.0 * std::numbers::pi * k * k;
  for (std::size_t n = 0; n < dim; ++n) {
    const double nn = static_cast<double>(n);
    v(n) *= std::exp(kI * std::fmod(w * nn * nn, 2.0 * std::numbers::pi));
  }
  return StateVector({dim}, v / v.norm(), true);
}

std::size_t CatSpec::mode_count() const {
  return components.empty() ? 0 : components.front().amplitudes.size();
}

void CatSpec::validate() const {
  if (components.size() < 2) throw ParameterError("cat spec needs at least two components");
  const std::size_t modes = mode_count();
  if (modes == 0) throw ParameterError("cat component without amplitudes");
  for (const auto& c : components) {
    if (c.amplitudes.size() != modes) {
      throw ParameterError("cat components disagree on the number of modes");
    }
  }
}

StateVector cat_superposition(const CatSpec& spec, const Dims& dims) {
  spec.validate();
  if (dims.size() != spec.mode_count()) throw DimensionError("one dim per cat mode required");
  Vector sum = Vector::Zero(total_dim(dims));
  double scale = 0.0;
  for (const auto& comp : spec.components) {
    std::vector<StateVector> parts;
    for (std::size_t j = 0; j < dims.size(); ++j) {
      parts.emplace_back(Dims{dims[j]}, coherent_amplitudes(comp.amplitudes[j], dims[j]));
    }
    sum += comp.coefficient * tensor_product(parts).amplitudes();
    scale += std::abs(comp.coefficient);
  }
  const double n = sum.norm();
  if (!(n > 1e-12 * scale)) throw ZeroNormError("cat components cancel to a zero vector");
  if (!spec.normalized) return StateVector(dims, sum);
  return StateVector(dims, sum / n, true);
}

CatSpec two_component_cat(Complex alpha) {
  return {{{Complex(0.5, 0.5), {alpha}}, {Complex(0.5, -0.5), {-alpha}}}};
}

CatSpec three_component_cat(Complex alpha) {
  // e^{i pi n^2 / 3} is even in n, so the +-pi/3 components share one coefficient.
  const double third = std::numbers::pi / 3.0;
  const Complex c = std::exp(2.0 * kI * third);
  return {{{1.0, {-alpha}}, {c, {alpha * std::exp(kI * third)}}, {c, {alpha * std::exp(-kI * third)}}}};
}

CatSpec three_component_cat_printed(Complex alpha) {
  const double third = std::numbers::pi / 3.0;
  const Complex c = (1.0 + std::exp(kI * third)) / (2.0 * kI * std::sin(third));
  return {{{1.0, {-alpha}}, {c, {alpha * std::exp(kI * third)}}, {-c, {alpha * std::exp(-kI * third)}}}};
}

CatSpec four_component_cat(Complex alpha) {
  const Complex half_phase = 0.5 * std::exp(kI * (std::numbers::pi / 4.0));
  return {{{half_phase, {alpha}}, {-half_phase, {-alpha}}, {0.5, {kI * alpha}}, {0.5, {-kI * alpha}}}};
}

CatSpec entangled_two_mode_cat(Complex alpha1, Complex alpha2) {
  return {{{Complex(1.0, 1.0), {alpha1, alpha2}}, {Complex(1.0, -1.0), {-alpha1, -alpha2}}}};
}

CatSpec parity_cat(Complex alpha, int sign) {
  return {{{1.0, {alpha}}, {static_cast<double>(sign), {-alpha}}}};
}

EigenstateCheck eigenstate_residual(const StateVector& state, const MultimodeConfig& config,
                                    std::size_t guard) {
  config.validate();
  const std::size_t N = config.mode_count();
  const Dims& dims = state.mode_dims();
  if (dims.size() != N) throw DimensionError("state must have one mode per configured field mode");
  const std::size_t p = static_cast<std::size_t>(config.p);
  for (std::size_t j = 0; j < N; ++j) {
    if (dims[j] < p + guard + 1) {
      throw TruncationError("c" + std::to_string(j + 1), dims[j], p + guard + 1, 1.0);
    }
  }

  const auto st = strides(dims);
  const Vector& psi = state.amplitudes();
  Vector applied = Vector::Zero(psi.size());
  Vector kept = Vector::Zero(psi.size());
  std::size_t guarded = 0;
  std::vector<std::size_t> idx(N, 0);
  for (std::size_t flat = 0; flat < state.size(); ++flat) {
    bool inside = true;
    for (std::size_t j = 0; j < N; ++j) inside = inside && idx[j] + 1 + p + guard <= dims[j];
    if (inside) {
      // (a^p psi)_n = sqrt((n+p)!/n!) psi_{n+p} in every mode.
      double factor = 1.0;
      std::size_t source = flat;
      for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t q = 1; q <= p; ++q) factor *= std::sqrt(static_cast<double>(idx[j] + q));
        source += p * st[j];
      }
      applied(flat) = factor * psi(source);
      kept(flat) = psi(flat);
      ++guarded;
    }
    for (std::size_t j = N; j-- > 0;) {
      if (++idx[j] < dims[j]) break;
      idx[j] = 0;
    }
  }

  EigenstateCheck out;
  out.guarded_components = guarded;
  const double matched = 2.0 * config.k1 * config.k1 * static_cast<double>(p);
  if (std::abs(matched - 1.0) < 1e-12) {
    Complex lambda = 1.0;
    long eta_sum = 0;
    for (std::size_t j = 0; j < N; ++j) {
      lambda *= std::pow(config.alphas[j], static_cast<double>(p));
      eta_sum += config.eta[j];
    }
    const double pd = static_cast<double>(p);
    const double es = static_cast<double>(eta_sum);
    lambda *= std::exp(kI * std::fmod(std::numbers::pi * pd * es * es, 2.0 * std::numbers::pi));
    out.eigenvalue = lambda;
    const double denom = (lambda * kept).norm();
    out.relative_residual = denom > 0.0 ? (applied - lambda * kept).norm() / denom
                                        : std::numeric_limits<double>::infinity();
  } else {
    out.diagnostic = "2 pi k1^2 != pi/p: no eigenvalue predicted; residual against the Rayleigh quotient";
    const double kk = kept.squaredNorm();
    const Complex rq = kk > 0.0 ? kept.dot(applied) / kk : Complex(0.0);
    const double denom = applied.norm();
    out.relative_residual = denom > 0.0 ? (applied - rq * kept).norm() / denom : 0.0;
  }
  return out;
}

}  // namespace optomech
