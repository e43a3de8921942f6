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

#include "optomech/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "optomech/errors.hpp"

namespace optomech {

Matrix annihilation_matrix(std::size_t dim) {
  if (dim == 0) throw DimensionError("dim must be >= 1");
  Matrix a = Matrix::Zero(dim, dim);
  for (std::size_t n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix number_matrix(std::size_t dim) {
  if (dim == 0) throw DimensionError("dim must be >= 1");
  Matrix n = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) n(i, i) = static_cast<double>(i);
  return n;
}

Vector coherent_amplitudes(Complex amp, std::size_t dim) {
  if (dim == 0) throw DimensionError("dim must be >= 1");
  Vector c = Vector::Zero(dim);
  const double mag = std::abs(amp);
  if (mag == 0.0) {
    c(0) = 1.0;
    return c;
  }
  const double mean = mag * mag;
  const std::size_t mode = std::min<std::size_t>(dim - 1, static_cast<std::size_t>(mean));
  const double log_mode = -0.5 * mean + static_cast<double>(mode) * std::log(mag) -
                          0.5 * std::lgamma(static_cast<double>(mode) + 1.0);
  const Complex phase = amp / mag;
  c(mode) = std::exp(log_mode) * std::pow(phase, static_cast<double>(mode));
  for (std::size_t n = mode + 1; n < dim; ++n) {
    c(n) = c(n - 1) * amp / std::sqrt(static_cast<double>(n));
  }
  for (std::size_t n = mode; n-- > 0;) {
    c(n) = c(n + 1) * std::sqrt(static_cast<double>(n + 1)) / amp;
  }
  return c;
}

double coherent_tail(double abs_amp, std::size_t dim) {
  const double mean = abs_amp * abs_amp;
  if (mean == 0.0) return dim == 0 ? 1.0 : 0.0;
  // Sum the Poisson pmf from the far tail downwards; accurate far below 1e-16.
  const double top = mean + 40.0 * std::sqrt(mean) + 60.0;
  if (static_cast<double>(dim) > top) return 0.0;
  const double log_mean = std::log(mean);
  double tail = 0.0;
  for (std::size_t j = static_cast<std::size_t>(top); j + 1 > dim; --j) {
    tail += std::exp(-mean + static_cast<double>(j) * log_mean -
                     std::lgamma(static_cast<double>(j) + 1.0));
    if (j == 0) break;
  }
  return std::min(1.0, tail);
}

std::size_t dim_for_amplitude(double abs_amp, double tolerance) {
  std::size_t dim = 1;
  while (coherent_tail(abs_amp, dim) >= tolerance) ++dim;
  return dim;
}

std::size_t weighted_dim(std::span<const double> weights, std::span<const double> reaches,
                         double tolerance) {
  if (weights.size() != reaches.size()) throw DimensionError("weights/reaches size mismatch");
  double max_reach = 0.0;
  for (double r : reaches) max_reach = std::max(max_reach, r);
  std::size_t lo = 1;
  std::size_t hi = dim_for_amplitude(max_reach, tolerance);
  auto loss = [&](std::size_t m) {
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) total += weights[i] * coherent_tail(reaches[i], m);
    return total;
  };
  // The weighted tail is non-increasing in m; bisect between 1 and the unweighted bound.
  if (loss(lo) < tolerance) return lo;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (loss(mid) < tolerance) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

CoherentState coherent_state(Complex amp, std::size_t dim, double tolerance) {
  Vector c = coherent_amplitudes(amp, dim);
  const double kept = c.squaredNorm();
  const double loss = std::max(0.0, 1.0 - kept);
  if (loss > tolerance) {
    throw TruncationError("coherent", dim, dim_for_amplitude(std::abs(amp), tolerance), loss);
  }
  return {StateVector({dim}, c / std::sqrt(kept), true), loss};
}

void laguerre_kernel(double r, std::size_t d, std::span<double> out) {
  if (out.empty()) return;
  const double x = r * r;
  const double dd = static_cast<double>(d);
  double h0 = 0.0;
  if (d == 0) {
    h0 = std::exp(-0.5 * x);
  } else if (r > 0.0) {
    h0 = std::exp(dd * std::log(r) - 0.5 * x - 0.5 * std::lgamma(dd + 1.0));
  }
  out[0] = h0;
  if (out.size() == 1) return;
  out[1] = h0 * (1.0 + dd - x) / std::sqrt(dd + 1.0);
  for (std::size_t n = 1; n + 1 < out.size(); ++n) {
    const double nn = static_cast<double>(n);
    out[n + 1] = ((2.0 * nn + 1.0 + dd - x) * out[n] - std::sqrt(nn * (nn + dd)) * out[n - 1]) /
                 std::sqrt((nn + 1.0) * (nn + 1.0 + dd));
  }
}

Matrix displacement_matrix(Complex amp, std::size_t dim) {
  if (dim == 0) throw DimensionError("dim must be >= 1");
  const double mag = std::abs(amp);
  if (mag == 0.0) return Matrix::Identity(dim, dim);
  const Complex phase = amp / mag;
  Matrix D(dim, dim);
  std::vector<double> h(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const std::size_t count = dim - d;
    laguerre_kernel(mag, d, std::span<double>(h.data(), count));
    const Complex below = std::pow(phase, static_cast<double>(d));
    const Complex above = std::pow(-std::conj(phase), static_cast<double>(d));
    for (std::size_t n = 0; n < count; ++n) {
      D(n + d, n) = below * h[n];
      if (d > 0) D(n, n + d) = above * h[n];
    }
  }
  return D;
}

}  // namespace optomech
