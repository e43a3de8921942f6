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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

struct IntegratorConfig {
  enum class Method { rk4_fixed, dopri5 };

  Method method = Method::dopri5;
  double step = 1e-3;  ///< rk4_fixed step.
  double max_step = std::numeric_limits<double>::infinity();  ///< dopri5 step cap.
  double atol = 1e-10;
  double rtol = 1e-8;
  std::size_t max_steps = 10'000'000;

  void validate() const {
    if (!(step > 0.0) || !(max_step > 0.0) || !(atol > 0.0) || !(rtol > 0.0) || max_steps == 0) {
      throw ParameterError("integrator step and tolerances must be positive");
    }
  }
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

/// Integrates dy/dt = f(t, y) from t0 to t1. `State` is a dense Eigen object;
/// `rhs(t, y, dy)` writes the derivative into dy.
template <class State, class Rhs>
State integrate_ode(Rhs&& rhs, State y, double t0, double t1, const IntegratorConfig& cfg,
                    IntegrationStats* stats = nullptr) {
  cfg.validate();
  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0.0 ? 1.0 : -1.0;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y;

  if (cfg.method == IntegratorConfig::Method::rk4_fixed) {
    const auto n = static_cast<std::size_t>(std::ceil(std::abs(span) / cfg.step - 1e-12));
    if (n > cfg.max_steps) throw IntegrationError("fixed-step RK4 would exceed max_steps");
    const double h = span / static_cast<double>(n);
    double t = t0;
    for (std::size_t i = 0; i < n; ++i) {
      rhs(t, y, k1);
      tmp = y + (0.5 * h) * k1;
      rhs(t + 0.5 * h, tmp, k2);
      tmp = y + (0.5 * h) * k2;
      rhs(t + 0.5 * h, tmp, k3);
      tmp = y + h * k3;
      rhs(t + h, tmp, k4);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t = t0 + static_cast<double>(i + 1) * h;
      st.rhs_evals += 4;
      ++st.accepted;
    }
    return y;
  }

  // Dormand-Prince 5(4) with FSAL.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto error_norm = [&](const State& err, const State& a, const State& b) {
    const auto scale = cfg.atol + cfg.rtol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array();
    const double sq = (err.cwiseAbs().array() / scale).square().sum();
    return std::sqrt(sq / static_cast<double>(err.size()));
  };

  double t = t0;
  rhs(t, y, k1);
  ++st.rhs_evals;
  double h;
  {
    const auto scale = cfg.atol + cfg.rtol * y.cwiseAbs().array();
    const double d0 = std::sqrt((y.cwiseAbs().array() / scale).square().mean());
    const double d1 = std::sqrt((k1.cwiseAbs().array() / scale).square().mean());
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min({h, cfg.max_step, std::abs(span)});
  }

  State ynew = y;
  while (dir * (t1 - t) > 0.0) {
    if (st.accepted + st.rejected >= cfg.max_steps) {
      throw IntegrationError("adaptive integrator exceeded max_steps=" + std::to_string(cfg.max_steps));
    }
    const bool last = h >= std::abs(t1 - t);
    if (last) h = std::abs(t1 - t);
    const double hs = dir * h;
    tmp = y + hs * a21 * k1;
    rhs(t + c2 * hs, tmp, k2);
    tmp = y + hs * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hs, tmp, k3);
    tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hs, tmp, k4);
    tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hs, tmp, k5);
    tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hs, tmp, k6);
    ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + hs, ynew, k7);
    st.rhs_evals += 6;
    tmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = error_norm(tmp, y, ynew);
    if (!std::isfinite(err)) throw IntegrationError("non-finite error estimate");
    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y.swap(ynew);
      k1.swap(k7);
      ++st.accepted;
    } else {
      ++st.rejected;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(cfg.max_step, h * (err <= 1.0 ? factor : std::min(1.0, factor)));
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError("step size underflow");
  }
  return y;
}

}  // namespace optomech
