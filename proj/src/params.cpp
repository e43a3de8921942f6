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

#include "optomech/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

std::string truncation_message(const std::string& mode, std::size_t dim, std::size_t needed,
                               double loss) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", loss);
  return "truncation of mode '" + mode + "' at dim " + std::to_string(dim) + " loses " + buf +
         " of the norm; need dim >= " + std::to_string(needed);
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be positive and finite, got " +
                         std::to_string(value));
  }
}

void require_non_negative(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ParameterError(std::string(name) + " must be non-negative and finite, got " +
                         std::to_string(value));
  }
}

}  // namespace

void PhysicalParams::validate() const {
  require_positive(omega_0, "omega_0");
  require_positive(omega_m, "omega_m");
  require_positive(length, "length");
  require_positive(mass, "mass");
}

void ScaledParams::validate() const {
  require_non_negative(k, "k");
  require_non_negative(r, "r");
  require_non_negative(gamma, "gamma");
  if (!std::isfinite(std::abs(alpha)) || !std::isfinite(std::abs(beta))) {
    throw ParameterError("coherent amplitudes must be finite");
  }
}

Coupling coupling_from_physical(const PhysicalParams& p) {
  p.validate();
  Coupling c;
  c.g = (p.omega_0 / p.length) * std::sqrt(kHbar / (2.0 * p.mass * p.omega_m));
  c.k = c.g / p.omega_m;
  c.r = p.omega_0 / p.omega_m;
  return c;
}

TruncationError::TruncationError(std::string mode, std::size_t dim, std::size_t needed_dim,
                                 double loss)
    : Error(truncation_message(mode, dim, std::max(needed_dim, dim + 1), loss)),
      mode_(std::move(mode)),
      dim_(dim),
      needed_dim_(std::max(needed_dim, dim + 1)),
      loss_(loss) {}

}  // namespace optomech
