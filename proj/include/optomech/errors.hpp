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
#include <stdexcept>
#include <string>

namespace optomech {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical or scaled parameter is outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Operands have incompatible mode structure.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A truncated Fock space is too small for the requested state.
///
/// Carries the offending mode label and a dimension that would bring the
/// loss under the configured tolerance, so callers can report it.
class TruncationError : public Error {
 public:
  TruncationError(std::string mode, std::size_t dim, std::size_t needed_dim, double loss);

  const std::string& mode() const { return mode_; }
  std::size_t dim() const { return dim_; }
  std::size_t needed_dim() const { return needed_dim_; }
  double loss() const { return loss_; }

 private:
  std::string mode_;
  std::size_t dim_;
  std::size_t needed_dim_;
  double loss_;
};

/// A superposition or projection produced a (numerically) zero vector.
class ZeroNormError : public Error {
 public:
  using Error::Error;
};

/// The ODE integrator gave up (step budget, step underflow, positivity).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Input state does not have the coherent-branch structure required.
class UnsupportedStateError : public Error {
 public:
  using Error::Error;
};

/// A phase-space or quadrature grid does not capture the distribution.
class GridError : public Error {
 public:
  using Error::Error;
};

}  // namespace optomech
