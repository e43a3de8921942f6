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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "optomech/analysis.hpp"
#include "optomech/decoherence.hpp"
#include "optomech/errors.hpp"
#include "optomech/evolution.hpp"
#include "optomech/measurement.hpp"
#include "optomech/ode.hpp"
#include "optomech/params.hpp"

namespace optomech {

inline constexpr int kScenarioSchemaVersion = 1;

/// Malformed or inconsistent scenario. The message starts with the field path
/// (e.g. "params.k") or, for syntax errors, with "line L, column C".
class ScenarioError : public Error {
 public:
  using Error::Error;
};

enum class ScenarioMode { evolve, damped, measure_mirror, measure_field, multimode, wigner, entropy, density };

enum class WignerSource { field, mirror, measured_field, measured_mirror };

enum class DampedMethod { analytic, lindblad, trotter };

enum class DampedOutput { field, mirror, joint };

struct Sweep {
  std::string param;  ///< k, gamma, alpha, beta, x, or omega_m (physical parameters only).
  std::vector<double> values;
};

struct PhysicalInput {
  PhysicalParams params;
  double gamma_absolute = 0.0;  ///< Mirror damping rate in 1/s.
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string name;
  ScenarioMode mode = ScenarioMode::evolve;
  ScaledParams params;
  std::optional<PhysicalInput> physical;
  std::vector<double> times;
  std::optional<Sweep> sweep;

  std::size_t field_dim = 0;  ///< 0 selects the default rule.
  std::size_t mirror_dim = 0;
  double tolerance = 1e-10;

  std::optional<double> measurement_x;

  std::optional<MultimodeConfig> multimode;
  std::vector<std::size_t> multimode_dims;  ///< One per field mode; empty selects defaults.

  WignerSource wigner_source = WignerSource::field;
  WignerGridSpec grid;

  MeasurementTarget outcome_target = MeasurementTarget::mirror_position;
  std::vector<double> outcome_grid;

  DampedMethod damped_method = DampedMethod::analytic;
  DampedPhase damped_phase = DampedPhase::exact;
  DampedOutput damped_output = DampedOutput::field;
  std::size_t trotter_steps = 2000;  ///< Total steps up to the last time.
  std::size_t exponent_table = 0;    ///< Write D(n, m) for n, m below this bound.
  IntegratorConfig integrator;

  std::string output_dir = "out";
  std::string prefix;  ///< Defaults to name.
};

/// Parses and validates a scenario document. `source` labels messages.
Scenario parse_scenario(std::string_view text, const std::string& source = "scenario");
Scenario load_scenario(const std::filesystem::path& path);

std::string to_string(ScenarioMode mode);

struct ValidationReport {
  std::vector<std::string> warnings;
  std::size_t field_dim = 0;   ///< Largest predicted field dimension over the sweep.
  std::size_t mirror_dim = 0;  ///< Largest predicted mirror dimension over the sweep.
  std::size_t peak_bytes = 0;  ///< Largest dense object the run allocates.
};

/// Physics-range checks without running anything.
ValidationReport validate_scenario(const Scenario& scenario);

struct RunEntry {
  std::string label;  ///< e.g. "k=0.5 t=3.14159".
  std::size_t field_dim = 0;
  std::size_t mirror_dim = 0;
  double truncation_loss = 0.0;
  double norm = 1.0;           ///< Norm or trace before renormalization, or the Born density.
  double seconds = 0.0;
  std::string note;
};

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::vector<RunEntry> entries;
  double seconds = 0.0;
};

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;  ///< Overrides the scenario's output.dir.
};

RunSummary run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Human-readable summary, one line per entry.
std::string format_summary(const RunSummary& summary);

/// Names and documents of the shipped presets.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);
std::string preset_description(const std::string& name);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace optomech
