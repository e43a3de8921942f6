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

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "optomech/scenario.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitInvalid = 2;

int run(const optomech::Scenario& s, const std::string& out) {
  optomech::RunOptions opts;
  if (!out.empty()) opts.output_dir = out;
  const auto summary = optomech::run_scenario(s, opts);
  std::cout << s.name << " (" << optomech::to_string(s.mode) << ")\n" << optomech::format_summary(summary);
  return 0;
}

int validate(const optomech::Scenario& s) {
  const auto report = optomech::validate_scenario(s);
  std::cout << "ok: " << s.name << " (mode " << optomech::to_string(s.mode) << ")\n"
            << "  predicted dims: field " << report.field_dim << ", mirror " << report.mirror_dim << "\n"
            << "  predicted peak memory: " << (report.peak_bytes + (1 << 20) - 1) / (1 << 20) << " MiB\n";
  for (const auto& w : report.warnings) std::cout << "  warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity field and movable mirror: scenario runner and data exporter"};
  app.require_subcommand(1);
  long long seed = 0;
  unsigned threads = 0;
  app.add_option("--seed", seed, "Reserved; no code path is stochastic");
  app.add_option("--threads", threads, "Worker threads for grid evaluation (sets OPTOMECH_THREADS)");

  std::string file, out, name;
  bool show = false;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file");
  run_cmd->add_option("file", file, "Scenario file")->required();
  run_cmd->add_option("--out", out, "Output directory (overrides output.dir)");
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file without running it");
  validate_cmd->add_option("file", file, "Scenario file")->required();
  auto* preset_cmd = app.add_subcommand("preset", "Run a shipped preset");
  preset_cmd->add_option("name", name, "Preset name")->required();
  preset_cmd->add_option("--out", out, "Output directory (overrides output.dir)");
  preset_cmd->add_flag("--show", show, "Print the preset file instead of running it");
  auto* list_cmd = app.add_subcommand("list-presets", "List shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitInvalid;
  }
  if (threads > 0) ::setenv("OPTOMECH_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (*list_cmd) {
      for (const auto& n : optomech::preset_names()) std::cout << n << "\t" << optomech::preset_description(n) << "\n";
      return 0;
    }
    if (*preset_cmd) {
      const std::string text = optomech::preset_text(name);
      if (show) {
        std::cout << text;
        return 0;
      }
      return run(optomech::parse_scenario(text, "preset " + name), out);
    }
    const optomech::Scenario s = optomech::load_scenario(file);
    return *validate_cmd ? validate(s) : run(s, out);
  } catch (const optomech::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const optomech::TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
