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


#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "optomech/scenario.hpp"
#include "test_util.hpp"

namespace optomech {
namespace {

namespace fs = std::filesystem;
using optomech::testing::series_coherent;

constexpr double kPi = std::numbers::pi;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("optomech_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// A CSV file split into its "# key: value" header and its numeric body.
struct Table {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& path) {
  Table t;
  std::istringstream in(slurp(path));
  std::string line;
  bool have_columns = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      const auto colon = line.find(": ");
      if (colon != std::string::npos) t.header[line.substr(2, colon - 2)] = line.substr(colon + 2);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (!have_columns) {
      t.columns = cells;
      have_columns = true;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));  // stod rejects subnormals
    t.rows.push_back(row);
  }
  return t;
}

std::string error_of(const std::string& text) {
  try {
    parse_scenario(text, "test");
  } catch (const ScenarioError& e) {
    // Messages lead with the source label, then the field path.
    const std::string what = e.what();
    EXPECT_EQ(what.rfind("test: ", 0), 0u) << what;
    return what.substr(std::min<std::size_t>(6, what.size()));
  }
  return "";
}

const char* kMinimal = R"({
  "schema_version": 1,
  "name": "minimal",
  "mode": "evolve",
  "params": {"k": 0.5, "alpha": 1, "beta": 1},
  "times": [3.141592653589793]
})";

TEST(ScenarioParse, minimal_document) {
  const Scenario s = parse_scenario(kMinimal);
  EXPECT_EQ(s.name, "minimal");
  EXPECT_EQ(s.mode, ScenarioMode::evolve);
  EXPECT_DOUBLE_EQ(s.params.k, 0.5);
  EXPECT_DOUBLE_EQ(s.params.r, 1.0);
  EXPECT_EQ(s.params.alpha, Complex(1.0, 0.0));
  ASSERT_EQ(s.times.size(), 1u);
  EXPECT_FALSE(s.sweep.has_value());
}

TEST(ScenarioParse, complex_amplitudes_and_linspace_times) {
  const Scenario s = parse_scenario(R"({"schema_version": 1, "mode": "entropy",
    "params": {"k": 0.5, "alpha": [1, -2], "beta": [0, 0.5]},
    "times": {"start": 0, "stop": 2, "count": 5}})");
  EXPECT_EQ(s.params.alpha, Complex(1.0, -2.0));
  EXPECT_EQ(s.params.beta, Complex(0.0, 0.5));
  ASSERT_EQ(s.times.size(), 5u);
  EXPECT_DOUBLE_EQ(s.times[1], 0.5);
  EXPECT_EQ(s.times.back(), 2.0);
}

TEST(ScenarioParse, syntax_error_reports_line_and_column) {
  const std::string msg = error_of("{\n  \"schema_version\": 1,\n  \"mode\": evolve\n}");
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("column"), std::string::npos) << msg;
}

TEST(ScenarioParse, missing_k_names_the_field) {
  const std::string msg = error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"alpha": 1}, "times": [1]})");
  EXPECT_EQ(msg.rfind("params.k", 0), 0u) << msg;
}

TEST(ScenarioParse, negative_gamma_is_rejected) {
  const std::string msg =
      error_of(R"({"schema_version": 1, "mode": "damped", "params": {"k": 0.5, "gamma": -0.1}, "times": [1]})");
  EXPECT_EQ(msg.rfind("params.gamma", 0), 0u) << msg;
}

TEST(ScenarioParse, unknown_fields_are_rejected) {
  const std::string msg =
      error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 0.5, "kappa": 1}, "times": [1]})");
  EXPECT_EQ(msg, "params.kappa: unknown field");
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 0.5}, "times": [1], "extra": 0})"),
            "extra: unknown field");
}

TEST(ScenarioParse, bad_values_name_the_field) {
  EXPECT_EQ(error_of(R"({"schema_version": 2, "mode": "evolve", "params": {"k": 0.5}, "times": [1]})").rfind("schema_version", 0), 0u);
  EXPECT_EQ(error_of(R"({"mode": "evolve", "params": {"k": 0.5}, "times": [1]})").rfind("schema_version", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "fly", "params": {"k": 0.5}, "times": [1]})").rfind("mode: unknown value", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": "big"}, "times": [1]})"),
            "params.k: expected a number");
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 0.5}, "times": [-1]})").rfind("times", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 0.5, "alpha": [1]}, "times": [1]})"),
            "params.alpha: expected a number or a [re, im] pair");
}

TEST(ScenarioParse, mode_requirements) {
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "measure-mirror", "params": {"k": 1}, "times": [1]})").rfind("measurement.x", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "density", "params": {"k": 1}, "times": [1]})").rfind("outcomes", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "multimode", "params": {}, "times": [1]})").rfind("multimode", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 1}, "times": [1],
                         "multimode": {"eta": [1], "k1": 1, "alphas": [1]}})").rfind("multimode: only applies", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "multimode", "params": {}, "times": [1],
                         "multimode": {"eta": [1, 1, 1, 1], "k1": 1, "alphas": [1, 1, 1, 1]}})").rfind("multimode.eta", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "damped", "params": {"k": 1, "beta": 2, "gamma": 0.1}, "times": [1]})").rfind("params.beta", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 1, "gamma": 0.1}, "times": [1]})").rfind("params.gamma", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "wigner", "params": {"k": 1, "gamma": 0.1}, "times": [1],
                         "measurement": {"x": 0}, "wigner": {"source": "measured-field"}})").rfind("wigner.source", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 1}, "times": [1],
                         "sweep": {"param": "r", "values": [1]}})").rfind("sweep.param", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "damped", "params": {"k": 1, "gamma": 0.1}, "times": [2, 1],
                         "damped": {"method": "lindblad"}})").rfind("times", 0), 0u);
}

TEST(ScenarioParse, physical_parameters) {
  const Scenario s = parse_scenario(R"({"schema_version": 1, "mode": "damped", "times": [1],
    "params": {"alpha": 1, "physical": {"omega_0": 1e16, "omega_m": 6283.185307179586, "length": 1, "mass": 1e-5,
                                        "gamma_absolute": 1}}})");
  ASSERT_TRUE(s.physical.has_value());
  EXPECT_GT(s.params.k, 0.0);
  EXPECT_NEAR(s.params.gamma, 1.0 / 6283.185307179586, 1e-18);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "mode": "damped", "times": [1],
    "params": {"k": 1, "physical": {"omega_0": 1e16, "omega_m": 1e3, "length": 1, "mass": 1e-5}}})").rfind("params.physical", 0), 0u);
}

TEST(ScenarioValidate, preset_reports_dims_and_memory) {
  const Scenario s = parse_scenario(preset_text("fig2"));
  const ValidationReport r = validate_scenario(s);
  EXPECT_GT(r.field_dim, 0u);
  EXPECT_GT(r.mirror_dim, 0u);
  EXPECT_GT(r.peak_bytes, 0u);
  EXPECT_TRUE(r.warnings.empty());
}

TEST(ScenarioValidate, warns_when_truncation_is_below_budget) {
  const Scenario s = parse_scenario(R"({"schema_version": 1, "mode": "evolve", "params": {"k": 0.5, "alpha": 3, "beta": 2},
    "times": [1], "truncation": {"field": 5, "mirror": 10}})");
  const ValidationReport r = validate_scenario(s);
  ASSERT_EQ(r.warnings.size(), 2u);
  EXPECT_EQ(r.warnings[0].rfind("truncation.field = 5", 0), 0u) << r.warnings[0];
  EXPECT_EQ(r.warnings[1].rfind("truncation.mirror = 10", 0), 0u) << r.warnings[1];
}

TEST(Presets, every_preset_parses_and_validates) {
  const auto names = preset_names();
  ASSERT_GE(names.size(), 20u);
  for (const char* expected : {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "acc1", "acc13"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
  }
  for (const auto& name : names) {
    SCOPED_TRACE(name);
    const Scenario s = parse_scenario(preset_text(name), name);
    EXPECT_EQ(s.name, name);
    EXPECT_FALSE(preset_description(name).empty());
    const ValidationReport r = validate_scenario(s);
    EXPECT_TRUE(r.warnings.empty()) << r.warnings.front();
  }
  EXPECT_THROW(preset_text("fig99"), ScenarioError);
}

TEST(Output, format_double_round_trips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.283185307179586, 1e22}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Output, atomic_write_replaces_whole_file) {
  const fs::path dir = fresh_dir("atomic");
  const fs::path file = dir / "out.csv";
  write_file_atomic(file, "first\n");
  write_file_atomic(file, "second\n");
  EXPECT_EQ(slurp(file), "second\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST(Run, evolve_csv_matches_product_state_at_zero) {
  const fs::path dir = fresh_dir("evolve");
  Scenario s = parse_scenario(R"({"schema_version": 1, "name": "ev", "mode": "evolve",
    "params": {"k": 0.5, "alpha": [0.6, 0.2], "beta": 1}, "times": [0]})");
  const RunSummary sum = run_scenario(s, {.output_dir = dir});
  ASSERT_EQ(sum.entries.size(), 1u);
  const Table t = read_table(dir / "ev.csv");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"n", "m", "re", "im"}));
  EXPECT_EQ(t.header.at("columns"), "n,m,re,im");
  EXPECT_EQ(t.header.at("schema_version"), "1");
  EXPECT_EQ(t.header.at("mode"), "evolve");
  const auto F = sum.entries[0].field_dim, M = sum.entries[0].mirror_dim;
  ASSERT_EQ(t.rows.size(), F * M);
  const Vector a = series_coherent({0.6, 0.2}, F), b = series_coherent(1.0, M);
  double err = 0.0;
  for (const auto& row : t.rows) {
    const Complex got(row[2], row[3]);
    err = std::max(err, std::abs(got - a(static_cast<Eigen::Index>(row[0])) * b(static_cast<Eigen::Index>(row[1]))));
  }
  EXPECT_LT(err, 1e-12);
}

TEST(Run, entropy_csv_matches_overlap_sum) {
  const fs::path dir = fresh_dir("entropy");
  const Scenario s = parse_scenario(R"({"schema_version": 1, "name": "ent", "mode": "entropy",
    "params": {"k": 0.5, "alpha": 1.5, "beta": 2}, "times": {"start": 0, "stop": 6.283185307179586, "count": 9},
    "sweep": {"param": "k", "values": [0.2, 0.5]}})");
  run_scenario(s, {.output_dir = dir});
  for (double k : {0.2, 0.5}) {
    const Table t = read_table(dir / (k == 0.2 ? "ent_k0.csv" : "ent_k1.csv"));
    EXPECT_EQ(t.columns, (std::vector<std::string>{"t", "S"}));
    EXPECT_EQ(std::stod(t.header.at("k")), k);
    ASSERT_EQ(t.rows.size(), 9u);
    for (const auto& row : t.rows) {
      // Pure joint state: S = 1 - sum p_n p_m exp(-|phi_n - phi_m|^2).
      const double tt = row[0];
      const double gap = std::norm(1.0 - std::polar(1.0, -tt)) * k * k;
      double sum = 0.0;
      for (int n = 0; n < 60; ++n) {
        for (int m = 0; m < 60; ++m) {
          const double pn = std::exp(-2.25 + n * std::log(2.25) - std::lgamma(n + 1.0));
          const double pm = std::exp(-2.25 + m * std::log(2.25) - std::lgamma(m + 1.0));
          sum += pn * pm * std::exp(-gap * (n - m) * (n - m));
        }
      }
      EXPECT_NEAR(row[1], 1.0 - sum, 1e-10) << "t=" << tt;
    }
  }
}

TEST(Run, wigner_csv_is_long_form_grid) {
  const fs::path dir = fresh_dir("wigner");
  const Scenario s = parse_scenario(R"({"schema_version": 1, "name": "w", "mode": "wigner",
    "params": {"k": 0.5, "alpha": 0, "beta": 1}, "times": [1],
    "wigner": {"source": "field", "grid": {"x_min": -6, "x_max": 6, "y_min": -6, "y_max": 6, "nx": 13, "ny": 13}}})");
  run_scenario(s, {.output_dir = dir});
  const Table t = read_table(dir / "w.csv");
  EXPECT_EQ(t.columns, (std::vector<std::string>{"x", "y", "W"}));
  EXPECT_EQ(t.header.at("source"), "field");
  EXPECT_EQ(t.header.at("widenings"), "0");
  ASSERT_EQ(t.rows.size(), 169u);
  // Rows run over y fastest within each x.
  EXPECT_EQ(t.rows[0][0], -6.0);
  EXPECT_EQ(t.rows[0][1], -6.0);
  EXPECT_EQ(t.rows[1][0], -6.0);
  EXPECT_EQ(t.rows[1][1], -5.0);
  for (const auto& row : t.rows) {
    const double vacuum = std::exp(-0.5 * (row[0] * row[0] + row[1] * row[1])) / (2.0 * kPi);
    EXPECT_NEAR(row[2], vacuum, 1e-12);
  }
}

TEST(Run, headers_record_sweep_and_mode_parameters) {
  const fs::path dir = fresh_dir("headers");
  run_scenario(parse_scenario(R"({"schema_version": 1, "name": "mm", "mode": "multimode", "params": {"beta": 0.5},
    "multimode": {"eta": [1, 2], "k1": 0.5, "p": 2, "alphas": [0.5, [0, 0.25]]}, "times": [1]})"), {.output_dir = dir});
  const Table m = read_table(dir / "mm.csv");
  EXPECT_EQ(m.header.at("eta"), "1,2");
  EXPECT_EQ(m.header.at("p"), "2");
  EXPECT_EQ(m.header.at("alphas"), "0.5,0;0,0.25");
  EXPECT_EQ(m.header.at("beta"), "0.5,0");
  EXPECT_EQ(m.header.count("k"), 0u);
  EXPECT_EQ(m.columns, (std::vector<std::string>{"n1", "n2", "m", "re", "im"}));

  run_scenario(parse_scenario(R"({"schema_version": 1, "name": "sw", "mode": "damped", "times": [1],
    "params": {"alpha": 1, "physical": {"omega_0": 1e16, "omega_m": 6283.185307179586, "length": 1, "mass": 1e-5,
                                        "gamma_absolute": 1}},
    "sweep": {"param": "omega_m", "values": [6283.185307179586, 12566.370614359172]}})"), {.output_dir = dir});
  const Table a = read_table(dir / "sw_omega_m0.csv");
  const Table b = read_table(dir / "sw_omega_m1.csv");
  EXPECT_EQ(a.header.at("sweep"), "omega_m=6283.185307179586");
  EXPECT_EQ(b.header.at("omega_m"), "12566.370614359172");
  EXPECT_EQ(b.header.at("gamma_absolute"), "1");
  EXPECT_NEAR(std::stod(a.header.at("k")) / std::stod(b.header.at("k")), std::pow(2.0, 1.5), 1e-14);
  EXPECT_EQ(a.columns, (std::vector<std::string>{"row", "col", "re", "im"}));
}

TEST(Run, identical_scenarios_give_identical_bytes) {
  const char* text = R"({"schema_version": 1, "name": "det", "mode": "wigner",
    "params": {"k": 0.5, "alpha": 1.2, "beta": 1}, "times": [3.141592653589793, 6.283185307179586],
    "wigner": {"source": "field", "grid": {"nx": 41, "ny": 41}}})";
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const RunSummary ra = run_scenario(parse_scenario(text), {.output_dir = a});
  ::setenv("OPTOMECH_THREADS", "3", 1);
  const RunSummary rb = run_scenario(parse_scenario(text), {.output_dir = b});
  ::unsetenv("OPTOMECH_THREADS");
  ASSERT_EQ(ra.files.size(), rb.files.size());
  std::size_t csvs = 0;
  for (const auto& f : ra.files) {
    if (f.extension() != ".csv") continue;
    ++csvs;
    EXPECT_EQ(slurp(f), slurp(b / f.filename())) << f;
  }
  EXPECT_EQ(csvs, 2u);
}

TEST(Run, truncation_error_surfaces) {
  const Scenario s = parse_scenario(R"({"schema_version": 1, "name": "tr", "mode": "evolve",
    "params": {"k": 0.5, "alpha": 3, "beta": 1}, "times": [1], "truncation": {"field": 4, "mirror": 40}})");
  EXPECT_THROW(run_scenario(s, {.output_dir = fresh_dir("trunc")}), TruncationError);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OPTOMECH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, exit_codes) {
  const fs::path dir = fresh_dir("cli");
  std::ofstream(dir / "bad.json") << R"({"schema_version": 1, "mode": "evolve", "params": {}, "times": [1]})";
  std::ofstream(dir / "good.json") << kMinimal;
  EXPECT_EQ(run_cli("list-presets"), 0);
  EXPECT_EQ(run_cli("validate " + (dir / "good.json").string()), 0);
  EXPECT_EQ(run_cli("validate " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("validate " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("preset nope"), 2);
  EXPECT_EQ(run_cli("run " + (dir / "good.json").string() + " --out " + (dir / "out").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "minimal.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "minimal_summary.txt"));
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("--help"), 0);
  std::ofstream(dir / "trunc.json") << R"({"schema_version": 1, "name": "tr", "mode": "evolve",
    "params": {"k": 0.5, "alpha": 3, "beta": 1}, "times": [1], "truncation": {"field": 4, "mirror": 40}})";
  EXPECT_EQ(run_cli("run " + (dir / "trunc.json").string() + " --out " + (dir / "out").string()), 1);
}

}  // namespace
}  // namespace optomech
