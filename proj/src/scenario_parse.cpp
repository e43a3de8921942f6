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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "optomech/scenario.hpp"

namespace optomech {
namespace {

using nlohmann::json;

// Typed access to one JSON object. Every key must be consumed; leftovers are
// reported as unknown fields so typos do not pass silently.
class Fields {
 public:
  Fields(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string at = key.empty() ? (path_.empty() ? "scenario" : path_) : where(key);
    throw ScenarioError(at + ": " + what);
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    if (!has(key)) fail(key, "missing required field");
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }

  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
    return static_cast<std::size_t>(v.get<long long>());
  }

  int integer(const std::string& key) {
    if (!has(key)) fail(key, "missing required field");
    const json& v = raw(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  std::string text(const std::string& key) {
    if (!has(key)) fail(key, "missing required field");
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::string text(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  Complex complex(const std::string& key, Complex fallback) {
    if (!has(key)) return fallback;
    return as_complex(raw(key), where(key));
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const json& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail(key, "expected a non-empty array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  Fields object(const std::string& key) {
    seen_.insert(key);
    return Fields(node_.at(key), where(key));
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.contains(item.key())) fail(item.key(), "unknown field");
    }
  }

  static Complex as_complex(const json& v, const std::string& at) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      return {v[0].get<double>(), v[1].get<double>()};
    }
    throw ScenarioError(at + ": expected a number or a [re, im] pair");
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class Enum, std::size_t N>
Enum pick(Fields& f, const std::string& key, const std::pair<const char*, Enum> (&choices)[N], Enum fallback) {
  if (!f.has(key)) return fallback;
  const std::string v = f.text(key);
  std::string allowed;
  for (const auto& [name, value] : choices) {
    if (v == name) return value;
    allowed += (allowed.empty() ? "" : ", ") + std::string(name);
  }
  f.fail(key, "unknown value '" + v + "' (expected one of: " + allowed + ")");
}

constexpr std::pair<const char*, ScenarioMode> kModes[] = {
    {"evolve", ScenarioMode::evolve},           {"damped", ScenarioMode::damped},
    {"measure-mirror", ScenarioMode::measure_mirror}, {"measure-field", ScenarioMode::measure_field},
    {"multimode", ScenarioMode::multimode},     {"wigner", ScenarioMode::wigner},
    {"entropy", ScenarioMode::entropy},         {"density", ScenarioMode::density},
};
constexpr std::pair<const char*, WignerSource> kSources[] = {
    {"field", WignerSource::field},
    {"mirror", WignerSource::mirror},
    {"measured-field", WignerSource::measured_field},
    {"measured-mirror", WignerSource::measured_mirror},
};
constexpr std::pair<const char*, DampedMethod> kMethods[] = {
    {"analytic", DampedMethod::analytic}, {"lindblad", DampedMethod::lindblad}, {"trotter", DampedMethod::trotter}};
constexpr std::pair<const char*, DampedPhase> kPhases[] = {{"exact", DampedPhase::exact},
                                                           {"printed", DampedPhase::printed}};
constexpr std::pair<const char*, DampedOutput> kOutputs[] = {
    {"field", DampedOutput::field}, {"mirror", DampedOutput::mirror}, {"joint", DampedOutput::joint}};
constexpr std::pair<const char*, MeasurementTarget> kTargets[] = {
    {"mirror-position", MeasurementTarget::mirror_position},
    {"field-quadrature", MeasurementTarget::field_quadrature}};
constexpr std::pair<const char*, MassPolicy> kPolicies[] = {
    {"widen", MassPolicy::widen}, {"error", MassPolicy::error}, {"report", MassPolicy::report}};

std::vector<double> linspace(Fields& f, const std::string& key) {
  Fields r = f.object(key);
  const double start = r.number("start");
  const double stop = r.number("stop");
  const std::size_t n = r.count("count", 0);
  r.finish();
  if (n == 0) r.fail("count", "must be >= 1");
  if (n == 1) return {start};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = stop;
  return out;
}

std::vector<double> number_list(Fields& f, const std::string& key) {
  const json& v = f.raw(key);
  if (v.is_object()) return linspace(f, key);
  return f.numbers(key);
}

void parse_params(Fields& root, Scenario& s) {
  if (!root.has("params")) root.fail("params", "missing required field");
  Fields p = root.object("params");
  s.params.alpha = p.complex("alpha", {0.0, 0.0});
  s.params.beta = p.complex("beta", {0.0, 0.0});
  if (p.has("physical")) {
    if (p.has("k") || p.has("r") || p.has("gamma")) {
      p.fail("physical", "give either physical parameters or k, r, gamma, not both");
    }
    Fields ph = p.object("physical");
    PhysicalInput in;
    in.params.omega_0 = ph.number("omega_0");
    in.params.omega_m = ph.number("omega_m");
    in.params.length = ph.number("length");
    in.params.mass = ph.number("mass");
    in.gamma_absolute = ph.number("gamma_absolute", 0.0);
    ph.finish();
    try {
      in.params.validate();
    } catch (const ParameterError& e) {
      ph.fail("", e.what());
    }
    if (in.gamma_absolute < 0.0) ph.fail("gamma_absolute", "must be >= 0");
    s.physical = in;
    const Coupling c = coupling_from_physical(in.params);
    s.params.k = c.k;
    s.params.r = c.r;
    s.params.gamma = in.gamma_absolute / in.params.omega_m;
  } else {
    if (s.mode != ScenarioMode::multimode) s.params.k = p.number("k");
    else s.params.k = p.number("k", 0.0);
    s.params.r = p.number("r", 1.0);
    s.params.gamma = p.number("gamma", 0.0);
  }
  p.finish();
  for (const char* key : {"k", "r", "gamma"}) {
    const double v = key[0] == 'k' ? s.params.k : key[0] == 'r' ? s.params.r : s.params.gamma;
    if (v < 0.0) throw ScenarioError("params." + std::string(key) + ": must be >= 0");
  }
}

void parse_multimode(Fields& root, Scenario& s) {
  if (!root.has("multimode")) {
    if (s.mode == ScenarioMode::multimode) root.fail("multimode", "missing required field for mode multimode");
    return;
  }
  if (s.mode != ScenarioMode::multimode) root.fail("multimode", "only applies to mode multimode");
  Fields m = root.object("multimode");
  MultimodeConfig c;
  const std::vector<double> etas = m.numbers("eta");
  if (etas.size() > 3) m.fail("eta", "at most three field modes are supported");
  for (double e : etas) {
    if (e != std::floor(e) || e < 1) m.fail("eta", "entries must be positive integers");
    c.eta.push_back(static_cast<int>(e));
  }
  c.k1 = m.number("k1");
  c.p = m.has("p") ? m.integer("p") : 1;
  const json& a = m.raw("alphas");
  if (!a.is_array()) m.fail("alphas", "expected an array");
  for (std::size_t i = 0; i < a.size(); ++i) c.alphas.push_back(Fields::as_complex(a[i], m.where("alphas") + "[" + std::to_string(i) + "]"));
  if (m.has("dims")) {
    for (double d : m.numbers("dims")) {
      if (d != std::floor(d) || d < 1) m.fail("dims", "entries must be positive integers");
      s.multimode_dims.push_back(static_cast<std::size_t>(d));
    }
    if (s.multimode_dims.size() != c.eta.size()) m.fail("dims", "needs one entry per mode");
  }
  m.finish();
  try {
    c.validate();
  } catch (const ParameterError& e) {
    m.fail("", e.what());
  }
  s.multimode = c;
}

void parse_wigner(Fields& root, Scenario& s) {
  if (!root.has("wigner")) return;
  Fields w = root.object("wigner");
  s.wigner_source = pick(w, "source", kSources, WignerSource::field);
  if (w.has("grid")) {
    Fields g = w.object("grid");
    WignerGridSpec& spec = s.grid;
    spec.x_min = g.number("x_min", spec.x_min);
    spec.x_max = g.number("x_max", spec.x_max);
    spec.y_min = g.number("y_min", spec.y_min);
    spec.y_max = g.number("y_max", spec.y_max);
    spec.nx = g.count("nx", spec.nx);
    spec.ny = g.count("ny", spec.ny);
    spec.on_deficit = pick(g, "on_deficit", kPolicies, spec.on_deficit);
    spec.mass_tolerance = g.number("mass_tolerance", spec.mass_tolerance);
    g.finish();
    try {
      spec.validate();
    } catch (const GridError& e) {
      g.fail("", e.what());
    }
  }
  w.finish();
}

void parse_damped(Fields& root, Scenario& s) {
  if (!root.has("damped")) return;
  Fields d = root.object("damped");
  s.damped_method = pick(d, "method", kMethods, s.damped_method);
  s.damped_phase = pick(d, "phase", kPhases, s.damped_phase);
  s.damped_output = pick(d, "output", kOutputs, s.damped_output);
  s.trotter_steps = d.count("trotter_steps", s.trotter_steps);
  if (s.trotter_steps == 0) d.fail("trotter_steps", "must be >= 1");
  s.exponent_table = d.count("exponent_table", 0);
  if (d.has("integrator")) {
    Fields i = d.object("integrator");
    s.integrator.atol = i.number("atol", s.integrator.atol);
    s.integrator.rtol = i.number("rtol", s.integrator.rtol);
    s.integrator.max_step = i.number("max_step", s.integrator.max_step);
    i.finish();
    try {
      s.integrator.validate();
    } catch (const ParameterError& e) {
      i.fail("", e.what());
    }
  }
  d.finish();
}

void check_consistency(const Scenario& s) {
  const bool sweeps_x = s.sweep && s.sweep->param == "x";
  const bool needs_x = s.mode == ScenarioMode::measure_mirror || s.mode == ScenarioMode::measure_field ||
                       (s.mode == ScenarioMode::wigner && (s.wigner_source == WignerSource::measured_field ||
                                                           s.wigner_source == WignerSource::measured_mirror));
  if (needs_x && !s.measurement_x && !sweeps_x) {
    throw ScenarioError("measurement.x: missing required field for mode " + to_string(s.mode));
  }
  if (s.mode == ScenarioMode::density && s.outcome_grid.empty()) {
    throw ScenarioError("outcomes: missing required field for mode density");
  }
  for (double t : s.times) {
    if (t < 0.0) throw ScenarioError("times: entries must be >= 0");
  }
  if (s.sweep) {
    static const std::set<std::string> allowed = {"k", "gamma", "alpha", "beta", "x", "omega_m"};
    if (!allowed.contains(s.sweep->param)) {
      throw ScenarioError("sweep.param: unknown parameter '" + s.sweep->param + "' (expected k, gamma, alpha, beta, x or omega_m)");
    }
    if (s.sweep->param == "omega_m" && !s.physical) {
      throw ScenarioError("sweep.param: omega_m sweeps need params.physical");
    }
    if ((s.sweep->param == "k" || s.sweep->param == "gamma") && s.physical) {
      throw ScenarioError("sweep.param: " + s.sweep->param + " is derived from params.physical; sweep omega_m instead");
    }
    if (s.sweep->param == "x" && !needs_x && s.mode != ScenarioMode::density) {
      throw ScenarioError("sweep.param: x only applies to measurement modes");
    }
    for (double v : s.sweep->values) {
      if ((s.sweep->param == "k" || s.sweep->param == "gamma" || s.sweep->param == "omega_m") && v < 0.0) {
        throw ScenarioError("sweep.values: " + s.sweep->param + " must be >= 0");
      }
    }
  }
  const bool damped_run = s.mode == ScenarioMode::damped || s.params.gamma > 0.0 ||
                          (s.physical && s.physical->gamma_absolute > 0.0) ||
                          (s.sweep && s.sweep->param == "gamma");
  if (damped_run && s.damped_method == DampedMethod::analytic && std::abs(s.params.beta) != 0.0 &&
      s.mode != ScenarioMode::multimode) {
    throw ScenarioError("params.beta: the analytic damped solution needs beta = 0; set damped.method to lindblad or trotter");
  }
  if (damped_run && s.mode == ScenarioMode::wigner &&
      (s.wigner_source == WignerSource::measured_field || s.wigner_source == WignerSource::measured_mirror)) {
    throw ScenarioError("wigner.source: measured sources are undamped; set gamma to 0");
  }
  if (damped_run && (s.mode == ScenarioMode::measure_mirror || s.mode == ScenarioMode::measure_field ||
                     s.mode == ScenarioMode::density || s.mode == ScenarioMode::multimode ||
                     s.mode == ScenarioMode::evolve)) {
    throw ScenarioError("params.gamma: mode " + to_string(s.mode) + " is undamped; use mode damped, wigner or entropy");
  }
  if (s.damped_method != DampedMethod::analytic) {
    if (!std::is_sorted(s.times.begin(), s.times.end())) {
      throw ScenarioError("times: the lindblad and trotter methods need ascending times");
    }
    if (s.mode == ScenarioMode::entropy) {
      throw ScenarioError("damped.method: entropy curves use the analytic solution");
    }
  }
}

}  // namespace

std::string to_string(ScenarioMode mode) {
  for (const auto& [name, value] : kModes) {
    if (value == mode) return name;
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto pos = what.find("parse error"); pos != std::string::npos) what = what.substr(pos);
    throw ScenarioError(source + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
  }
  try {
    Fields root(doc, "");
    Scenario s;
    if (!root.has("schema_version")) root.fail("schema_version", "missing required field");
    s.schema_version = root.integer("schema_version");
    if (s.schema_version != kScenarioSchemaVersion) {
      root.fail("schema_version", "unsupported version " + std::to_string(s.schema_version) + " (this build reads " +
                                      std::to_string(kScenarioSchemaVersion) + ")");
    }
    s.name = root.text("name", "scenario");
    root.text("description", "");
    if (!root.has("mode")) root.fail("mode", "missing required field");
    s.mode = pick(root, "mode", kModes, ScenarioMode::evolve);
    parse_params(root, s);
    if (!root.has("times")) root.fail("times", "missing required field");
    s.times = number_list(root, "times");
    if (root.has("sweep")) {
      Fields sw = root.object("sweep");
      Sweep sweep;
      sweep.param = sw.text("param");
      sweep.values = sw.numbers("values");
      sw.finish();
      s.sweep = sweep;
    }
    if (root.has("truncation")) {
      Fields t = root.object("truncation");
      s.field_dim = t.count("field", 0);
      s.mirror_dim = t.count("mirror", 0);
      s.tolerance = t.number("tolerance", s.tolerance);
      t.finish();
      if (!(s.tolerance > 0.0 && s.tolerance < 1.0)) t.fail("tolerance", "must lie in (0, 1)");
    }
    if (root.has("measurement")) {
      Fields m = root.object("measurement");
      s.measurement_x = m.number("x");
      m.finish();
    }
    parse_multimode(root, s);
    parse_wigner(root, s);
    if (root.has("outcomes")) {
      Fields o = root.object("outcomes");
      s.outcome_target = pick(o, "target", kTargets, s.outcome_target);
      s.outcome_grid = linspace(o, "grid");
      o.finish();
      if (s.outcome_grid.size() < 2) o.fail("grid", "needs at least 2 points");
    }
    parse_damped(root, s);
    if (root.has("output")) {
      Fields o = root.object("output");
      s.output_dir = o.text("dir", s.output_dir);
      s.prefix = o.text("prefix", "");
      o.finish();
    }
    if (s.prefix.empty()) s.prefix = s.name;
    if (s.prefix.find('/') != std::string::npos) throw ScenarioError("output.prefix: must not contain '/'");
    root.finish();
    check_consistency(s);
    return s;
  } catch (const ScenarioError& e) {
    throw ScenarioError(source + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(source + ": " + e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace optomech
