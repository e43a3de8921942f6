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
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unistd.h>

#include "optomech/fock.hpp"
#include "optomech/metrics.hpp"
#include "optomech/oracle.hpp"
#include "optomech/scenario.hpp"

namespace optomech {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string padded(std::size_t i, std::size_t count) {
  const std::size_t width = std::to_string(count > 0 ? count - 1 : 0).size();
  std::string s = std::to_string(i);
  return std::string(width - std::min(width, s.size()), '0') + s;
}

// One point of a sweep: the effective parameters plus a measurement outcome.
struct Case {
  ScaledParams params;
  std::optional<double> x;
  std::string tag;    ///< File-name fragment, empty without a sweep.
  std::string label;  ///< Human-readable sweep value.
  std::string sweep;  ///< "param=value" at full precision, for file headers.
  std::optional<PhysicalInput> physical;
  double timescale = -1.0;  ///< Decoherence time in seconds, physical input only.
};

ScaledParams from_physical(const PhysicalInput& in, const ScaledParams& base) {
  const Coupling c = coupling_from_physical(in.params);
  ScaledParams p = base;
  p.k = c.k;
  p.r = c.r;
  p.gamma = in.gamma_absolute / in.params.omega_m;
  return p;
}

std::vector<Case> expand(const Scenario& s) {
  auto make = [&](std::optional<PhysicalInput> phys, ScaledParams p, std::optional<double> x) {
    Case c;
    c.params = phys ? from_physical(*phys, p) : p;
    c.x = x;
    c.physical = phys;
    if (phys) c.timescale = decoherence_timescale(phys->params, phys->gamma_absolute);
    return c;
  };
  if (!s.sweep) return {make(s.physical, s.params, s.measurement_x)};
  std::vector<Case> out;
  const Sweep& sw = *s.sweep;
  for (std::size_t i = 0; i < sw.values.size(); ++i) {
    const double v = sw.values[i];
    ScaledParams p = s.params;
    std::optional<PhysicalInput> phys = s.physical;
    std::optional<double> x = s.measurement_x;
    if (sw.param == "k") p.k = v;
    else if (sw.param == "gamma") p.gamma = v;
    else if (sw.param == "alpha") p.alpha = {v, 0.0};
    else if (sw.param == "beta") p.beta = {v, 0.0};
    else if (sw.param == "x") x = v;
    else if (sw.param == "omega_m") phys->params.omega_m = v;
    Case c = make(phys, p, x);
    c.tag = "_" + sw.param + padded(i, sw.values.size());
    c.label = sw.param + "=" + short_number(v);
    c.sweep = sw.param + "=" + format_double(v);
    out.push_back(std::move(c));
  }
  return out;
}

double dim_tolerance(const Scenario& s) { return 1e-2 * s.tolerance; }

TruncationDims dims_for(const Scenario& s, const ScaledParams& p) {
  TruncationDims d = default_dims(p, dim_tolerance(s));
  if (s.field_dim) d.field = s.field_dim;
  if (s.mirror_dim) d.mirror = s.mirror_dim;
  return d;
}

Dims multimode_field_dims(const Scenario& s) {
  if (!s.multimode_dims.empty()) return s.multimode_dims;
  Dims d;
  for (Complex a : s.multimode->alphas) d.push_back(dim_for_amplitude(std::abs(a), dim_tolerance(s)));
  return d;
}

std::size_t multimode_mirror_guess(const Scenario& s, Complex beta) {
  if (s.mirror_dim) return s.mirror_dim;
  double reach = std::abs(beta);
  const MultimodeConfig& c = *s.multimode;
  for (std::size_t j = 0; j < c.eta.size(); ++j) {
    const double a = std::abs(c.alphas[j]);
    reach += 2.0 * c.k1 * c.eta[j] * (a * a + 4.0 * a + 4.0);
  }
  return dim_for_amplitude(reach, dim_tolerance(s));
}

// --- CSV ----------------------------------------------------------------

class Csv {
 public:
  Csv(const Scenario& s, const Case& c) {
    line("optomech scenario output");
    field("schema_version", std::to_string(kScenarioSchemaVersion));
    field("scenario", s.name);
    field("mode", to_string(s.mode));
    if (!c.sweep.empty()) field("sweep", c.sweep);
    if (c.physical) {
      const PhysicalParams& ph = c.physical->params;
      field("omega_0", format_double(ph.omega_0));
      field("omega_m", format_double(ph.omega_m));
      field("length", format_double(ph.length));
      field("mass", format_double(ph.mass));
      field("gamma_absolute", format_double(c.physical->gamma_absolute));
    }
    const ScaledParams& p = c.params;
    if (s.mode != ScenarioMode::multimode) {
      field("k", format_double(p.k));
      field("r", format_double(p.r));
      field("gamma", format_double(p.gamma));
      field("alpha", format_double(p.alpha.real()) + "," + format_double(p.alpha.imag()));
    }
    field("beta", format_double(p.beta.real()) + "," + format_double(p.beta.imag()));
    if (c.x) field("x_measured", format_double(*c.x));
  }

  void line(const std::string& text) { head_ += "# " + text + "\n"; }
  void line_raw(const std::string& text) { body_ += text + '\n'; }
  void field(const std::string& key, const std::string& value) { line(key + ": " + value); }

  void columns(std::initializer_list<std::string> names) {
    std::string joined;
    for (const auto& n : names) joined += (joined.empty() ? "" : ",") + n;
    field("columns", joined);
    head_ += joined + "\n";
  }

  template <class... T>
  void row(const T&... values) {
    bool first = true;
    ((body_ += (first ? "" : ","), body_ += cell(values), first = false), ...);
    body_ += '\n';
  }

  std::string str() const { return head_ + body_; }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }

  std::string head_;
  std::string body_;
};

class Runner {
 public:
  Runner(const Scenario& s, std::filesystem::path dir) : s_(s), dir_(std::move(dir)) {}

  RunSummary run() {
    const auto start = Clock::now();
    std::filesystem::create_directories(dir_);
    for (const Case& c : expand(s_)) run_case(c);
    summary_.seconds = seconds_since(start);
    const auto path = dir_ / (s_.prefix + "_summary.txt");
    write_file_atomic(path, format_summary(summary_));
    summary_.files.push_back(path);
    return summary_;
  }

 private:
  std::string time_tag(std::size_t i) const {
    return s_.times.size() > 1 ? "_t" + padded(i, s_.times.size()) : "";
  }

  void emit(const std::string& stem, const Csv& csv) {
    const auto path = dir_ / (stem + ".csv");
    write_file_atomic(path, csv.str());
    summary_.files.push_back(path);
  }

  RunEntry& entry(const Case& c, double t, Clock::time_point start) {
    RunEntry e;
    e.label = (c.label.empty() ? "" : c.label + " ") + "t=" + short_number(t);
    e.seconds = seconds_since(start);
    summary_.entries.push_back(e);
    return summary_.entries.back();
  }

  void run_case(const Case& c) {
    switch (s_.mode) {
      case ScenarioMode::evolve: return evolve(c);
      case ScenarioMode::damped: return damped(c);
      case ScenarioMode::measure_mirror: return measure(c, true);
      case ScenarioMode::measure_field: return measure(c, false);
      case ScenarioMode::multimode: return multimode(c);
      case ScenarioMode::wigner: return wigner_mode(c);
      case ScenarioMode::entropy: return entropy(c);
      case ScenarioMode::density: return density(c);
    }
  }

  void state_rows(Csv& csv, const StateVector& psi) {
    const auto st = strides(psi.mode_dims());
    const Vector& a = psi.amplitudes();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      std::string idx;
      for (std::size_t m = 0; m < st.size(); ++m) {
        idx += std::to_string((static_cast<std::size_t>(i) / st[m]) % psi.mode_dims()[m]) + ",";
      }
      rows_raw(csv, idx, a(i));
    }
  }

  void density_rows(Csv& csv, const DensityOperator& rho) {
    const auto& dims = rho.mode_dims();
    const auto st = strides(dims);
    const Matrix& m = rho.matrix();
    auto split = [&](Eigen::Index i) {
      std::string idx;
      for (std::size_t k = 0; k < st.size(); ++k) idx += std::to_string((static_cast<std::size_t>(i) / st[k]) % dims[k]) + ",";
      return idx;
    };
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const std::string row = split(i);
      for (Eigen::Index j = 0; j < m.cols(); ++j) rows_raw(csv, row + split(j), m(i, j));
    }
  }

  static void rows_raw(Csv& csv, const std::string& prefix, Complex v) {
    csv.line_raw(prefix + format_double(v.real()) + "," + format_double(v.imag()));
  }

  void evolve(const Case& c) {
    for (std::size_t i = 0; i < s_.times.size(); ++i) {
      const auto start = Clock::now();
      const double t = s_.times[i];
      const TruncationDims d = dims_for(s_, c.params);
      const JointState js = joint_state(c.params, t, d.field, d.mirror, s_.tolerance);
      Csv csv(s_, c);
      csv.field("t", format_double(t));
      csv.field("dims", std::to_string(d.field) + "," + std::to_string(d.mirror));
      csv.field("truncation_loss", format_double(js.truncation_loss));
      csv.columns({"n", "m", "re", "im"});
      state_rows(csv, js.state);
      emit(s_.prefix + c.tag + time_tag(i), csv);
      RunEntry& e = entry(c, t, start);
      e.field_dim = d.field;
      e.mirror_dim = d.mirror;
      e.truncation_loss = js.truncation_loss;
      e.norm = 1.0 - js.truncation_loss;
    }
  }

  // Field, mirror or joint density from one of the damped solvers.
  struct DampedStates {
    std::vector<DensityOperator> states;
    std::vector<double> losses;
    std::vector<double> seconds;  ///< Time spent on each state.
  };

  DampedStates damped_states(const ScaledParams& p, const TruncationDims& d, DampedOutput out) {
    DampedStates r;
    if (s_.damped_method == DampedMethod::analytic) {
      for (double t : s_.times) {
        const auto start = Clock::now();
        DampedDensity dd = out == DampedOutput::field    ? damped_field_state(p, t, d.field, s_.tolerance, s_.damped_phase)
                           : out == DampedOutput::mirror ? damped_mirror_state(p, t, d.field, d.mirror, s_.tolerance)
                                                         : damped_density(p, t, d.field, d.mirror, s_.tolerance, s_.damped_phase);
        r.states.push_back(std::move(dd.rho));
        r.losses.push_back(dd.renormalization);
        r.seconds.push_back(seconds_since(start));
      }
      return r;
    }
    const JointState start_state = joint_state(ScaledParams{.k = p.k, .r = p.r, .alpha = p.alpha, .beta = p.beta}, 0.0,
                                         d.field, d.mirror, s_.tolerance);
    const bool trotter = s_.damped_method == DampedMethod::trotter;
    DensityOperator rho = trotter ? DensityOperator({1}, Matrix::Identity(1, 1)) : DensityOperator::from_pure(start_state.state);
    BranchState branches;
    if (trotter) branches = product_branches(p.alpha, p.beta, d.field, d.mirror);
    const double t_last = s_.times.back();
    double now = 0.0;
    for (double t : s_.times) {
      const auto start = Clock::now();
      if (t > now) {
        if (s_.damped_method == DampedMethod::lindblad) {
          rho = integrate_lindblad(rho, p, t - now, s_.integrator);
        } else {
          const auto steps = static_cast<std::size_t>(
              std::max(1.0, std::round(static_cast<double>(s_.trotter_steps) * (t - now) / t_last)));
          branches = trotter_evolve(std::move(branches), p, t - now, steps);
        }
        now = t;
      }
      if (trotter) {
        r.states.push_back(out == DampedOutput::field    ? branch_field_state(branches)
                           : out == DampedOutput::mirror ? branch_mirror_state(branches)
                                                         : assemble_branches(branches));
      } else {
        r.states.push_back(out == DampedOutput::field    ? partial_trace(rho, {0})
                           : out == DampedOutput::mirror ? partial_trace(rho, {1})
                                                         : rho);
      }
      r.losses.push_back(start_state.truncation_loss);
      r.seconds.push_back(seconds_since(start));
    }
    return r;
  }

  static std::string method_name(DampedMethod m) {
    return m == DampedMethod::analytic ? "analytic" : m == DampedMethod::lindblad ? "lindblad" : "trotter";
  }

  void damped(const Case& c) {
    const auto start = Clock::now();
    const TruncationDims d = dims_for(s_, c.params);
    const DampedStates r = damped_states(c.params, d, s_.damped_output);
    const char* which = s_.damped_output == DampedOutput::field ? "field" : s_.damped_output == DampedOutput::mirror ? "mirror" : "joint";
    for (std::size_t i = 0; i < s_.times.size(); ++i) {
      const double t = s_.times[i];
      Csv csv(s_, c);
      csv.field("t", format_double(t));
      csv.field("method", method_name(s_.damped_method));
      csv.field("phase", s_.damped_phase == DampedPhase::exact ? "exact" : "printed");
      csv.field("subsystem", which);
      csv.field("dims", std::to_string(d.field) + "," + std::to_string(d.mirror));
      csv.field("truncation_loss", format_double(r.losses[i]));
      if (s_.damped_output == DampedOutput::joint) csv.columns({"n", "m", "n2", "m2", "re", "im"});
      else csv.columns({"row", "col", "re", "im"});
      density_rows(csv, r.states[i]);
      emit(s_.prefix + c.tag + time_tag(i), csv);
      RunEntry& e = entry(c, t, start);
      e.field_dim = d.field;
      e.mirror_dim = d.mirror;
      e.truncation_loss = r.losses[i];
      e.norm = 1.0 - r.losses[i];
      e.seconds = r.seconds[i];
      e.note = "purity=" + short_number(purity(r.states[i]));
      if (c.timescale >= 0.0) e.note += " tau_d=" + short_number(c.timescale) + "s";
    }
    if (s_.exponent_table > 0) {
      Csv csv(s_, c);
      csv.columns({"t", "n", "m", "D", "attenuation"});
      for (double t : s_.times) {
        for (std::size_t n = 0; n < s_.exponent_table; ++n) {
          for (std::size_t m = 0; m < s_.exponent_table; ++m) {
            const double D = decoherence_D(static_cast<double>(n), static_cast<double>(m), c.params.k, c.params.gamma, t);
            csv.row(t, n, m, D, std::exp(-D));
          }
        }
      }
      emit(s_.prefix + c.tag + "_exponent", csv);
    }
  }

  void measure(const Case& c, bool mirror_measured) {
    for (std::size_t i = 0; i < s_.times.size(); ++i) {
      const auto start = Clock::now();
      const double t = s_.times[i];
      const TruncationDims d = dims_for(s_, c.params);
      const JointState js = joint_state(c.params, t, d.field, d.mirror, s_.tolerance);
      Csv csv(s_, c);
      csv.field("t", format_double(t));
      csv.field("dims", std::to_string(d.field) + "," + std::to_string(d.mirror));
      csv.field("truncation_loss", format_double(js.truncation_loss));
      double born = 0.0;
      if (mirror_measured) {
        const FieldProjection fp = project_mirror_position(js.state, *c.x, t);
        born = fp.record.norm;
        csv.field("outcome_density", format_double(born));
        csv.columns({"n", "re", "im"});
        state_rows(csv, fp.field_state);
      } else {
        const MirrorProjection mp = project_field_quadrature(js.state, *c.x, t);
        born = mp.record.norm;
        csv.field("outcome_density", format_double(born));
        csv.columns({"m", "re", "im"});
        state_rows(csv, mp.mirror_state);
      }
      emit(s_.prefix + c.tag + time_tag(i), csv);
      RunEntry& e = entry(c, t, start);
      e.field_dim = d.field;
      e.mirror_dim = d.mirror;
      e.truncation_loss = js.truncation_loss;
      e.norm = born;
      e.note = "x=" + short_number(*c.x);
    }
  }

  void multimode(const Case& c) {
    const Dims fd = multimode_field_dims(s_);
    std::size_t M = multimode_mirror_guess(s_, c.params.beta);
    for (std::size_t i = 0; i < s_.times.size(); ++i) {
      const auto start = Clock::now();
      const double t = s_.times[i];
      std::optional<JointState> js;
      for (int attempt = 0; !js; ++attempt) {
        try {
          js = multimode_joint_state(*s_.multimode, c.params.beta, t, fd, M, s_.tolerance);
        } catch (const TruncationError& e) {
          if (s_.mirror_dim || e.mode() != "mirror" || attempt > 2) throw;
          M = e.needed_dim();
        }
      }
      Csv csv(s_, c);
      csv.field("t", format_double(t));
      std::string dims;
      for (std::size_t f : fd) dims += std::to_string(f) + ",";
      csv.field("dims", dims + std::to_string(M));
      const MultimodeConfig& mc = *s_.multimode;
      std::string eta, alphas;
      for (std::size_t j = 0; j < mc.eta.size(); ++j) {
        eta += (j ? "," : "") + std::to_string(mc.eta[j]);
        alphas += (j ? ";" : "") + format_double(mc.alphas[j].real()) + "," + format_double(mc.alphas[j].imag());
      }
      csv.field("k1", format_double(mc.k1));
      csv.field("eta", eta);
      csv.field("p", std::to_string(mc.p));
      csv.field("alphas", alphas);
      csv.field("truncation_loss", format_double(js->truncation_loss));
      if (fd.size() == 1) csv.columns({"n1", "m", "re", "im"});
      else if (fd.size() == 2) csv.columns({"n1", "n2", "m", "re", "im"});
      else if (fd.size() == 3) csv.columns({"n1", "n2", "n3", "m", "re", "im"});
      else throw ScenarioError("multimode.eta: CSV export supports up to three field modes");
      state_rows(csv, js->state);
      emit(s_.prefix + c.tag + time_tag(i), csv);
      RunEntry& e = entry(c, t, start);
      e.field_dim = total_dim(fd);
      e.mirror_dim = M;
      e.truncation_loss = js->truncation_loss;
      e.norm = 1.0 - js->truncation_loss;
    }
  }

  void wigner_mode(const Case& c) {
    const TruncationDims d = dims_for(s_, c.params);
    const bool damped_run = c.params.gamma > 0.0 || s_.damped_method != DampedMethod::analytic;
    std::optional<DampedStates> damped_field;
    const bool use_damped_fock = damped_run && (s_.wigner_source == WignerSource::field ||
                                                s_.damped_method != DampedMethod::analytic);
    if (use_damped_fock) {
      damped_field = damped_states(c.params, d, s_.wigner_source == WignerSource::field ? DampedOutput::field : DampedOutput::mirror);
    }
    for (std::size_t i = 0; i < s_.times.size(); ++i) {
      const auto start = Clock::now();
      const double t = s_.times[i];
      double loss = 0.0;
      WignerGrid g;
      if (damped_field) {
        loss = damped_field->losses[i];
        g = wigner(damped_field->states[i], s_.grid);
      } else if (s_.wigner_source == WignerSource::mirror) {
        loss = coherent_tail(std::abs(c.params.alpha), d.field);
        g = wigner(mirror_branches(c.params, t, d.field, s_.tolerance), s_.grid);
      } else if (s_.wigner_source == WignerSource::measured_mirror) {
        loss = coherent_tail(std::abs(c.params.alpha), d.field);
        g = wigner(projected_mirror_branches(c.params, *c.x, t, d.field, s_.tolerance), s_.grid);
      } else {
        const JointState js = joint_state(c.params, t, d.field, d.mirror, s_.tolerance);
        loss = js.truncation_loss;
        if (s_.wigner_source == WignerSource::field) g = wigner(partial_trace(js.state, {0}), s_.grid);
        else g = wigner(project_mirror_position(js.state, *c.x, t).field_state, s_.grid);
      }
      const NegativityCertificate neg = negativity(g);
      Csv csv(s_, c);
      csv.field("t", format_double(t));
      csv.field("source", source_name());
      if (damped_run) csv.field("method", method_name(s_.damped_method));
      csv.field("dims", std::to_string(d.field) + "," + std::to_string(d.mirror));
      csv.field("truncation_loss", format_double(loss));
      csv.field("grid", format_double(g.x_axis(0)) + "," + format_double(g.x_axis(g.x_axis.size() - 1)) + "," +
                            std::to_string(g.x_axis.size()) + "," + format_double(g.y_axis(0)) + "," +
                            format_double(g.y_axis(g.y_axis.size() - 1)) + "," + std::to_string(g.y_axis.size()));
      csv.field("mass", format_double(g.mass));
      csv.field("widenings", std::to_string(g.widenings));
      csv.field("min_W", format_double(neg.min_value) + " at " + format_double(neg.x) + "," + format_double(neg.y));
      csv.columns({"x", "y", "W"});
      for (Eigen::Index a = 0; a < g.x_axis.size(); ++a) {
        for (Eigen::Index b = 0; b < g.y_axis.size(); ++b) csv.row(g.x_axis(a), g.y_axis(b), g.values(a, b));
      }
      emit(s_.prefix + c.tag + time_tag(i), csv);
      RunEntry& e = entry(c, t, start);
      e.field_dim = d.field;
      e.mirror_dim = d.mirror;
      e.truncation_loss = loss;
      e.norm = g.mass;
      e.note = "min W=" + short_number(neg.min_value) + (g.diagnostic.empty() ? "" : " (" + g.diagnostic + ")");
    }
  }

  std::string source_name() const {
    switch (s_.wigner_source) {
      case WignerSource::field: return "field";
      case WignerSource::mirror: return "mirror";
      case WignerSource::measured_field: return "measured-field";
      case WignerSource::measured_mirror: return "measured-mirror";
    }
    return "";
  }

  void entropy(const Case& c) {
    const auto start = Clock::now();
    const TruncationDims d = dims_for(s_, c.params);
    EntropyScenario es{.params = c.params, .damped = c.params.gamma > 0.0, .field_dim = d.field,
                       .mirror_dim = d.mirror, .tolerance = s_.tolerance};
    const auto curve = entropy_curve(es, s_.times);
    Csv csv(s_, c);
    csv.field("damped", es.damped ? "true" : "false");
    csv.field("dims", std::to_string(d.field) + "," + std::to_string(d.mirror));
    double worst = 0.0;
    for (const auto& pt : curve) worst = std::max(worst, pt.truncation_loss);
    csv.field("max_truncation_loss", format_double(worst));
    csv.columns({"t", "S"});
    for (const auto& pt : curve) csv.row(pt.t, pt.entropy);
    emit(s_.prefix + c.tag, csv);
    RunEntry e;
    e.label = c.label.empty() ? "curve" : c.label;
    e.field_dim = d.field;
    e.mirror_dim = d.mirror;
    e.truncation_loss = worst;
    e.norm = 1.0 - worst;
    e.seconds = seconds_since(start);
    const auto peak = std::max_element(curve.begin(), curve.end(),
                                       [](const EntropyPoint& a, const EntropyPoint& b) { return a.entropy < b.entropy; });
    e.note = "max S=" + short_number(peak->entropy) + " at t=" + short_number(peak->t) +
             ", final S=" + short_number(curve.back().entropy);
    summary_.entries.push_back(e);
  }

  void density(const Case& c) {
    for (std::size_t i = 0; i < s_.times.size(); ++i) {
      const auto start = Clock::now();
      const double t = s_.times[i];
      const TruncationDims d = dims_for(s_, c.params);
      const JointState js = joint_state(c.params, t, d.field, d.mirror, s_.tolerance);
      const auto p = outcome_density(js.state, s_.outcome_target, s_.outcome_grid);
      Csv csv(s_, c);
      csv.field("t", format_double(t));
      csv.field("target", s_.outcome_target == MeasurementTarget::mirror_position ? "mirror-position" : "field-quadrature");
      csv.field("dims", std::to_string(d.field) + "," + std::to_string(d.mirror));
      csv.field("truncation_loss", format_double(js.truncation_loss));
      csv.columns({"x", "p"});
      double mass = 0.0;
      for (std::size_t j = 0; j < p.size(); ++j) {
        csv.row(s_.outcome_grid[j], p[j]);
        if (j > 0) mass += 0.5 * (p[j] + p[j - 1]) * (s_.outcome_grid[j] - s_.outcome_grid[j - 1]);
      }
      emit(s_.prefix + c.tag + time_tag(i), csv);
      RunEntry& e = entry(c, t, start);
      e.field_dim = d.field;
      e.mirror_dim = d.mirror;
      e.truncation_loss = js.truncation_loss;
      e.norm = mass;
    }
  }

  const Scenario& s_;
  std::filesystem::path dir_;
  RunSummary summary_;
};

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) value = 0.0;  // folds -0 into 0
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(tmp);
      throw Error("cannot write " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

RunSummary run_scenario(const Scenario& scenario, const RunOptions& options) {
  return Runner(scenario, options.output_dir.value_or(std::filesystem::path(scenario.output_dir))).run();
}

std::string format_summary(const RunSummary& summary) {
  std::ostringstream out;
  for (const RunEntry& e : summary.entries) {
    out << e.label << "  dims=" << e.field_dim << "x" << e.mirror_dim << "  loss=" << short_number(e.truncation_loss)
        << "  norm=" << short_number(e.norm) << "  " << short_number(e.seconds) << "s";
    if (!e.note.empty()) out << "  " << e.note;
    out << "\n";
  }
  out << summary.files.size() << " file(s), " << short_number(summary.seconds) << "s total\n";
  return out.str();
}

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  auto warn = [&](const std::string& w) {
    if (std::find(r.warnings.begin(), r.warnings.end(), w) == r.warnings.end()) r.warnings.push_back(w);
  };
  const std::size_t grid_bytes = s.mode == ScenarioMode::wigner ? s.grid.nx * s.grid.ny * sizeof(double) : 0;
  for (const Case& c : expand(s)) {
    std::size_t bytes = 0;
    if (s.mode == ScenarioMode::multimode) {
      const Dims fd = multimode_field_dims(s);
      const std::size_t M = multimode_mirror_guess(s, c.params.beta);
      r.field_dim = std::max(r.field_dim, total_dim(fd));
      r.mirror_dim = std::max(r.mirror_dim, M);
      bytes = total_dim(fd) * M * sizeof(Complex);
      for (std::size_t j = 0; j < fd.size(); ++j) {
        const std::size_t need = dim_for_amplitude(std::abs(s.multimode->alphas[j]), s.tolerance);
        if (fd[j] < need) {
          warn("multimode.dims[" + std::to_string(j) + "] = " + std::to_string(fd[j]) + " is below the " +
               std::to_string(need) + " levels the mode amplitude needs at tolerance " + short_number(s.tolerance));
        }
      }
    } else {
      const TruncationDims rule = default_dims(c.params, s.tolerance);
      const TruncationDims d = dims_for(s, c.params);
      r.field_dim = std::max(r.field_dim, d.field);
      r.mirror_dim = std::max(r.mirror_dim, d.mirror);
      const std::size_t need_field = dim_for_amplitude(std::abs(c.params.alpha), s.tolerance);
      if (d.field < need_field) {
        warn("truncation.field = " + std::to_string(d.field) + " is below the " + std::to_string(need_field) +
             " levels |alpha| = " + short_number(std::abs(c.params.alpha)) + " needs at tolerance " +
             short_number(s.tolerance));
      }
      if (s.mirror_dim && s.mirror_dim < rule.mirror) {
        warn("truncation.mirror = " + std::to_string(s.mirror_dim) + " is below the " + std::to_string(rule.mirror) +
             " levels a loss below " + short_number(s.tolerance) + " needs" + (c.label.empty() ? "" : " for " + c.label));
      }
      const std::size_t joint = d.field * d.mirror;
      const bool lindblad = (s.mode == ScenarioMode::damped || s.mode == ScenarioMode::wigner) &&
                            s.damped_method == DampedMethod::lindblad;
      const bool joint_output = s.mode == ScenarioMode::damped && s.damped_output == DampedOutput::joint;
      if (lindblad || joint_output) {
        bytes = joint * joint * sizeof(Complex) * (s.damped_method == DampedMethod::lindblad ? 10 : 2);
      } else if (s.mode == ScenarioMode::entropy || (s.mode == ScenarioMode::damped && s.damped_output == DampedOutput::mirror)) {
        bytes = joint * sizeof(Complex) + d.mirror * d.mirror * sizeof(Complex);
      } else {
        bytes = joint * sizeof(Complex) + d.field * d.field * sizeof(Complex);
      }
    }
    r.peak_bytes = std::max(r.peak_bytes, bytes + grid_bytes);
  }
  if (r.peak_bytes > (std::size_t{4} << 30)) warn("predicted peak memory exceeds 4 GiB");
  return r;
}

}  // namespace optomech
