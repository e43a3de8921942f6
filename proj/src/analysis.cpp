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

#include "optomech/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <span>
#include <string>
#include <thread>

#include "optomech/decoherence.hpp"
#include "optomech/errors.hpp"
#include "optomech/evolution.hpp"
#include "optomech/fock.hpp"
#include "optomech/measurement.hpp"
#include "optomech/metrics.hpp"

namespace optomech {
namespace {

constexpr int kMaxWidenings = 4;
constexpr double kWidenFactor = 1.5;

// Bands rho(n, n+d), each cut after its last entry above 1e-16 of the largest
// element. The kernel recursion then only runs over the occupied Fock range.
struct Bands {
  std::size_t dim = 0;
  std::vector<std::size_t> offsets;
  std::vector<std::vector<Complex>> values;
};

Bands collect_bands(const Matrix& rho) {
  Bands b;
  b.dim = static_cast<std::size_t>(rho.rows());
  const double floor = 1e-16 * rho.cwiseAbs().maxCoeff();
  for (std::size_t d = 0; d < b.dim; ++d) {
    std::size_t len = 0;
    for (std::size_t n = 0; n + d < b.dim; ++n) {
      if (std::abs(rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + d))) > floor) len = n + 1;
    }
    if (len == 0) continue;
    std::vector<Complex> band(len);
    for (std::size_t n = 0; n < len; ++n) {
      band[n] = rho(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + d));
    }
    b.offsets.push_back(d);
    b.values.push_back(std::move(band));
  }
  return b;
}

double evaluate(const Bands& b, double x, double y, std::vector<double>& h) {
  const double r = std::hypot(x, y);
  const double theta = std::atan2(y, x);
  double total = 0.0;
  for (std::size_t i = 0; i < b.offsets.size(); ++i) {
    const std::size_t d = b.offsets[i];
    const auto& band = b.values[i];
    laguerre_kernel(r, d, std::span<double>(h.data(), band.size()));
    Complex acc{0.0, 0.0};
    for (std::size_t n = 0; n < band.size(); ++n) {
      acc += (n % 2 == 0 ? h[n] : -h[n]) * band[n];
    }
    if (d == 0) {
      total += acc.real();
    } else {
      total += 2.0 * std::real(std::polar(1.0, static_cast<double>(d) * theta) * acc);
    }
  }
  return total / (2.0 * std::numbers::pi);
}

RealVector axis(double lo, double hi, std::size_t n) {
  if (n == 1) return RealVector::Constant(1, 0.5 * (lo + hi));
  return RealVector::LinSpaced(static_cast<Eigen::Index>(n), lo, hi);
}

double trapezoid_mass(const WignerGrid& g) {
  auto weights = [](const RealVector& a) {
    RealVector w = RealVector::Zero(a.size());
    for (Eigen::Index i = 0; i + 1 < a.size(); ++i) {
      const double half = 0.5 * (a(i + 1) - a(i));
      w(i) += half;
      w(i + 1) += half;
    }
    return w;
  };
  return weights(g.x_axis).dot(g.values * weights(g.y_axis));
}

template <class PointFn>
WignerGrid evaluate_grid(const PointFn& point, const WignerGridSpec& spec) {
  WignerGrid g;
  g.x_axis = axis(spec.x_min, spec.x_max, spec.nx);
  g.y_axis = axis(spec.y_min, spec.y_max, spec.ny);
  g.values.resize(static_cast<Eigen::Index>(spec.nx), static_cast<Eigen::Index>(spec.ny));
  const std::size_t workers = std::min(worker_threads(), spec.nx);
  auto run = [&](std::size_t first) {
    for (std::size_t i = first; i < spec.nx; i += workers) {
      for (std::size_t j = 0; j < spec.ny; ++j) {
        g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            point(g.x_axis(static_cast<Eigen::Index>(i)), g.y_axis(static_cast<Eigen::Index>(j)));
      }
    }
  };
  if (workers <= 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  g.mass = trapezoid_mass(g);
  return g;
}

WignerGridSpec widened(const WignerGridSpec& s) {
  WignerGridSpec w = s;
  const double cx = 0.5 * (s.x_min + s.x_max), hx = 0.5 * (s.x_max - s.x_min) * kWidenFactor;
  const double cy = 0.5 * (s.y_min + s.y_max), hy = 0.5 * (s.y_max - s.y_min) * kWidenFactor;
  w.x_min = cx - hx;
  w.x_max = cx + hx;
  w.y_min = cy - hy;
  w.y_max = cy + hy;
  w.nx = static_cast<std::size_t>(std::lround(static_cast<double>(s.nx - 1) * kWidenFactor)) + 1;
  w.ny = static_cast<std::size_t>(std::lround(static_cast<double>(s.ny - 1) * kWidenFactor)) + 1;
  return w;
}

template <class PointFn>
WignerGrid grid_with_policy(const PointFn& point, const WignerGridSpec& spec) {
  WignerGridSpec current = spec;
  WignerGrid g = evaluate_grid(point, current);
  std::size_t widenings = 0;
  while (std::abs(1.0 - g.mass) > spec.mass_tolerance) {
    const std::string msg = "Wigner grid mass " + std::to_string(g.mass) + " deviates from 1 by more than " +
                            std::to_string(spec.mass_tolerance);
    if (spec.on_deficit == MassPolicy::error ||
        (spec.on_deficit == MassPolicy::widen && widenings == kMaxWidenings)) {
      throw GridError(msg);
    }
    if (spec.on_deficit == MassPolicy::report) {
      g.diagnostic = msg;
      break;
    }
    current = widened(current);
    g = evaluate_grid(point, current);
    ++widenings;
  }
  g.widenings = widenings;
  if (widenings > 0 && g.diagnostic.empty()) {
    g.diagnostic = "grid widened " + std::to_string(widenings) + " time(s) to hold the mass";
  }
  return g;
}

// Wigner function of |a><b| for coherent |a>, |b>, in x = 2 Re z, y = 2 Im z:
//   (1/2 pi) <b|a> exp(-2 (z* - b*)(z - a)).
Complex coherent_cross_wigner(Complex a, Complex b, Complex z) {
  const Complex overlap_log = -0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(b) * a;
  return std::exp(overlap_log - 2.0 * (std::conj(z) - std::conj(b)) * (z - a)) / (2.0 * std::numbers::pi);
}

Complex coherent_overlap(Complex a, Complex b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

}  // namespace

void WignerGridSpec::validate() const {
  if (!(x_max > x_min) || !(y_max > y_min)) throw GridError("grid extents must satisfy min < max");
  if (nx < 2 || ny < 2) throw GridError("grid needs at least 2 points per axis");
  if (!(mass_tolerance > 0.0)) throw GridError("mass_tolerance must be positive");
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("OPTOMECH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double wigner_point(const DensityOperator& rho, double x, double y) {
  if (rho.mode_count() != 1) throw DimensionError("wigner expects a single-mode state; partial_trace first");
  const Bands b = collect_bands(rho.matrix());
  std::vector<double> h(b.dim);
  return evaluate(b, x, y, h);
}

WignerGrid wigner(const DensityOperator& rho, const WignerGridSpec& spec) {
  spec.validate();
  if (rho.mode_count() != 1) throw DimensionError("wigner expects a single-mode state; partial_trace first");
  const Bands b = collect_bands(rho.matrix());
  return grid_with_policy(
      [&b](double x, double y) {
        thread_local std::vector<double> h;
        h.resize(b.dim);
        return evaluate(b, x, y, h);
      },
      spec);
}

WignerGrid wigner(const StateVector& psi, const WignerGridSpec& spec) {
  return wigner(DensityOperator::from_pure(psi.normalize()), spec);
}

void CoherentEnsemble::validate() const {
  if (members.empty()) throw ParameterError("coherent ensemble has no members");
  double total = 0.0;
  for (const Member& m : members) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) throw ParameterError("ensemble weights must be >= 0");
    if (m.coefficients.size() != m.amplitudes.size() || m.amplitudes.empty()) {
      throw ParameterError("ensemble member needs one coefficient per coherent amplitude");
    }
    total += m.weight;
  }
  if (!(total > 0.0)) throw ZeroNormError("ensemble weights sum to zero");
}

CoherentEnsemble coherent_ensemble(const CatSpec& spec) {
  spec.validate();
  if (spec.mode_count() != 1) throw DimensionError("coherent ensemble is single-mode");
  CoherentEnsemble e;
  CoherentEnsemble::Member m;
  for (const CatComponent& c : spec.components) {
    m.coefficients.push_back(c.coefficient);
    m.amplitudes.push_back(c.amplitudes.front());
  }
  e.members.push_back(std::move(m));
  return e;
}

namespace {

// Members with weights folded into 1 / (sum w * <psi|psi>).
struct PreparedEnsemble {
  std::vector<double> scale;
  const CoherentEnsemble* source = nullptr;
};

PreparedEnsemble prepare(const CoherentEnsemble& e) {
  e.validate();
  double total = 0.0;
  for (const auto& m : e.members) total += m.weight;
  PreparedEnsemble p{{}, &e};
  for (const auto& m : e.members) {
    Complex norm{0.0, 0.0};
    for (std::size_t j = 0; j < m.amplitudes.size(); ++j) {
      for (std::size_t k = 0; k < m.amplitudes.size(); ++k) {
        norm += std::conj(m.coefficients[k]) * m.coefficients[j] * coherent_overlap(m.amplitudes[k], m.amplitudes[j]);
      }
    }
    if (m.weight > 0.0 && !(norm.real() > 0.0)) throw ZeroNormError("ensemble member has zero norm");
    p.scale.push_back(m.weight > 0.0 ? m.weight / (total * norm.real()) : 0.0);
  }
  return p;
}

double ensemble_point(const PreparedEnsemble& p, double x, double y) {
  const Complex z(0.5 * x, 0.5 * y);
  double total = 0.0;
  for (std::size_t i = 0; i < p.scale.size(); ++i) {
    if (p.scale[i] == 0.0) continue;
    const auto& m = p.source->members[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < m.amplitudes.size(); ++j) {
      acc += std::norm(m.coefficients[j]) * coherent_cross_wigner(m.amplitudes[j], m.amplitudes[j], z).real();
      for (std::size_t k = 0; k < j; ++k) {
        acc += 2.0 * std::real(m.coefficients[j] * std::conj(m.coefficients[k]) *
                               coherent_cross_wigner(m.amplitudes[j], m.amplitudes[k], z));
      }
    }
    total += p.scale[i] * acc;
  }
  return total;
}

void check_field_tail(const ScaledParams& params, std::size_t field_dim, double tolerance) {
  const double tail = coherent_tail(std::abs(params.alpha), field_dim);
  if (tail > tolerance) {
    throw TruncationError("field", field_dim, dim_for_amplitude(std::abs(params.alpha), tolerance), tail);
  }
}

}  // namespace

WignerGrid wigner(const CoherentEnsemble& ensemble, const WignerGridSpec& spec) {
  spec.validate();
  const PreparedEnsemble p = prepare(ensemble);
  return grid_with_policy([&p](double x, double y) { return ensemble_point(p, x, y); }, spec);
}

double wigner_point(const CoherentEnsemble& ensemble, double x, double y) {
  return ensemble_point(prepare(ensemble), x, y);
}

CoherentEnsemble mirror_branches(const ScaledParams& params, double t, std::size_t field_dim,
                                 double tolerance) {
  params.validate();
  if (params.gamma > 0.0 && std::abs(params.beta) != 0.0) {
    throw ParameterError("the damped closed form assumes the mirror starts in vacuum (beta = 0)");
  }
  check_field_tail(params, field_dim, tolerance);
  const Vector c = coherent_amplitudes(params.alpha, field_dim);
  CoherentEnsemble e;
  for (std::size_t n = 0; n < field_dim; ++n) {
    const double nn = static_cast<double>(n);
    const Complex phi = params.gamma > 0.0 ? damped_mirror_amplitude(nn, params.k, params.gamma, t)
                                           : mirror_amplitude(nn, params, t);
    e.members.push_back({std::norm(c(static_cast<Eigen::Index>(n))), {Complex{1.0, 0.0}}, {phi}});
  }
  return e;
}

CoherentEnsemble projected_mirror_branches(const ScaledParams& params, double x, double t,
                                           std::size_t field_dim, double tolerance, Picture picture) {
  params.validate();
  if (params.gamma != 0.0) throw ParameterError("projected mirror branches are defined for gamma = 0");
  check_field_tail(params, field_dim, tolerance);
  const Vector c = coherent_amplitudes(params.alpha, field_dim);
  const RealVector bra = position_amplitudes(x, field_dim);
  const PropagatorFactors f = propagator_factors(params, t);
  CoherentEnsemble::Member m;
  for (std::size_t n = 0; n < field_dim; ++n) {
    const double nn = static_cast<double>(n);
    double phase = f.kerr_phase_exponent * nn * nn + displacement_phase(nn, params, t);
    if (picture == Picture::full) phase -= f.free_field_phase * nn;
    const auto i = static_cast<Eigen::Index>(n);
    m.coefficients.push_back(c(i) * std::polar(bra(i), phase));
    m.amplitudes.push_back(mirror_amplitude(nn, params, t));
  }
  CoherentEnsemble e;
  e.members.push_back(std::move(m));
  return e;
}

NegativityCertificate negativity(const WignerGrid& grid, double epsilon) {
  NegativityCertificate c;
  Eigen::Index i = 0, j = 0;
  c.min_value = grid.values.minCoeff(&i, &j);
  c.x = grid.x_axis(i);
  c.y = grid.y_axis(j);
  c.epsilon = epsilon;
  c.negative = c.min_value < -epsilon;
  return c;
}

RealVector number_distribution(const StateVector& psi, std::size_t mode) {
  const Dims& d = psi.mode_dims();
  if (mode >= d.size()) throw DimensionError("mode index out of range");
  const auto st = strides(d);
  RealVector p = RealVector::Zero(static_cast<Eigen::Index>(d[mode]));
  const Vector& a = psi.amplitudes();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    p((static_cast<std::size_t>(i) / st[mode]) % d[mode]) += std::norm(a(i));
  }
  const double total = p.sum();
  if (!(total > 0.0)) throw ZeroNormError("state has zero norm");
  return p / total;
}

RealVector number_distribution(const DensityOperator& rho, std::size_t mode) {
  const Dims& d = rho.mode_dims();
  if (mode >= d.size()) throw DimensionError("mode index out of range");
  const auto st = strides(d);
  RealVector p = RealVector::Zero(static_cast<Eigen::Index>(d[mode]));
  const Matrix& m = rho.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    p((static_cast<std::size_t>(i) / st[mode]) % d[mode]) += m(i, i).real();
  }
  return p / p.sum();
}

std::vector<EntropyPoint> entropy_curve(const EntropyScenario& sc, const std::vector<double>& times) {
  sc.params.validate();
  std::size_t f = sc.field_dim, m = sc.mirror_dim;
  if (f == 0 || m == 0) {
    const TruncationDims dd = default_dims(sc.params, sc.tolerance);
    if (f == 0) f = dd.field;
    if (m == 0) m = dd.mirror;
  }
  std::vector<EntropyPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!(t >= 0.0)) throw ParameterError("entropy times must be >= 0");
    EntropyPoint p;
    p.t = t;
    if (sc.damped) {
      // The reduced mirror state is sum_n p_n |phi_n><phi_n| over coherent |phi_n>,
      // so its purity needs only the overlaps |<phi_n|phi_m>|^2 = exp(-|phi_n - phi_m|^2).
      if (std::abs(sc.params.beta) != 0.0) {
        throw ParameterError("the damped closed form assumes the mirror starts in vacuum (beta = 0)");
      }
      check_field_tail(sc.params, f, sc.tolerance);
      const Vector c = coherent_amplitudes(sc.params.alpha, f);
      std::vector<double> w(f);
      std::vector<Complex> phi(f);
      double total = 0.0;
      for (std::size_t n = 0; n < f; ++n) {
        w[n] = std::norm(c(static_cast<Eigen::Index>(n)));
        phi[n] = damped_mirror_amplitude(static_cast<double>(n), sc.params.k, sc.params.gamma, t);
        total += w[n];
      }
      double pur = 0.0;
      for (std::size_t n = 0; n < f; ++n) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += w[j] * std::exp(-std::norm(phi[n] - phi[j]));
        pur += w[n] * (w[n] + 2.0 * row);
      }
      p.entropy = 1.0 - pur / (total * total);
      p.truncation_loss = std::max(0.0, 1.0 - total);
    } else {
      const JointState js = joint_state(sc.params, t, f, m, sc.tolerance);
      p.entropy = reduced_linear_entropy(js.state, {1});
      p.truncation_loss = js.truncation_loss;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace optomech
