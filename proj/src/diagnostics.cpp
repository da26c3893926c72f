#include "viscowave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "viscowave/delay_line.hpp"
#include "viscowave/source.hpp"

namespace viscowave {

namespace {

struct FieldParts {
  double kinetic = 0.0;
  double elastic = 0.0;
  double memory = 0.0;
};

FieldParts field_parts(const SimState& s, std::span<const double> x, std::span<const double> xt,
                       const DiscreteOperator& op, const MemoryConvolver& mem,
                       const FieldHistory& hist) {
  FieldParts p;
  const double h = s.model->h;
  p.kinetic = 0.5 * norm_sq(xt, h);
  const double g_int = mem.kernel().is_zero() ? 0.0 : mem.kernel().cumulative(s.t);
  p.elastic = 0.5 * (1.0 - g_int) * quadratic_form(op, x, x);
  p.memory = 0.5 * mem.g_circ(hist, op, s.step);
  return p;
}

double phi_part(const SimState& s, std::span<const double> xt, const MemoryConvolver& mem,
                const FieldHistory& hist) {
  Field diff(xt.size());
  mem.history_difference(hist, s.step, diff);
  return -inner(xt, diff, s.model->h);
}

}  // namespace

EnergyReport energy(const SimState& s) {
  const Model& m = *s.model;
  EnergyReport e;
  e.t = s.t;
  const FieldParts pu = field_parts(s, s.u, s.ut, m.op_u, m.mem_u, s.hist_u);
  const FieldParts pv = field_parts(s, s.v, s.vt, m.op_v, m.mem_v, s.hist_v);
  e.kinetic_u = pu.kinetic;
  e.kinetic_v = pv.kinetic;
  e.elastic_u = pu.elastic;
  e.elastic_v = pv.elastic;
  e.memory_u = pu.memory;
  e.memory_v = pv.memory;
  e.delay_u = delay_energy(m.delay_u, s.vel_u, s.t, false, m.h);
  e.delay_v = delay_energy(m.delay_v, s.vel_v, s.t, false, m.h);
  e.potential = potential_integral(m.source, s.u, s.v, m.h);
  e.total = e.kinetic_u + e.kinetic_v + e.elastic_u + e.elastic_v + e.memory_u + e.memory_v +
            e.delay_u + e.delay_v + e.potential;
  return e;
}

double stability_functional_I(const SimState& s) {
  const Model& m = *s.model;
  const EnergyReport e = energy(s);
  return delay_plain_functional(m.delay_u, s.vel_u, s.t, m.h) +
         delay_plain_functional(m.delay_v, s.vel_v, s.t, m.h) +
         (m.source.p + 1.0) * e.potential + 2.0 * (e.elastic_u + e.elastic_v) +
         2.0 * (e.memory_u + e.memory_v);
}

double functional_J(const SimState& s) {
  const EnergyReport e = energy(s);
  return e.delay_u + e.delay_v + e.potential + e.elastic_u + e.elastic_v + e.memory_u +
         e.memory_v;
}

double functional_J_unweighted(const SimState& s) {
  const Model& m = *s.model;
  const EnergyReport e = energy(s);
  return 0.5 * delay_plain_functional(m.delay_u, s.vel_u, s.t, m.h) +
         0.5 * delay_plain_functional(m.delay_v, s.vel_v, s.t, m.h) + e.potential + e.elastic_u +
         e.elastic_v + e.memory_u + e.memory_v;
}

double identity_residual(const SimState& s) {
  const EnergyReport e = energy(s);
  const double J = e.delay_u + e.delay_v + e.potential + e.elastic_u + e.elastic_v + e.memory_u +
                   e.memory_v;
  const double h = s.model->h;
  return std::fabs(e.total - 0.5 * norm_sq(s.ut, h) - 0.5 * norm_sq(s.vt, h) - J);
}

double alpha_condition(double p, double E0, double rho) {
  if (!(p > 1.0)) throw Error("alpha_condition: needs p > 1");
  if (E0 < 0.0) throw Error("alpha_condition: needs E0 >= 0");
  if (!(rho > 0.0)) throw Error("alpha_condition: needs rho > 0");
  return rho * std::pow(2.0 * (p + 1.0) / (p - 1.0) * E0, 0.5 * (p - 1.0));
}

double alpha_condition(const ProblemSpec& spec, double E0, double rho) {
  return alpha_condition(spec.source.p, E0, rho);
}

LyapunovParts lyapunov_L(const SimState& s, const LyapunovConfig& cfg) {
  const Model& m = *s.model;
  LyapunovParts out;
  out.psi = inner(s.u, s.ut, m.h) + inner(s.v, s.vt, m.h);
  out.phi = phi_part(s, s.ut, m.mem_u, s.hist_u) + phi_part(s, s.vt, m.mem_v, s.hist_v);
  out.I_d = 2.0 * (delay_energy(m.delay_u, s.vel_u, s.t, true, m.h) +
                   delay_energy(m.delay_v, s.vel_v, s.t, true, m.h));
  out.L = cfg.M * energy(s).total + cfg.epsilon * out.psi + out.phi + cfg.epsilon * out.I_d;
  return out;
}

DiagnosticRow diagnostic_row(const SimState& s, const LyapunovConfig& cfg) {
  const Model& m = *s.model;
  DiagnosticRow r;
  r.e = energy(s);
  r.J = r.e.total - r.e.kinetic_u - r.e.kinetic_v;
  r.I = delay_plain_functional(m.delay_u, s.vel_u, s.t, m.h) +
        delay_plain_functional(m.delay_v, s.vel_v, s.t, m.h) +
        (m.source.p + 1.0) * r.e.potential + 2.0 * (r.e.elastic_u + r.e.elastic_v) +
        2.0 * (r.e.memory_u + r.e.memory_v);
  r.psi = inner(s.u, s.ut, m.h) + inner(s.v, s.vt, m.h);
  r.phi = phi_part(s, s.ut, m.mem_u, s.hist_u) + phi_part(s, s.vt, m.mem_v, s.hist_v);
  r.I_d = 2.0 * (delay_energy(m.delay_u, s.vel_u, s.t, true, m.h) +
                 delay_energy(m.delay_v, s.vel_v, s.t, true, m.h));
  r.L = cfg.M * r.e.total + cfg.epsilon * r.psi + r.phi + cfg.epsilon * r.I_d;
  return r;
}

std::string csv_header() {
  return "t,kinetic_u,kinetic_v,elastic_u,elastic_v,memory_u,memory_v,delay_u,delay_v,"
         "potential,E,I,J,psi,phi,I_d,L";
}

std::string csv_line(const DiagnosticRow& r) {
  const double vals[] = {r.e.t,        r.e.kinetic_u, r.e.kinetic_v, r.e.elastic_u, r.e.elastic_v,
                         r.e.memory_u, r.e.memory_v,  r.e.delay_u,   r.e.delay_v,   r.e.potential,
                         r.e.total,    r.I,           r.J,           r.psi,         r.phi,
                         r.I_d,        r.L};
  std::string line;
  char buf[32];
  for (std::size_t i = 0; i < std::size(vals); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", vals[i]);
    if (i) line += ',';
    line += buf;
  }
  return line;
}

MonotonicityResult monotonicity_check(std::span<const double> E, double tol_rel, double tol_abs) {
  if (E.size() < 2) throw Error("monotonicity_check: needs at least two samples");
  MonotonicityResult r;
  const double tol = tol_abs + tol_rel * std::fabs(E[0]);
  r.max_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < E.size(); ++k) {
    const double d = E[k + 1] - E[k];
    r.max_increase = std::max(r.max_increase, d);
    if (d > tol || !std::isfinite(E[k + 1])) r.increases.push_back(static_cast<int>(k));
  }
  r.passed = r.increases.empty();
  return r;
}

MonotonicityResult monotonicity_check(std::span<const EnergyReport> series, double tol_rel,
                                      double tol_abs) {
  std::vector<double> E;
  E.reserve(series.size());
  for (const auto& e : series) E.push_back(e.total);
  return monotonicity_check(E, tol_rel, tol_abs);
}

namespace {

double natural_coordinate(const RelaxationKernel& k, double t) {
  switch (k.family) {
    case KernelFamily::kPoly:
      return std::log1p(t);
    case KernelFamily::kStretchedExp:
      return std::pow(1.0 + t, std::min(1.0, k.nu));
    case KernelFamily::kLogPower:
      return std::pow(std::log1p(t), k.nu);
    case KernelFamily::kExp:
    case KernelFamily::kZero:
      break;
  }
  return t;
}

// slope and intercept of y against x; residual is the RMS misfit
struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line l;
  l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  l.intercept = my - l.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (l.intercept + l.slope * x[i]);
    ss += r * r;
  }
  l.rms = std::sqrt(ss / n);
  return l;
}

}  // namespace

DecayFit fit_decay(std::span<const double> times, std::span<const double> energies,
                   const RelaxationKernel& kernel, const FitOptions& opt) {
  require_same_size(times.size(), energies.size(), "fit_decay");
  if (times.empty()) throw Error("fit_decay: insufficient samples (empty series)");
  DecayFit fit;
  fit.family = kernel.family;
  const double t_last = times.back();
  std::size_t first = 0;
  if (opt.t0) {
    while (first < times.size() && times[first] < *opt.t0) ++first;
  } else {
    const double cut = std::max(opt.tau2, 0.05 * t_last);
    while (first < times.size() && times[first] <= cut) ++first;
  }
  if (first == times.size()) throw Error("fit_decay: insufficient samples after t0");
  fit.t0 = times[first];
  const double floor = opt.floor_rel * std::fabs(energies.front());

  std::vector<double> X, N, Y;
  for (std::size_t i = first; i < times.size(); ++i) {
    if (!(energies[i] > floor) || !std::isfinite(energies[i])) continue;
    const double t = times[i];
    X.push_back(kernel.is_zero() ? t - fit.t0 : kernel.zeta_integral(fit.t0, t));
    N.push_back(natural_coordinate(kernel, t));
    Y.push_back(std::log(energies[i]));
    fit.t_end = t;
  }
  fit.samples = static_cast<int>(Y.size());
  if (fit.samples < opt.min_samples) {
    throw Error("fit_decay: insufficient samples above floor (" + std::to_string(fit.samples) +
                " < " + std::to_string(opt.min_samples) + ")");
  }
  const auto [ymin, ymax] = std::minmax_element(Y.begin(), Y.end());
  fit.log_range = *ymax - *ymin;
  const Line line = least_squares(X, Y);
  fit.alpha = -line.slope;
  fit.K = std::exp(line.intercept);
  fit.residual = line.rms;
  fit.natural_slope = least_squares(N, Y).slope;
  if (fit.log_range == 0.0) {
    fit.alpha = 0.0;
    fit.natural_slope = 0.0;
  }
  fit.no_decay = !(fit.alpha > 0.0);
  return fit;
}

EquivalenceResult equivalence_check(std::span<const DiagnosticRow> rows, double floor_rel) {
  if (rows.empty()) throw Error("equivalence_check: insufficient samples");
  const double floor = floor_rel * std::fabs(rows.front().e.total);
  EquivalenceResult r;
  r.ratio_min = std::numeric_limits<double>::infinity();
  r.ratio_max = -std::numeric_limits<double>::infinity();
  for (const auto& row : rows) {
    if (!(row.e.total > floor)) continue;
    const double q = row.L / row.e.total;
    r.ratio_min = std::min(r.ratio_min, q);
    r.ratio_max = std::max(r.ratio_max, q);
    ++r.samples;
  }
  if (r.samples == 0) throw Error("equivalence_check: insufficient samples above floor");
  r.passed = r.ratio_min > 0.0 && r.ratio_max < std::numeric_limits<double>::infinity() &&
             std::isfinite(r.ratio_max);
  return r;
}

}  // namespace viscowave
