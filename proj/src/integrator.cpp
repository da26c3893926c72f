#include "viscowave/integrator.hpp"

#include <chrono>
#include <cmath>

#include "viscowave/diagnostics.hpp"
#include "viscowave/source.hpp"

namespace viscowave {

namespace {

Field sample_nodes(const GridSpec& g, const std::function<double(double)>& f) {
  Field out(g.n_interior);
  for (int j = 0; j < g.n_interior; ++j) out[j] = f(g.node(j));
  return out;
}

VelocityHistory::Prehistory bind_prehistory(const GridSpec& g,
                                            std::function<double(double, double)> phi) {
  std::vector<double> xs = g.nodes();
  return [xs = std::move(xs), phi = std::move(phi)](double r, std::span<double> out) {
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = phi(xs[j], r);
  };
}

// Everything on the right-hand side at t = state.t except damping and the
// part of the delay integral that depends on the (not yet known) velocity at
// state.t. Returns that pending coefficient.
double rest_acceleration(const SimState& s, const DelayKernel& delay,
                         const FieldHistory& hist, const VelocityHistory& vel,
                         const MemoryConvolver& mem, const DiscreteOperator& op,
                         std::span<const double> src, std::span<const double> force,
                         std::span<double> out, bool pending) {
  const std::size_t n = out.size();
  Field lu(n);
  apply_into(op, hist.snapshot(s.step), lu);
  Field memory(n);
  mem.memory_term(hist, op, s.step, memory);
  Field delayed(n);
  double c = 0.0;
  if (pending) {
    c = delay_integral_pending(delay, vel, delayed);
  } else {
    delay_integral_into(delay, vel, s.t, delayed);
  }
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = -lu[j] + memory[j] - delayed[j] - src[j] + force[j];
  }
  return c;
}

double field_max(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) {
    if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::fabs(x));
  }
  return m;
}

}  // namespace

SimState initialize(const ProblemSpec& spec, const InitOverrides& ov) {
  ValidationReport report = validate_spec(spec);
  if (!report.passed()) {
    std::string first;
    for (const auto& f : report.findings) {
      if (f.severity == Severity::kFail) {
        first = f.check + ": " + f.detail;
        break;
      }
    }
    const std::string what = "validation failed (" + std::to_string(report.failures()) +
                             " finding(s)); first: " + first;
    throw ValidationError(what, std::move(report));
  }

  auto model = std::make_shared<Model>();
  model->grid = spec.grid;
  model->h = spec.h;
  model->dt = spec.time.dt;
  model->op_u = assemble(spec.grid, spec.op_u);
  model->op_v = assemble(spec.grid, spec.op_v);
  model->mem_u = MemoryConvolver(spec.kernel_u, spec.time.dt, spec.checks.g_floor_rel);
  model->mem_v = MemoryConvolver(spec.kernel_v, spec.time.dt, spec.checks.g_floor_rel);
  model->delay_u = spec.delay_u;
  model->delay_v = spec.delay_v;
  model->damping_u = spec.damping_u;
  model->damping_v = spec.damping_v;
  model->source = spec.source;
  model->blow_up_threshold = spec.checks.blow_up_threshold;
  model->forcing = ov.forcing;

  const GridSpec& g = spec.grid;
  auto pick1 = [](const std::function<double(double)>& o, const Profile& p) {
    return o ? o : std::function<double(double)>([p](double x) { return p(x); });
  };
  auto pick2 = [](const std::function<double(double, double)>& o, const HistoryProfile& p) {
    return o ? o
             : std::function<double(double, double)>([p](double x, double r) { return p(x, r); });
  };

  SimState s;
  s.model = model;
  s.u = sample_nodes(g, pick1(ov.u0, spec.initial.u0));
  s.v = sample_nodes(g, pick1(ov.v0, spec.initial.v0));
  s.ut = sample_nodes(g, pick1(ov.u1, spec.initial.u1));
  s.vt = sample_nodes(g, pick1(ov.v1, spec.initial.v1));

  const int n = g.n_interior;
  const auto reserve = static_cast<std::size_t>(spec.time.steps() + 1);
  s.hist_u = FieldHistory(n, spec.time.dt, reserve);
  s.hist_v = FieldHistory(n, spec.time.dt, reserve);
  s.hist_u.push(s.u);
  s.hist_v.push(s.v);
  s.vel_u = VelocityHistory(n, spec.time.dt, std::max(spec.delay_u.tau2(), 0.0),
                            bind_prehistory(g, pick2(ov.phi0, spec.history.phi0)));
  s.vel_v = VelocityHistory(n, spec.time.dt, std::max(spec.delay_v.tau2(), 0.0),
                            bind_prehistory(g, pick2(ov.phi1, spec.history.phi1)));
  s.vel_u.push(s.ut);
  s.vel_v.push(s.vt);

  Field fu(n), fv(n), force_u(n, 0.0), force_v(n, 0.0);
  source_field_into(model->source, s.u, s.v, fu, fv);
  if (model->forcing) model->forcing(0.0, force_u, force_v);
  s.acc_u.assign(n, 0.0);
  s.acc_v.assign(n, 0.0);
  rest_acceleration(s, model->delay_u, s.hist_u, s.vel_u, model->mem_u, model->op_u, fu,
                    force_u, s.acc_u, false);
  rest_acceleration(s, model->delay_v, s.hist_v, s.vel_v, model->mem_v, model->op_v, fv,
                    force_v, s.acc_v, false);
  s.overflow = field_max(s.u) > model->blow_up_threshold ||
               field_max(s.v) > model->blow_up_threshold;
  return s;
}

StepReport step(SimState& s) {
  if (s.overflow) throw Error("step: state already overflowed");
  const auto start = std::chrono::steady_clock::now();
  const Model& m = *s.model;
  const double dt = m.dt;
  const std::size_t n = s.u.size();

  // first half kick and drift
  Field wu(n), wv(n);
  for (std::size_t j = 0; j < n; ++j) {
    wu[j] = s.ut[j] + 0.5 * dt * (s.acc_u[j] - m.damping_u * s.ut[j]);
    wv[j] = s.vt[j] + 0.5 * dt * (s.acc_v[j] - m.damping_v * s.vt[j]);
    s.u[j] += dt * wu[j];
    s.v[j] += dt * wv[j];
  }
  s.hist_u.push(s.u);
  s.hist_v.push(s.v);
  s.step += 1;
  s.t = s.step * dt;

  // second half kick with the new right-hand side
  Field fu(n), fv(n), force_u(n, 0.0), force_v(n, 0.0);
  source_field_into(m.source, s.u, s.v, fu, fv);
  if (m.forcing) m.forcing(s.t, force_u, force_v);
  const double cu = rest_acceleration(s, m.delay_u, s.hist_u, s.vel_u, m.mem_u, m.op_u, fu,
                                      force_u, s.acc_u, true);
  const double cv = rest_acceleration(s, m.delay_v, s.hist_v, s.vel_v, m.mem_v, m.op_v, fv,
                                      force_v, s.acc_v, true);
  const double den_u = 1.0 + 0.5 * dt * (m.damping_u + cu);
  const double den_v = 1.0 + 0.5 * dt * (m.damping_v + cv);
  for (std::size_t j = 0; j < n; ++j) {
    s.ut[j] = (wu[j] + 0.5 * dt * s.acc_u[j]) / den_u;
    s.vt[j] = (wv[j] + 0.5 * dt * s.acc_v[j]) / den_v;
    s.acc_u[j] -= cu * s.ut[j];
    s.acc_v[j] -= cv * s.vt[j];
  }
  s.vel_u.push(s.ut);
  s.vel_v.push(s.vt);

  StepReport r;
  r.max_u = std::max(field_max(s.u), field_max(s.v));
  r.max_ut = std::max(field_max(s.ut), field_max(s.vt));
  r.overflow = !(r.max_u <= m.blow_up_threshold) || !(r.max_ut <= m.blow_up_threshold);
  s.overflow = r.overflow;
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

void scalar_step(double& x, double& xdot, double& acc, double omega2, double mu, double dt) {
  const double w = xdot + 0.5 * dt * (acc - mu * xdot);
  x += dt * w;
  acc = -omega2 * x;
  xdot = (w + 0.5 * dt * acc) / (1.0 + 0.5 * dt * mu);
}

RunSummary run(const ProblemSpec& spec, const DiagnosticSink& sink, const InitOverrides& ov) {
  SimState s = initialize(spec, ov);
  RunSummary out;
  out.initial_energy = energy(s).total;
  const int steps = spec.time.steps();
  const int stride = std::max(spec.time.stride, 1);
  if (sink) {
    sink(s);
    ++out.samples;
  }
  double last_energy = out.initial_energy;
  while (s.step < steps && !s.overflow) {
    step(s);
    if (s.overflow) break;
    if (s.step % stride == 0) {
      if (sink) {
        sink(s);
        ++out.samples;
      }
    }
  }
  if (!s.overflow) last_energy = energy(s).total;
  out.final_t = s.t;
  out.steps = s.step;
  out.overflow = s.overflow;
  out.final_energy = s.overflow ? std::numeric_limits<double>::infinity() : last_energy;
  return out;
}

}  // namespace viscowave
