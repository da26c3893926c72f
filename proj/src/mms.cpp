#include "viscowave/mms.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "viscowave/integrator.hpp"
#include "viscowave/source.hpp"

namespace viscowave {

ManufacturedSolution ManufacturedSolution::sine_sine() {
  constexpr double pi = std::numbers::pi;
  ManufacturedSolution m;
  m.name = "sine_sine";
  m.u.X = [](double x) { return std::sin(pi * x); };
  m.u.LX = [](double x) { return pi * pi * std::sin(pi * x); };
  m.v.X = [](double x) { return 0.5 * std::sin(2.0 * pi * x); };
  m.v.LX = [](double x) { return 2.0 * pi * pi * std::sin(2.0 * pi * x); };
  for (SeparableField* f : {&m.u, &m.v}) {
    f->T = [](double t) { return std::sin(t); };
    f->dT = [](double t) { return std::cos(t); };
    f->d2T = [](double t) { return -std::sin(t); };
  }
  return m;
}

ManufacturedSolution ManufacturedSolution::zero() {
  ManufacturedSolution m;
  m.name = "zero";
  for (SeparableField* f : {&m.u, &m.v}) {
    f->X = [](double) { return 0.0; };
    f->LX = [](double) { return 0.0; };
    f->T = [](double) { return 0.0; };
    f->dT = [](double) { return 0.0; };
    f->d2T = [](double) { return 0.0; };
  }
  return m;
}

namespace {

using boost::math::quadrature::gauss_kronrod;

double memory_integral(const RelaxationKernel& k, const std::function<double(double)>& T,
                       double t) {
  if (k.is_zero() || t <= 0.0) return 0.0;
  return gauss_kronrod<double, 31>::integrate(
      [&](double s) { return k.value(t - s) * T(s); }, 0.0, t, 8, 1e-13);
}

double delay_forcing(const DelayKernel& d, const std::function<double(double)>& dT, double t) {
  if (d.is_zero()) return 0.0;
  return gauss_kronrod<double, 31>::integrate([&](double s) { return d.mu(s) * dT(t - s); },
                                              d.tau1(), d.tau2(), 8, 1e-13);
}

InitOverrides overrides_for(const ProblemSpec& spec, const ManufacturedSolution& sol) {
  InitOverrides ov;
  ov.u0 = [sol](double x) { return sol.u.value(x, 0.0); };
  ov.v0 = [sol](double x) { return sol.v.value(x, 0.0); };
  ov.u1 = [sol](double x) { return sol.u.X(x) * sol.u.dT(0.0); };
  ov.v1 = [sol](double x) { return sol.v.X(x) * sol.v.dT(0.0); };
  ov.phi0 = [sol](double x, double r) { return sol.u.X(x) * sol.u.dT(-r); };
  ov.phi1 = [sol](double x, double r) { return sol.v.X(x) * sol.v.dT(-r); };

  const std::vector<double> xs = spec.grid.nodes();
  std::vector<double> Xu, LXu, Xv, LXv;
  for (double x : xs) {
    Xu.push_back(sol.u.X(x));
    LXu.push_back(sol.u.LX(x));
    Xv.push_back(sol.v.X(x));
    LXv.push_back(sol.v.LX(x));
  }
  ov.forcing = [=](double t, std::span<double> fu, std::span<double> fv) {
    const double Tu = sol.u.T(t), Tv = sol.v.T(t);
    const double dTu = sol.u.dT(t), dTv = sol.v.dT(t);
    const double mem_u = memory_integral(spec.kernel_u, sol.u.T, t);
    const double mem_v = memory_integral(spec.kernel_v, sol.v.T, t);
    const double del_u = delay_forcing(spec.delay_u, sol.u.dT, t);
    const double del_v = delay_forcing(spec.delay_v, sol.v.dT, t);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double us = Xu[j] * Tu;
      const double vs = Xv[j] * Tv;
      fu[j] = Xu[j] * sol.u.d2T(t) + LXu[j] * (Tu - mem_u) + spec.damping_u * Xu[j] * dTu +
              Xu[j] * del_u + f1(spec.source, us, vs);
      fv[j] = Xv[j] * sol.v.d2T(t) + LXv[j] * (Tv - mem_v) + spec.damping_v * Xv[j] * dTv +
              Xv[j] * del_v + f2(spec.source, us, vs);
    }
  };
  return ov;
}

}  // namespace

MmsResult mms_run(const ProblemSpec& base, const ManufacturedSolution& sol,
                  const std::vector<int>& ladder, double T) {
  MmsResult out;
  for (int n : ladder) {
    ProblemSpec spec = base;
    spec.grid.n_interior = n;
    spec.time.T = T;
    spec.time.dt_from_cfl = true;
    spec.initial = {};
    spec.history = {};
    spec.resolve();

    SimState s = initialize(spec, overrides_for(spec, sol));
    while (s.step < spec.time.steps() && !s.overflow) step(s);

    Field eu(n), ev(n);
    for (int j = 0; j < n; ++j) {
      const double x = spec.grid.node(j);
      eu[j] = s.u[j] - sol.u.value(x, s.t);
      ev[j] = s.v[j] - sol.v.value(x, s.t);
    }
    MmsLevel lvl;
    lvl.n = n;
    lvl.h = spec.h;
    lvl.dt = spec.time.dt;
    lvl.error = std::sqrt(norm_sq(eu, spec.h) + norm_sq(ev, spec.h));
    out.levels.push_back(lvl);
  }

  if (out.levels.size() >= 2) {
    double mx = 0.0, my = 0.0;
    const double m = static_cast<double>(out.levels.size());
    for (const auto& l : out.levels) {
      mx += std::log(l.h);
      my += std::log(l.error);
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& l : out.levels) {
      sxx += (std::log(l.h) - mx) * (std::log(l.h) - mx);
      sxy += (std::log(l.h) - mx) * (std::log(l.error) - my);
    }
    out.observed_order = sxy / sxx;
    out.min_pair_order = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < out.levels.size(); ++i) {
      const auto& a = out.levels[i];
      const auto& b = out.levels[i + 1];
      out.min_pair_order =
          std::min(out.min_pair_order, std::log(a.error / b.error) / std::log(a.h / b.h));
    }
  }
  return out;
}

}  // namespace viscowave
