#include "viscowave/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "viscowave/diagnostics.hpp"
#include "viscowave/integrator.hpp"
#include "viscowave/mms.hpp"
#include "viscowave/source.hpp"

namespace viscowave {

std::string c1_config_text() {
  return R"([grid]
x_lo = 0
x_hi = 1
n_interior = 128

[operator_u]
coefficient = 1
[operator_v]
coefficient = 1

[kernel_u]
family = exp
a = 0.25
b = 1
[kernel_v]
family = exp
a = 0.25
b = 1

[damping]
u = 1
v = 1

[delay_u]
tau1 = 0
tau2 = 1
mu = 0.25
[delay_v]
tau1 = 0
tau2 = 1
mu = 0.25

[source]
enabled = true
a = 1
b = 1
p = 3

[initial]
u0 = 0.02*sin(pi*x)
v0 = 0.01*sin(2*pi*x)
u1 = 0.02*sin(pi*x)
v1 = 0

[history]
phi0 = 0.02*sin(pi*x)*exp(-r)
phi1 = 0

[time]
T = 20
dt = auto
stride = 10
cfl_factor = 0.9

[lyapunov]
M = 100
epsilon = 0.01
)";
}

ProblemSpec c1_spec(int n_interior, double T) {
  IniDocument doc = IniDocument::parse(c1_config_text(), "<c1>");
  doc.set("grid.n_interior", std::to_string(n_interior));
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", T);
  doc.set("time.T", buf);
  return spec_from_document(doc);
}

bool criterion_selected(const AcceptanceOptions& opt, int id, const std::string& name,
                        const std::vector<std::string>& tags) {
  if (opt.filter.empty()) return true;
  if (opt.filter == std::to_string(id)) return true;
  if (name.find(opt.filter) != std::string::npos) return true;
  return std::find(tags.begin(), tags.end(), opt.filter) != tags.end();
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail;
  return os.str();
}

namespace {

std::string num(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Trajectory {
  RunSummary summary;
  std::vector<DiagnosticRow> rows;
  std::vector<double> identity;  // |E - kinetic - J| per sample
  std::vector<Field> states;     // u, v, u_t, v_t stacked, when requested

  std::vector<double> times() const {
    std::vector<double> t;
    for (const auto& r : rows) t.push_back(r.e.t);
    return t;
  }
  std::vector<double> energies() const {
    std::vector<double> e;
    for (const auto& r : rows) e.push_back(r.e.total);
    return e;
  }
};

Trajectory simulate(const ProblemSpec& spec, bool keep_states, const InitOverrides& ov = {}) {
  Trajectory tr;
  tr.summary = run(
      spec,
      [&](const SimState& s) {
        tr.rows.push_back(diagnostic_row(s, spec.lyapunov));
        tr.identity.push_back(identity_residual(s));
        if (keep_states) {
          Field f;
          for (const Field* x : {&s.u, &s.v, &s.ut, &s.vt}) f.insert(f.end(), x->begin(), x->end());
          tr.states.push_back(std::move(f));
        }
      },
      ov);
  return tr;
}

struct Criterion {
  int id;
  std::string name;
  std::vector<std::string> tags;
  std::function<CriterionResult()> body;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out) {
  std::optional<Trajectory> c1_cache;
  auto c1 = [&]() -> const Trajectory& {
    if (!c1_cache) c1_cache = simulate(c1_spec(), false);
    return *c1_cache;
  };
  auto fail_detail = [](CriterionResult& r, bool ok, const std::string& d) {
    r.passed = ok;
    r.detail = d;
  };

  std::vector<Criterion> list;

  list.push_back({1, "energy monotonicity (C1)", {"energy", "monotonicity"}, [&] {
                    CriterionResult r;
                    const Trajectory& tr = c1();
                    const auto m = monotonicity_check(tr.energies(), 1e-8);
                    const bool ok = m.passed && !tr.summary.overflow;
                    fail_detail(r, ok,
                                std::to_string(tr.rows.size()) + " samples, " +
                                    std::to_string(m.increases.size()) +
                                    " increase(s), max step change " + num(m.max_increase) +
                                    ", E0 = " + num(tr.rows.front().e.total));
                    return r;
                  }});

  list.push_back({2, "decay envelopes by kernel family", {"decay", "fit"}, [&] {
                    CriterionResult r;
                    std::ostringstream d;
                    bool ok = true;
                    auto check_fit = [&](const std::string& label, const Trajectory& tr,
                                         const ProblemSpec& spec) -> std::optional<DecayFit> {
                      FitOptions fo;
                      fo.tau2 = spec.max_delay();
                      try {
                        const DecayFit f = fit_decay(tr.times(), tr.energies(), spec.kernel_u, fo);
                        const bool good = f.alpha > 0.0 && f.residual <= 0.05 * f.log_range;
                        ok = ok && good;
                        d << label << ": alpha=" << num(f.alpha) << " resid/range="
                          << num(f.residual / f.log_range, 3) << (good ? "" : " (bad)") << "; ";
                        return f;
                      } catch (const Error& e) {
                        ok = false;
                        d << label << ": " << e.what() << "; ";
                        return std::nullopt;
                      }
                    };
                    const ProblemSpec exp128 = c1_spec(128, 20.0);
                    const auto f128 = check_fit("exp n=128", c1(), exp128);
                    const ProblemSpec exp256 = c1_spec(256, 20.0);
                    const auto f256 = check_fit("exp n=256", simulate(exp256, false), exp256);

                    ProblemSpec poly = c1_spec(128, 40.0);
                    poly.kernel_u = poly.kernel_v = RelaxationKernel::polynomial(0.25, 2.0);
                    poly.resolve();
                    check_fit("poly nu=2", simulate(poly, false), poly);

                    ProblemSpec logp = c1_spec(128, 40.0);
                    logp.kernel_u = logp.kernel_v = RelaxationKernel::log_power(0.25, 2.0);
                    logp.resolve();
                    check_fit("log_power nu=2", simulate(logp, false), logp);

                    if (f128 && f256) {
                      const double rel = std::fabs(f128->alpha - f256->alpha) / f256->alpha;
                      ok = ok && rel <= 0.2;
                      d << "exp alpha n=128 vs 256 rel diff " << num(rel, 3);
                    }
                    fail_detail(r, ok, d.str());
                    return r;
                  }});

  list.push_back({3, "delay instability demo", {"delay", "instability"}, [&] {
                    CriterionResult r;
                    ProblemSpec spec = c1_spec(128, 20.0);
                    spec.kernel_u = spec.kernel_v = RelaxationKernel::zero();
                    spec.source.enabled = false;
                    spec.delay_u = DelayKernel::constant(2.0 * spec.damping_u, 0.0, 1.0);
                    spec.delay_v = DelayKernel::constant(2.0 * spec.damping_v, 0.0, 1.0);
                    spec.checks.allow_unstable = true;
                    spec.resolve();
                    const Trajectory tr = simulate(spec, false);
                    const auto m = monotonicity_check(tr.energies(), 1e-8);
                    fail_detail(r, !m.increases.empty() || tr.summary.overflow,
                                "margin " + num(stability_margin(spec.delay_u, spec.damping_u)) +
                                    ", " + std::to_string(m.increases.size()) +
                                    " energy increase(s), largest " + num(m.max_increase) +
                                    (tr.summary.overflow ? ", overflow" : ""));
                    return r;
                  }});

  list.push_back({4, "source identities", {"source", "identity"}, [&] {
                    CriterionResult r;
                    SourceParams sp;  // C1 sources
                    SourceParams sources = sp;
                    if (opt.inject == "source-a") sources.a = sp.a + 0.5;
                    const auto samples = random_samples(10000, 10.0, opt.seed);
                    const double euler = check_euler_identity(sources, sp, samples);
                    const GradientCheck g = check_gradient(sp, samples);
                    fail_detail(r, euler <= 1e-9 && g.max_residual <= 1e-5,
                                "Euler residual " + num(euler) + " (<= 1e-9), gradient residual " +
                                    num(g.max_residual) + " (<= 1e-5) on " +
                                    std::to_string(g.checked) + " samples, " +
                                    std::to_string(g.excluded) + " near axes excluded");
                    return r;
                  }});

  list.push_back({5, "energy decomposition identity", {"energy", "identity"}, [&] {
                    CriterionResult r;
                    const Trajectory& tr = c1();
                    double worst = 0.0;
                    for (std::size_t i = 0; i < tr.rows.size(); ++i) {
                      worst = std::max(worst, tr.identity[i] / (1.0 + tr.rows[i].e.total));
                    }
                    fail_detail(r, worst <= 1e-10,
                                "max |E - K - J| / (1 + E) = " + num(worst) + " over " +
                                    std::to_string(tr.rows.size()) + " samples");
                    return r;
                  }});

  list.push_back({6, "I(t) positivity", {"stability", "positivity"}, [&] {
                    CriterionResult r;
                    const Trajectory& tr = c1();
                    const ProblemSpec spec = c1_spec();
                    const double E0 = tr.rows.front().e.total;
                    const double a = alpha_condition(spec, E0, 1.0);
                    double I_min = std::numeric_limits<double>::infinity();
                    for (const auto& row : tr.rows) I_min = std::min(I_min, row.I);
                    const double I0 = tr.rows.front().I;
                    fail_detail(r, a < 1.0 && I0 > 0.0 && I_min > 0.0,
                                "alpha_condition = " + num(a) + ", I(0) = " + num(I0) +
                                    ", min I = " + num(I_min));
                    return r;
                  }});

  list.push_back({7, "Lyapunov equivalence", {"lyapunov", "equivalence"}, [&] {
                    CriterionResult r;
                    const Trajectory& tr = c1();
                    try {
                      const EquivalenceResult eq = equivalence_check(tr.rows);
                      fail_detail(r, eq.passed,
                                  "L/E in [" + num(eq.ratio_min) + ", " + num(eq.ratio_max) +
                                      "] over " + std::to_string(eq.samples) + " samples");
                    } catch (const Error& e) {
                      fail_detail(r, false, e.what());
                    }
                    return r;
                  }});

  list.push_back({8, "MMS convergence", {"mms", "convergence"}, [&] {
                    CriterionResult r;
                    const std::vector<int> ladder{32, 64, 128, 256};
                    ProblemSpec plain = c1_spec();
                    plain.kernel_u = plain.kernel_v = RelaxationKernel::zero();
                    plain.delay_u = plain.delay_v = DelayKernel::constant(0.0, 0.0, 1.0);
                    const MmsResult a = mms_run(plain, ManufacturedSolution::sine_sine(), ladder, 1.0);
                    ProblemSpec mem = plain;
                    mem.kernel_u = mem.kernel_v = RelaxationKernel::exponential(0.25, 1.0);
                    const MmsResult b = mms_run(mem, ManufacturedSolution::sine_sine(), ladder, 1.0);
                    std::ostringstream d;
                    d << "order " << num(a.observed_order, 3) << " (>= 1.9) plain, "
                      << num(b.observed_order, 3) << " (>= 1.5) with exp memory; errors";
                    for (const auto& l : a.levels) d << " " << num(l.error, 3);
                    fail_detail(r, a.observed_order >= 1.9 && b.observed_order >= 1.5, d.str());
                    return r;
                  }});

  list.push_back({9, "decay-fit oracle", {"decay", "fit"}, [&] {
                    CriterionResult r;
                    std::vector<double> t, e1, e2;
                    for (int i = 0; i <= 400; ++i) {
                      t.push_back(0.1 * i);
                      e1.push_back(2.0 * std::exp(-0.3 * t.back()));
                      e2.push_back(5.0 * std::pow(1.0 + t.back(), -2.0));
                    }
                    const DecayFit fe = fit_decay(t, e1, RelaxationKernel::exponential(1.0, 1.0));
                    const DecayFit fp = fit_decay(t, e2, RelaxationKernel::polynomial(1.0, 2.0));
                    const double err_a = std::fabs(fe.alpha - 0.3) / 0.3;
                    const double err_k =
                        std::fabs(fe.K - 2.0 * std::exp(-0.3 * fe.t0)) / (2.0 * std::exp(-0.3 * fe.t0));
                    const double err_s = std::fabs(fp.natural_slope + 2.0) / 2.0;
                    const double err_kp = std::fabs(fp.K - 5.0 * std::pow(1.0 + fp.t0, -2.0)) /
                                          (5.0 * std::pow(1.0 + fp.t0, -2.0));
                    const double worst = std::max({err_a, err_k, err_s, err_kp});
                    fail_detail(r, worst <= 1e-6,
                                "exp alpha " + num(fe.alpha, 10) + ", poly slope " +
                                    num(fp.natural_slope, 10) + ", worst rel error " + num(worst));
                    return r;
                  }});

  list.push_back({10, "twin-run dependence", {"twin", "dependence"}, [&] {
                    CriterionResult r;
                    const ProblemSpec spec = c1_spec();
                    const Trajectory base = simulate(spec, true);
                    const double h = spec.h;
                    std::vector<double> diffs;
                    for (double eps : {1e-3, 1e-4, 1e-5}) {
                      InitOverrides ov;
                      const Profile u0 = spec.initial.u0;
                      // unit L2 perturbation direction sqrt(2) sin(pi x)
                      ov.u0 = [u0, eps](double x) {
                        return u0(x) + eps * std::numbers::sqrt2 * std::sin(std::numbers::pi * x);
                      };
                      const Trajectory tw = simulate(spec, true, ov);
                      double worst = 0.0;
                      for (std::size_t k = 0; k < std::min(base.states.size(), tw.states.size());
                           ++k) {
                        Field d(base.states[k].size());
                        for (std::size_t j = 0; j < d.size(); ++j) {
                          d[j] = tw.states[k][j] - base.states[k][j];
                        }
                        worst = std::max(worst, std::sqrt(norm_sq(d, h)));
                      }
                      diffs.push_back(worst);
                    }
                    const double r1 = diffs[0] / diffs[1];
                    const double r2 = diffs[1] / diffs[2];
                    const bool ok = std::fabs(r1 - 10.0) <= 2.0 && std::fabs(r2 - 10.0) <= 2.0;
                    fail_detail(r, ok,
                                "max diff " + num(diffs[0]) + ", " + num(diffs[1]) + ", " +
                                    num(diffs[2]) + "; ratios " + num(r1) + ", " + num(r2) +
                                    "; C(T) ~ " + num(diffs[2] / 1e-5));
                    return r;
                  }});

  std::vector<CriterionResult> results;
  for (const auto& c : list) {
    if (!criterion_selected(opt, c.id, c.name, c.tags)) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = c.body();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.id = c.id;
    r.name = c.name;
    r.tags = c.tags;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << format_result(r) << " (" << num(r.seconds, 3) << " s)" << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace viscowave
