#include "viscowave/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace viscowave {

namespace {

// Keys and defaults. The defaults describe a small-data, dissipative
// configuration on the unit interval.
const std::vector<std::pair<std::string, std::string>>& default_entries() {
  static const std::vector<std::pair<std::string, std::string>> entries = {
      {"grid.x_lo", "0"},
      {"grid.x_hi", "1"},
      {"grid.n_interior", "128"},
      {"operator_u.coefficient", "1"},
      {"operator_v.coefficient", "1"},
      {"kernel_u.family", "exp"},
      {"kernel_u.a", "0.25"},
      {"kernel_u.b", "1"},
      {"kernel_u.nu", "2"},
      {"kernel_v.family", "exp"},
      {"kernel_v.a", "0.25"},
      {"kernel_v.b", "1"},
      {"kernel_v.nu", "2"},
      {"damping.u", "1"},
      {"damping.v", "1"},
      {"delay_u.tau1", "0"},
      {"delay_u.tau2", "1"},
      {"delay_u.mu", "0.25"},
      {"delay_u.table", ""},
      {"delay_v.tau1", "0"},
      {"delay_v.tau2", "1"},
      {"delay_v.mu", "0.25"},
      {"delay_v.table", ""},
      {"source.enabled", "true"},
      {"source.a", "1"},
      {"source.b", "1"},
      {"source.p", "3"},
      {"initial.u0", "0.02*sin(pi*x)"},
      {"initial.v0", "0.01*sin(2*pi*x)"},
      {"initial.u1", "0"},
      {"initial.v1", "0"},
      {"history.phi0", "0"},
      {"history.phi1", "0"},
      {"time.T", "20"},
      {"time.dt", "auto"},
      {"time.stride", "10"},
      {"time.cfl_factor", "0.9"},
      {"checks.allow_unstable", "false"},
      {"checks.rho", "1"},
      {"checks.c_s", "0.318309886183790671"},
      {"checks.blow_up_threshold", "1e12"},
      {"checks.g_floor", "1e-14"},
      {"checks.compat_tol", "1e-8"},
      {"checks.kernel_samples", "1024"},
      {"lyapunov.M", "100"},
      {"lyapunov.epsilon", "0.01"},
  };
  return entries;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  std::string str(const std::string& key) const {
    auto v = doc_.get(key);
    if (!v) throw Error("missing required key '" + key + "'");
    return *v;
  }

  double num(const std::string& key) const {
    const std::string s = str(key);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || s.find_first_not_of(" \t", used) != std::string::npos) {
      throw Error(doc_.origin() + ": key '" + key + "' expects a number, got '" + s + "'");
    }
    return v;
  }

  int integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v)) {
      throw Error(doc_.origin() + ": key '" + key + "' expects an integer, got '" + str(key) + "'");
    }
    return static_cast<int>(v);
  }

  bool flag(const std::string& key) const {
    std::string s = str(key);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw Error(doc_.origin() + ": key '" + key + "' expects a boolean, got '" + s + "'");
  }

  Expression expr(const std::string& key, std::vector<std::string> vars) const {
    try {
      return Expression::parse(str(key), std::move(vars));
    } catch (const Error& e) {
      throw Error(doc_.origin() + ": key '" + key + "': " + e.what());
    }
  }

 private:
  const IniDocument& doc_;
};

RelaxationKernel read_kernel(const Reader& r, const std::string& section) {
  RelaxationKernel k;
  k.family = parse_family(r.str(section + ".family"));
  k.a = r.num(section + ".a");
  k.b = r.num(section + ".b");
  k.nu = r.num(section + ".nu");
  if (k.family == KernelFamily::kPoly || k.family == KernelFamily::kLogPower) k.b = 1.0;
  return k;
}

DelayKernel read_delay(const Reader& r, const std::string& section,
                       const std::filesystem::path& base_dir) {
  const std::string table = r.str(section + ".table");
  if (!table.empty()) {
    std::filesystem::path p(table);
    if (p.is_relative()) p = base_dir / p;
    return DelayKernel::load_csv(p);
  }
  return DelayKernel::from_expression(r.expr(section + ".mu", {"s"}), r.num(section + ".tau1"),
                                      r.num(section + ".tau2"));
}

void write_kernel(IniDocument& doc, const std::string& section, const RelaxationKernel& k) {
  doc.set(section + ".family", std::string(family_name(k.family)));
  doc.set(section + ".a", fmt(k.a));
  doc.set(section + ".b", fmt(k.b));
  doc.set(section + ".nu", fmt(k.nu));
}

void write_delay(IniDocument& doc, const std::string& section, const DelayKernel& d) {
  doc.set(section + ".tau1", fmt(d.tau1()));
  doc.set(section + ".tau2", fmt(d.tau2()));
  switch (d.kind()) {
    case DelayKernel::Kind::kConstant:
      doc.set(section + ".mu", fmt(d.mu(d.tau1())));
      doc.set(section + ".table", "");
      break;
    case DelayKernel::Kind::kExpression:
      doc.set(section + ".mu", d.expression()->text());
      doc.set(section + ".table", "");
      break;
    case DelayKernel::Kind::kTable: {
      // tables are inlined as a piecewise-linear note; the CSV path is not retained
      doc.set(section + ".mu", "table");
      std::ostringstream os;
      for (std::size_t i = 0; i < d.table_s().size(); ++i) {
        os << (i ? " " : "") << fmt(d.table_s()[i]) << ":" << fmt(d.table_mu()[i]);
      }
      doc.set(section + ".table_rows", os.str());
      break;
    }
  }
}

double sample_max(const GridSpec& g, const Profile& p) {
  double m = 0.0;
  for (int j = 0; j < g.n_interior; ++j) m = std::max(m, std::fabs(p(g.node(j))));
  return m;
}

}  // namespace

int TimeSpec::steps() const {
  if (!(dt > 0.0) || T <= 0.0) return 0;
  return static_cast<int>(std::llround(std::ceil(T / dt - 1e-9)));
}

void ProblemSpec::resolve() {
  h = grid.n_interior > 0 ? grid.spacing() : 0.0;
  op_u.samples.clear();
  op_v.samples.clear();
  for (int j = 0; j <= grid.n_interior; ++j) {
    const double x = grid.interface(j);
    op_u.samples.push_back(coeff_u(x));
    op_v.samples.push_back(coeff_v(x));
  }
  auto tail = [](const RelaxationKernel& k) -> std::optional<double> {
    try {
      return k.tail_mass();
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  tail_u = tail(kernel_u);
  tail_v = tail(kernel_v);

  if (time.dt_from_cfl) {
    const double amax = std::max(op_u.max_value(), op_v.max_value());
    double dt = amax > 0.0 && h > 0.0 ? time.cfl_factor * h / std::sqrt(amax) : 0.0;
    if (dt > 0.0 && time.T > 0.0) {
      // shrink slightly so that T is an integer number of steps
      dt = time.T / std::ceil(time.T / dt);
    }
    time.dt = dt;
  }
}

IniDocument default_config() {
  IniDocument doc;
  for (const auto& [k, v] : default_entries()) doc.set(k, v);
  return doc;
}

ProblemSpec spec_from_document(const IniDocument& user) {
  std::set<std::string> known;
  for (const auto& [k, v] : default_entries()) known.insert(k);
  IniDocument doc = default_config();
  for (const auto& key : user.keys()) {
    // written back by spec_to_document for reference; the dt key is authoritative
    const bool informational = key.rfind("meta.", 0) == 0 || key == "time.resolved_dt" ||
                               key.find(".table_rows") != std::string::npos;
    if (!known.count(key) && !informational) {
      throw Error(user.origin() + ": unknown key '" + key + "'");
    }
    doc.set(key, *user.get(key));
  }
  const Reader r(doc);
  const std::filesystem::path base =
      user.origin().empty() || user.origin().front() == '<'
          ? std::filesystem::current_path()
          : std::filesystem::path(user.origin()).parent_path();

  ProblemSpec spec;
  spec.grid.x_lo = r.num("grid.x_lo");
  spec.grid.x_hi = r.num("grid.x_hi");
  spec.grid.n_interior = r.integer("grid.n_interior");
  if (spec.grid.n_interior < 1) throw Error("grid.n_interior must be at least 1");
  spec.coeff_u = {r.expr("operator_u.coefficient", {"x"})};
  spec.coeff_v = {r.expr("operator_v.coefficient", {"x"})};
  spec.kernel_u = read_kernel(r, "kernel_u");
  spec.kernel_v = read_kernel(r, "kernel_v");
  spec.damping_u = r.num("damping.u");
  spec.damping_v = r.num("damping.v");
  spec.delay_u = read_delay(r, "delay_u", base);
  spec.delay_v = read_delay(r, "delay_v", base);
  spec.source.enabled = r.flag("source.enabled");
  spec.source.a = r.num("source.a");
  spec.source.b = r.num("source.b");
  spec.source.p = r.num("source.p");
  spec.initial.u0 = {r.expr("initial.u0", {"x"})};
  spec.initial.v0 = {r.expr("initial.v0", {"x"})};
  spec.initial.u1 = {r.expr("initial.u1", {"x"})};
  spec.initial.v1 = {r.expr("initial.v1", {"x"})};
  spec.history.phi0 = {r.expr("history.phi0", {"x", "r"})};
  spec.history.phi1 = {r.expr("history.phi1", {"x", "r"})};
  spec.time.T = r.num("time.T");
  spec.time.stride = r.integer("time.stride");
  spec.time.cfl_factor = r.num("time.cfl_factor");
  const std::string dt = r.str("time.dt");
  if (dt == "auto" || dt.empty()) {
    spec.time.dt_from_cfl = true;
  } else {
    spec.time.dt_from_cfl = false;
    spec.time.dt = r.num("time.dt");
  }
  spec.checks.allow_unstable = r.flag("checks.allow_unstable");
  spec.checks.rho = r.num("checks.rho");
  spec.checks.c_s = r.num("checks.c_s");
  spec.checks.blow_up_threshold = r.num("checks.blow_up_threshold");
  spec.checks.g_floor_rel = r.num("checks.g_floor");
  spec.checks.compat_tol = r.num("checks.compat_tol");
  spec.checks.kernel_samples = r.integer("checks.kernel_samples");
  spec.lyapunov.M = r.num("lyapunov.M");
  spec.lyapunov.epsilon = r.num("lyapunov.epsilon");
  spec.resolve();
  return spec;
}

ProblemSpec load_spec(const std::filesystem::path& path) {
  return spec_from_document(IniDocument::load(path));
}

IniDocument spec_to_document(const ProblemSpec& spec) {
  IniDocument doc;
  doc.set("grid.x_lo", fmt(spec.grid.x_lo));
  doc.set("grid.x_hi", fmt(spec.grid.x_hi));
  doc.set("grid.n_interior", std::to_string(spec.grid.n_interior));
  doc.set("operator_u.coefficient", spec.coeff_u.text());
  doc.set("operator_v.coefficient", spec.coeff_v.text());
  write_kernel(doc, "kernel_u", spec.kernel_u);
  write_kernel(doc, "kernel_v", spec.kernel_v);
  doc.set("damping.u", fmt(spec.damping_u));
  doc.set("damping.v", fmt(spec.damping_v));
  write_delay(doc, "delay_u", spec.delay_u);
  write_delay(doc, "delay_v", spec.delay_v);
  doc.set("source.enabled", spec.source.enabled ? "true" : "false");
  doc.set("source.a", fmt(spec.source.a));
  doc.set("source.b", fmt(spec.source.b));
  doc.set("source.p", fmt(spec.source.p));
  doc.set("initial.u0", spec.initial.u0.text());
  doc.set("initial.v0", spec.initial.v0.text());
  doc.set("initial.u1", spec.initial.u1.text());
  doc.set("initial.v1", spec.initial.v1.text());
  doc.set("history.phi0", spec.history.phi0.text());
  doc.set("history.phi1", spec.history.phi1.text());
  doc.set("time.T", fmt(spec.time.T));
  doc.set("time.dt", spec.time.dt_from_cfl ? "auto" : fmt(spec.time.dt));
  doc.set("time.resolved_dt", fmt(spec.time.dt));
  doc.set("time.stride", std::to_string(spec.time.stride));
  doc.set("time.cfl_factor", fmt(spec.time.cfl_factor));
  doc.set("checks.allow_unstable", spec.checks.allow_unstable ? "true" : "false");
  doc.set("checks.rho", fmt(spec.checks.rho));
  doc.set("checks.c_s", fmt(spec.checks.c_s));
  doc.set("checks.blow_up_threshold", fmt(spec.checks.blow_up_threshold));
  doc.set("checks.g_floor", fmt(spec.checks.g_floor_rel));
  doc.set("checks.compat_tol", fmt(spec.checks.compat_tol));
  doc.set("checks.kernel_samples", std::to_string(spec.checks.kernel_samples));
  doc.set("lyapunov.M", fmt(spec.lyapunov.M));
  doc.set("lyapunov.epsilon", fmt(spec.lyapunov.epsilon));
  return doc;
}

// ---------------------------------------------------------------------------

bool ValidationReport::passed() const { return failures() == 0; }

int ValidationReport::failures() const {
  return static_cast<int>(std::count_if(findings.begin(), findings.end(),
                                        [](const Finding& f) { return f.severity == Severity::kFail; }));
}

int ValidationReport::warnings() const {
  return static_cast<int>(std::count_if(
      findings.begin(), findings.end(),
      [](const Finding& f) { return f.severity == Severity::kWarning; }));
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& f : findings) {
    const char* tag = f.severity == Severity::kPass ? "PASS" : f.severity == Severity::kWarning ? "WARN" : "FAIL";
    os << "[" << tag << "] " << f.check << ": " << f.detail << "\n";
  }
  return os.str();
}

namespace {

void add(ValidationReport& r, std::string check, bool ok, std::string detail, double value = 0.0,
         bool soft = false) {
  r.findings.push_back(
      {std::move(check), ok ? Severity::kPass : (soft ? Severity::kWarning : Severity::kFail),
       std::move(detail), value});
}

void check_kernel(ValidationReport& r, const std::string& name, const RelaxationKernel& k,
                  const std::optional<double>& tail, double horizon, int samples) {
  if (k.is_zero()) {
    add(r, name + ".tail", true, "zero kernel, l = 1", 1.0);
    return;
  }
  const double g0 = k.value(0.0);
  add(r, name + ".g0", g0 > 0.0, "g(0) = " + fmt(g0), g0);
  if (!tail) {
    add(r, name + ".tail", false, "tail mass infinite; violates (A0)");
  } else {
    const double l = 1.0 - *tail;
    add(r, name + ".tail", l > 0.0, l > 0.0 ? "l = " + fmt(l) : "l <= 0 (l = " + fmt(l) + ")", l);
  }

  // (A0) sampled on [0, horizon]
  double worst_ineq = -std::numeric_limits<double>::infinity();
  double zeta_min = std::numeric_limits<double>::infinity();
  double last_rise = -1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double t = horizon * i / (samples - 1);
    const double z = k.zeta(t);
    worst_ineq = std::max(worst_ineq, k.derivative(t) + z * k.value(t));
    zeta_min = std::min(zeta_min, z);
    if (z > prev * (1.0 + 1e-12) + 1e-300) last_rise = t;
    prev = z;
  }
  const double tol = 1e-12 * std::fabs(g0);
  add(r, name + ".decay_inequality", worst_ineq <= tol,
      "max g' + zeta g = " + fmt(worst_ineq) + " over " + std::to_string(samples) + " samples",
      worst_ineq);
  add(r, name + ".zeta_nonnegative", zeta_min >= 0.0, "min zeta = " + fmt(zeta_min), zeta_min);
  if (last_rise < 0.0) {
    add(r, name + ".zeta_nonincreasing", true, "zeta nonincreasing on [0, " + fmt(horizon) + "]");
  } else {
    // the log_power rate nu (ln(1+t))^{nu-1}/(1+t) rises until t = e^{nu-1} - 1
    const bool known_rise = k.family == KernelFamily::kLogPower &&
                            last_rise <= std::exp(k.nu - 1.0) - 1.0 + horizon / (samples - 1);
    add(r, name + ".zeta_nonincreasing", false,
        "zeta increases up to t = " + fmt(last_rise) +
            (known_rise ? " (log_power rate is only eventually nonincreasing)" : ""),
        last_rise, known_rise);
  }
  if (k.family == KernelFamily::kLogPower) {
    add(r, name + ".log_power_nu", k.nu > 1.0, "nu = " + fmt(k.nu) + " (needs nu > 1)", k.nu);
  }
}

void check_delay(ValidationReport& r, const std::string& name, const DelayKernel& d, double damping,
                 bool allow_unstable) {
  add(r, name + ".tau1", d.tau1() >= 0.0, "tau1 = " + fmt(d.tau1()), d.tau1());
  add(r, name + ".tau_order", d.tau2() > d.tau1(),
      "tau2 - tau1 = " + fmt(d.tau2() - d.tau1()), d.tau2() - d.tau1());
  add(r, name + ".bounded", std::isfinite(d.sup_abs()), "sup |mu| = " + fmt(d.sup_abs()),
      d.sup_abs());
  const double margin = stability_margin(d, damping);
  add(r, name + ".margin", margin > 0.0,
      "damping - int|mu| = " + fmt(margin) + (margin > 0.0 ? "" : " (delay dominates damping)"),
      margin, allow_unstable);
}

}  // namespace

ValidationReport validate_spec(const ProblemSpec& spec) {
  ValidationReport r;
  add(r, "grid.domain", spec.grid.x_hi > spec.grid.x_lo,
      "[" + fmt(spec.grid.x_lo) + ", " + fmt(spec.grid.x_hi) + "]");
  add(r, "grid.n_interior", spec.grid.n_interior >= 2,
      "n_interior = " + std::to_string(spec.grid.n_interior), spec.grid.n_interior);
  add(r, "time.dt", spec.time.dt > 0.0, "dt = " + fmt(spec.time.dt), spec.time.dt);
  add(r, "time.T", spec.time.T >= 0.0, "T = " + fmt(spec.time.T), spec.time.T,
      spec.time.T == 0.0);
  if (spec.time.T == 0.0) r.findings.back().severity = Severity::kWarning;
  add(r, "time.stride", spec.time.stride >= 1, "stride = " + std::to_string(spec.time.stride),
      spec.time.stride);

  const double amax = std::max(spec.op_u.max_value(), spec.op_v.max_value());
  const double courant = spec.h > 0.0 ? spec.time.dt * std::sqrt(std::max(amax, 0.0)) / spec.h : 0.0;
  add(r, "time.cfl", spec.time.cfl_factor <= 1.0 && courant <= 1.0 + 1e-12,
      "dt sqrt(max a) / h = " + fmt(courant) + ", cfl_factor = " + fmt(spec.time.cfl_factor),
      courant);

  add(r, "operator_u.coercivity", spec.op_u.coercivity() > 0.0,
      "a01 = " + fmt(spec.op_u.coercivity()), spec.op_u.coercivity());
  add(r, "operator_v.coercivity", spec.op_v.coercivity() > 0.0,
      "a02 = " + fmt(spec.op_v.coercivity()), spec.op_v.coercivity());

  const double horizon = std::max(spec.time.T, 0.0) + std::max(spec.max_delay(), 0.0);
  const int samples = std::max(spec.checks.kernel_samples, 2);
  check_kernel(r, "kernel_u", spec.kernel_u, spec.tail_u, horizon > 0.0 ? horizon : 1.0, samples);
  check_kernel(r, "kernel_v", spec.kernel_v, spec.tail_v, horizon > 0.0 ? horizon : 1.0, samples);

  check_delay(r, "delay_u", spec.delay_u, spec.damping_u, spec.checks.allow_unstable);
  check_delay(r, "delay_v", spec.delay_v, spec.damping_v, spec.checks.allow_unstable);

  if (spec.source.enabled) {
    add(r, "source.coefficients", spec.source.a > 0.0 && spec.source.b > 0.0,
        "a = " + fmt(spec.source.a) + ", b = " + fmt(spec.source.b));
    add(r, "source.exponent", spec.source.p >= 3.0,
        "p = " + fmt(spec.source.p) + " (one space dimension needs p >= 3)", spec.source.p);
    add(r, "source.growth", spec.source.p >= 1.0 && spec.source.p < 6.0,
        "p = " + fmt(spec.source.p) + " (growth bound needs 1 <= p < 6)", spec.source.p);
  } else {
    add(r, "source.exponent", true, "sources disabled");
  }

  auto compat = [&](const char* name, const char* label, const Profile& u1,
                    const HistoryProfile& phi) {
    double worst = 0.0;
    for (int j = 0; j < spec.grid.n_interior; ++j) {
      const double x = spec.grid.node(j);
      worst = std::max(worst, std::fabs(phi(x, 0.0) - u1(x)));
    }
    const double tol = spec.checks.compat_tol * (1.0 + sample_max(spec.grid, u1));
    add(r, name, worst <= tol, std::string("max |phi(x,0) - ") + label + "(x)| = " + fmt(worst),
        worst);
  };
  compat("history.compat_u", "u1", spec.initial.u1, spec.history.phi0);
  compat("history.compat_v", "v1", spec.initial.v1, spec.history.phi1);
  return r;
}

}  // namespace viscowave
