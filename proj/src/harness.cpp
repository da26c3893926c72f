#include "viscowave/harness.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace viscowave {

using nlohmann::json;

namespace {

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::kPass:
      return "pass";
    case Severity::kWarning:
      return "warning";
    case Severity::kFail:
      return "fail";
  }
  return "?";
}

json spec_json(const ProblemSpec& spec) {
  json out = json::object();
  const IniDocument doc = spec_to_document(spec);
  for (const auto& key : doc.keys()) {
    const auto dot = key.find('.');
    out[key.substr(0, dot)][key.substr(dot + 1)] = *doc.get(key);
  }
  return out;
}

json report_json(const ValidationReport& r) {
  json arr = json::array();
  for (const auto& f : r.findings) {
    arr.push_back({{"check", f.check},
                   {"severity", severity_name(f.severity)},
                   {"detail", f.detail},
                   {"value", f.value}});
  }
  return arr;
}

json fit_json(const DecayFit& f) {
  return {{"family", std::string(family_name(f.family))},
          {"K", f.K},
          {"alpha", f.alpha},
          {"residual", f.residual},
          {"log_range", f.log_range},
          {"natural_slope", f.natural_slope},
          {"t0", f.t0},
          {"t_end", f.t_end},
          {"samples", f.samples},
          {"no_decay", f.no_decay}};
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw Error("sweep value must be a number, string or boolean: " + v.dump());
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p);
  if (!f) throw Error("cannot write " + p.string());
  f << text;
}

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

RunOutcome run_experiment(ProblemSpec spec, const RunOptions& opt, std::ostream& log) {
  RunOutcome out;
  if (opt.allow_unstable) spec.checks.allow_unstable = true;
  if (opt.stride) spec.time.stride = *opt.stride;
  out.report = validate_spec(spec);
  if (!out.report.passed()) {
    log << out.report.to_string();
    out.exit_code = exit_code::kValidation;
    return out;
  }
  if (out.report.warnings() > 0) log << out.report.to_string();

  out.summary = run(spec, [&](const SimState& s) {
    out.rows.push_back(diagnostic_row(s, spec.lyapunov));
  });

  std::vector<double> times, energies;
  for (const auto& r : out.rows) {
    times.push_back(r.e.t);
    energies.push_back(r.e.total);
  }
  if (energies.size() >= 2) out.monotonicity = monotonicity_check(energies);
  try {
    FitOptions fo;
    fo.tau2 = spec.max_delay();
    out.fit = fit_decay(times, energies, spec.kernel_u, fo);
  } catch (const Error& e) {
    out.fit_error = e.what();
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ostringstream csv;
    csv << csv_header() << "\n";
    for (const auto& r : out.rows) csv << csv_line(r) << "\n";
    write_file(opt.out_dir / "energy.csv", csv.str());

    json j;
    j["spec"] = spec_json(spec);
    j["validation"] = report_json(out.report);
    j["run"] = {{"final_t", out.summary.final_t},
                {"steps", out.summary.steps},
                {"overflow", out.summary.overflow},
                {"initial_energy", out.summary.initial_energy},
                {"final_energy", out.summary.final_energy},
                {"samples", out.summary.samples}};
    j["energy"] = {{"monotone", out.monotonicity.passed},
                   {"increases", out.monotonicity.increases.size()},
                   {"max_increase", out.monotonicity.max_increase},
                   {"growth", out.summary.overflow || !out.monotonicity.passed}};
    j["decay_fit"] = out.fit ? fit_json(*out.fit) : json{{"error", out.fit_error}};
    if (spec.source.p > 1.0) {
      const double a = alpha_condition(spec, out.summary.initial_energy, spec.checks.rho);
      j["alpha_condition"] = {{"value", a}, {"rho", spec.checks.rho}, {"global_regime", a < 1.0}};
    }
    try {
      const EquivalenceResult eq = equivalence_check(out.rows);
      j["equivalence"] = {{"ratio_min", eq.ratio_min},
                          {"ratio_max", eq.ratio_max},
                          {"samples", eq.samples},
                          {"passed", eq.passed}};
    } catch (const Error& e) {
      j["equivalence"] = {{"error", e.what()}};
    }
    write_file(opt.out_dir / "summary.json", j.dump(2) + "\n");
  }

  log << "t=" << out.summary.final_t << " steps=" << out.summary.steps
      << " E0=" << g17(out.summary.initial_energy) << " E=" << g17(out.summary.final_energy)
      << (out.summary.overflow ? " overflow" : "")
      << (!out.monotonicity.passed ? " energy-increase" : "") << "\n";
  if (out.summary.overflow && !spec.checks.allow_unstable) out.exit_code = exit_code::kOverflow;
  return out;
}

int cmd_run(const std::filesystem::path& config, const RunOptions& opt, std::ostream& out,
            std::ostream& err) {
  ProblemSpec spec;
  try {
    spec = load_spec(config);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kValidation;
  }
  RunOptions o = opt;
  if (o.out_dir.empty()) o.out_dir = std::filesystem::path("out") / config.stem();
  try {
    const RunOutcome r = run_experiment(spec, o, out);
    if (r.exit_code == exit_code::kOverflow) {
      err << "error: overflow at t=" << r.summary.final_t << " (use --allow-unstable)\n";
    }
    return r.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kFailure;
  }
}

int cmd_validate(const std::filesystem::path& config, bool allow_unstable, std::ostream& out,
                 std::ostream& err) {
  try {
    ProblemSpec spec = load_spec(config);
    if (allow_unstable) spec.checks.allow_unstable = true;
    const ValidationReport r = validate_spec(spec);
    out << r.to_string();
    out << (r.passed() ? "valid" : "invalid") << " (" << r.failures() << " failure(s), "
        << r.warnings() << " warning(s))\n";
    return r.passed() ? exit_code::kOk : exit_code::kValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kValidation;
  }
}

// ---------------------------------------------------------------------------

ExperimentManifest ExperimentManifest::parse(const std::string& text,
                                             const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest: ") + e.what());
  }
  if (!j.is_object()) throw Error("manifest: top level must be an object");
  ExperimentManifest m;
  m.name = j.value("name", std::string("sweep"));
  m.seed = j.value("seed", 1u);
  m.cap = j.value("cap", std::size_t{256});

  if (!j.contains("spec")) throw Error("manifest: missing 'spec'");
  const json& spec = j["spec"];
  if (spec.is_string()) {
    std::filesystem::path p = spec.get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    m.base = IniDocument::load(p);
  } else if (spec.is_object()) {
    std::string ini;
    for (const auto& [key, value] : spec.items()) {
      const auto dot = key.find('.');
      if (dot == std::string::npos) throw Error("manifest: spec key '" + key + "' needs a section");
      ini += "[" + key.substr(0, dot) + "]\n" + key.substr(dot + 1) + " = " +
             json_scalar(value) + "\n";
    }
    m.base = IniDocument::parse(ini, (base_dir / "<inline>").string());
  } else {
    throw Error("manifest: 'spec' must be a path or an object");
  }

  if (j.contains("axes")) {
    if (!j["axes"].is_object()) throw Error("manifest: 'axes' must be an object");
    for (const auto& [key, values] : j["axes"].items()) {
      if (!values.is_array() || values.empty()) {
        throw Error("manifest: axis '" + key + "' needs a nonempty list");
      }
      SweepAxis axis{key, {}};
      for (const auto& v : values) axis.values.push_back(json_scalar(v));
      m.axes.push_back(std::move(axis));
    }
  }
  std::filesystem::path out = j.value("out", "out/" + m.name);
  m.out = out.is_relative() ? base_dir / out : out;
  return m;
}

ExperimentManifest ExperimentManifest::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.parent_path());
}

std::size_t ExperimentManifest::points() const {
  std::size_t n = 1;
  for (const auto& a : axes) {
    if (n > (std::size_t{1} << 40) / a.values.size()) return std::size_t{1} << 40;
    n *= a.values.size();
  }
  return n;
}

std::vector<std::pair<std::string, std::string>> ExperimentManifest::point(
    std::size_t index) const {
  std::vector<std::pair<std::string, std::string>> out(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    const auto& a = axes[i];
    out[i] = {a.key, a.values[index % a.values.size()]};
    index /= a.values.size();
  }
  return out;
}

int resolve_workers(std::optional<int> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("VISCOWAVE_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_sweep(const std::filesystem::path& manifest_path, const SweepOptions& opt,
              std::ostream& out, std::ostream& err) {
  ExperimentManifest m;
  try {
    m = ExperimentManifest::load(manifest_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kValidation;
  }
  const std::size_t n = m.points();
  if (n > m.cap) {
    err << "error: sweep has " << n << " points, cap is " << m.cap << "\n";
    return exit_code::kValidation;
  }
  const std::filesystem::path root = opt.out_dir ? *opt.out_dir : m.out;
  std::filesystem::create_directories(root);

  struct PointResult {
    int code = 0;
    std::string message;
    RunOutcome outcome;
    double margin_u = 0.0;
    double margin_v = 0.0;
  };
  std::vector<PointResult> results(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      PointResult& pr = results[i];
      char dir[32];
      std::snprintf(dir, sizeof dir, "point_%04zu", i);
      std::ostringstream log;
      try {
        IniDocument doc = m.base;
        for (const auto& [k, v] : m.point(i)) doc.set(k, v);
        ProblemSpec spec = spec_from_document(doc);
        pr.margin_u = stability_margin(spec.delay_u, spec.damping_u);
        pr.margin_v = stability_margin(spec.delay_v, spec.damping_v);
        RunOptions ro;
        ro.out_dir = root / dir;
        ro.allow_unstable = opt.allow_unstable;
        pr.outcome = run_experiment(spec, ro, log);
        pr.outcome.rows.clear();
        pr.code = pr.outcome.exit_code;
      } catch (const Error& e) {
        pr.code = exit_code::kFailure;
        log << "error: " << e.what() << "\n";
      }
      pr.message = log.str();
      std::lock_guard<std::mutex> lock(log_mutex);
      out << dir << ": " << pr.message;
    }
  };
  const int workers = std::min<int>(resolve_workers(opt.workers), static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "point";
  for (const auto& a : m.axes) csv << "," << csv_escape(a.key);
  csv << ",exit_code,margin_u,margin_v,final_t,overflow,final_energy,alpha,K,fit_residual,"
         "natural_slope,energy_increases\n";
  int worst = exit_code::kOk;
  for (std::size_t i = 0; i < n; ++i) {
    const PointResult& pr = results[i];
    const RunOutcome& o = pr.outcome;
    csv << i;
    for (const auto& [k, v] : m.point(i)) csv << "," << csv_escape(v);
    csv << "," << pr.code << "," << g17(pr.margin_u) << "," << g17(pr.margin_v) << ","
        << g17(o.summary.final_t) << "," << (o.summary.overflow ? 1 : 0) << ","
        << g17(o.summary.final_energy) << ",";
    if (o.fit) {
      csv << g17(o.fit->alpha) << "," << g17(o.fit->K) << "," << g17(o.fit->residual) << ","
          << g17(o.fit->natural_slope);
    } else {
      csv << ",,,";
    }
    csv << "," << o.monotonicity.increases.size() << "\n";
    worst = std::max(worst, pr.code);
  }
  write_file(root / "sweep_summary.csv", csv.str());
  out << "wrote " << (root / "sweep_summary.csv").string() << " (" << n << " point(s))\n";
  return worst;
}

}  // namespace viscowave
