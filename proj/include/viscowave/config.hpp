#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "viscowave/delay_line.hpp"
#include "viscowave/expression.hpp"
#include "viscowave/ini.hpp"
#include "viscowave/memory_kernel.hpp"
#include "viscowave/operator.hpp"
#include "viscowave/source.hpp"

namespace viscowave {

/// Scalar profile in x (coefficients, initial data) stored as an expression
/// so that a resolved spec can be written back out.
struct Profile {
  Expression expr = Expression::constant(0.0);

  static Profile parse(const std::string& text) { return {Expression::parse(text, {"x"})}; }
  static Profile constant(double c) { return {Expression::constant(c)}; }
  double operator()(double x) const { return expr(x); }
  const std::string& text() const { return expr.text(); }
};

/// Velocity prehistory phi(x, r) = u_t(x, -r), r in [0, tau2].
struct HistoryProfile {
  Expression expr = Expression::constant(0.0);

  static HistoryProfile parse(const std::string& text) {
    return {Expression::parse(text, {"x", "r"})};
  }
  double operator()(double x, double r) const { return expr(x, r); }
  const std::string& text() const { return expr.text(); }
};

struct InitialData {
  Profile u0, v0, u1, v1;
};

struct HistorySpec {
  HistoryProfile phi0, phi1;
};

struct TimeSpec {
  double dt = 0.0;  // resolved; derived from the CFL bound when not given
  double T = 20.0;
  int stride = 10;
  double cfl_factor = 0.9;
  bool dt_from_cfl = true;

  int steps() const;
};

/// Run-time checks and tolerances that are not part of the equations.
struct CheckSettings {
  bool allow_unstable = false;
  double rho = 1.0;  // Sobolev-type constant estimate used by the global-existence test
  double c_s = 0.318309886183790671;  // embedding constant estimate, 1/pi on the unit interval
  double blow_up_threshold = 1e12;
  double g_floor_rel = 1e-14;
  double compat_tol = 1e-8;
  int kernel_samples = 1024;
};

struct LyapunovConfig {
  double M = 100.0;
  double epsilon = 0.01;
};

struct ProblemSpec {
  GridSpec grid;
  Profile coeff_u = Profile::constant(1.0);
  Profile coeff_v = Profile::constant(1.0);
  RelaxationKernel kernel_u;
  RelaxationKernel kernel_v;
  double damping_u = 1.0;
  double damping_v = 1.0;
  DelayKernel delay_u;
  DelayKernel delay_v;
  SourceParams source;
  InitialData initial;
  HistorySpec history;
  TimeSpec time;
  CheckSettings checks;
  LyapunovConfig lyapunov;

  /// Derived quantities filled by resolve(): spacing, interface samples and kernel tails.
  double h = 0.0;
  CoefficientField op_u;
  CoefficientField op_v;
  std::optional<double> tail_u;  // empty when the tail integral diverges
  std::optional<double> tail_v;

  /// Recomputes the derived quantities (and dt when it is CFL-derived).
  void resolve();
  double max_delay() const { return std::max(delay_u.tau2(), delay_v.tau2()); }
};

/// Canonical key set with defaults; load_spec overlays a file on top of it.
IniDocument default_config();

/// Builds a ProblemSpec from a config document. Missing keys take defaults.
/// Throws viscowave::Error on unknown keys, malformed numbers and bad expressions.
/// Assumption violations (tau2 <= tau1, l <= 0, ...) are left for validate_spec.
ProblemSpec spec_from_document(const IniDocument& doc);
ProblemSpec load_spec(const std::filesystem::path& path);

/// Inverse of spec_from_document for everything expressible in the config format.
IniDocument spec_to_document(const ProblemSpec& spec);

enum class Severity { kPass, kWarning, kFail };

struct Finding {
  std::string check;
  Severity severity = Severity::kPass;
  std::string detail;
  double value = 0.0;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool passed() const;  // no kFail
  int failures() const;
  int warnings() const;
  std::string to_string() const;
};

/// One finding per structural assumption; deterministic and side-effect free.
ValidationReport validate_spec(const ProblemSpec& spec);

}  // namespace viscowave
