#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "viscowave/config.hpp"

namespace viscowave {

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<std::string> tags;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Empty runs everything; otherwise a criterion id, or a word matched
  /// against names and tags ("decay", "energy", "mms", ...).
  std::string filter;
  /// Fault injection: "source-a" evaluates the sources with a different `a`
  /// than the potential, which must break the identity check.
  std::string inject;
  unsigned seed = 20240611;
};

/// Reference configuration: exp kernels (a = 0.25, b = 1), unit damping, delay
/// weight 0.25 on [0, 1], sources a = b = 1, p = 3, small data.
std::string c1_config_text();
ProblemSpec c1_spec(int n_interior = 128, double T = 20.0);

bool criterion_selected(const AcceptanceOptions& opt, int id, const std::string& name,
                        const std::vector<std::string>& tags);

/// Runs the selected criteria. Each result is printed to `out` as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt, std::ostream& out);

/// One "PASS|FAIL [id] name: detail" line.
std::string format_result(const CriterionResult& r);

}  // namespace viscowave
