#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "viscowave/config.hpp"
#include "viscowave/diagnostics.hpp"
#include "viscowave/integrator.hpp"

namespace viscowave {

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kValidation = 2;
inline constexpr int kOverflow = 3;
}  // namespace exit_code

struct RunOptions {
  std::filesystem::path out_dir;
  bool allow_unstable = false;
  std::optional<int> stride;
};

struct RunOutcome {
  int exit_code = exit_code::kOk;
  ValidationReport report;
  RunSummary summary;
  std::vector<DiagnosticRow> rows;
  MonotonicityResult monotonicity;
  std::optional<DecayFit> fit;
  std::string fit_error;
};

/// Validates, runs and writes energy.csv and summary.json into opt.out_dir.
/// `log` receives validation findings and a one-line summary.
RunOutcome run_experiment(ProblemSpec spec, const RunOptions& opt, std::ostream& log);

int cmd_run(const std::filesystem::path& config, const RunOptions& opt, std::ostream& out,
            std::ostream& err);
int cmd_validate(const std::filesystem::path& config, bool allow_unstable, std::ostream& out,
                 std::ostream& err);

struct SweepAxis {
  std::string key;  // "section.key"
  std::vector<std::string> values;
};

/// JSON manifest:
///   {"name": ..., "spec": "c1.cfg" | {"section.key": value, ...},
///    "axes": {"section.key": [v1, v2, ...]}, "out": "dir", "seed": 1, "cap": 256}
/// A relative spec path or output directory is taken relative to the manifest.
struct ExperimentManifest {
  std::string name;
  IniDocument base;
  std::vector<SweepAxis> axes;
  std::filesystem::path out;
  unsigned seed = 1;
  std::size_t cap = 256;

  static ExperimentManifest load(const std::filesystem::path& path);
  static ExperimentManifest parse(const std::string& json_text,
                                  const std::filesystem::path& base_dir);
  /// Size of the cross product; 1 for no axes.
  std::size_t points() const;
  /// Assignment of every axis for point `index` (last axis varies fastest).
  std::vector<std::pair<std::string, std::string>> point(std::size_t index) const;
};

struct SweepOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<int> workers;
  bool allow_unstable = false;
};

/// --workers wins, then VISCOWAVE_WORKERS, then the hardware concurrency.
int resolve_workers(std::optional<int> flag);

int cmd_sweep(const std::filesystem::path& manifest, const SweepOptions& opt, std::ostream& out,
              std::ostream& err);

}  // namespace viscowave
