#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "viscowave/acceptance.hpp"
#include "viscowave/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"viscowave: coupled viscoelastic wave simulator with distributed delay"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool allow_unstable = false;
  std::optional<int> stride;
  std::optional<int> workers;
  std::string filter;
  std::string inject;

  auto* run = app.add_subcommand("run", "Run one simulation and write energy.csv/summary.json");
  run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory (default out/<config stem>)");
  run->add_flag("--allow-unstable", allow_unstable, "Accept a negative delay margin and overflow");
  run->add_option("--stride", stride, "Diagnostic stride in steps")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a JSON manifest");
  sweep->add_option("--config", config, "Manifest file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory (default from the manifest)");
  sweep->add_option("--workers", workers, "Parallel runs (env VISCOWAVE_WORKERS)")
      ->check(CLI::PositiveNumber);
  sweep->add_flag("--allow-unstable", allow_unstable, "Pass --allow-unstable to every point");

  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_option("--filter", filter, "Criterion id, tag or name fragment");
  verify->add_option("--inject", inject, "Fault injection (source-a)");

  auto* validate = app.add_subcommand("validate", "Check a config against the model assumptions");
  validate->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  validate->add_flag("--allow-unstable", allow_unstable, "Downgrade margin failures to warnings");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    viscowave::RunOptions opt;
    opt.out_dir = out_dir;
    opt.allow_unstable = allow_unstable;
    opt.stride = stride;
    return viscowave::cmd_run(config, opt, std::cout, std::cerr);
  }
  if (*sweep) {
    viscowave::SweepOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    opt.workers = workers;
    opt.allow_unstable = allow_unstable;
    return viscowave::cmd_sweep(config, opt, std::cout, std::cerr);
  }
  if (*verify) {
    viscowave::AcceptanceOptions opt;
    opt.filter = filter;
    opt.inject = inject;
    const auto results = viscowave::run_acceptance(opt, std::cout);
    int failed = 0;
    for (const auto& r : results) failed += r.passed ? 0 : 1;
    std::cout << results.size() - failed << "/" << results.size() << " passed\n";
    return results.empty() || failed ? 1 : 0;
  }
  if (*validate) return viscowave::cmd_validate(config, allow_unstable, std::cout, std::cerr);
  return 1;
}
