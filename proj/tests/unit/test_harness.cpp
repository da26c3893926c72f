#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "viscowave/harness.hpp"
#include "json.hpp"

using namespace viscowave;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("viscowave_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

std::vector<std::string> lines_of(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(f, line);) out.push_back(line);
  return out;
}

const char* kSmall = "[grid]\nn_interior = 24\n[time]\nT = 1\nstride = 5\n";
const char* kUnstable =
    "[grid]\nn_interior = 16\n[kernel_u]\nfamily = zero\n[kernel_v]\nfamily = zero\n"
    "[damping]\nu = 0\nv = 0\n[delay_u]\nmu = -2\n[delay_v]\nmu = 0\n"
    "[source]\nenabled = false\n[time]\nT = 200\n[checks]\nblow_up_threshold = 1e6\n";

}  // namespace

TEST(CmdRun, WritesEnergyCsvAndSummary) {
  TempDir tmp;
  write(tmp.path() / "small.cfg", kSmall);
  std::ostringstream out, err;
  RunOptions opt;
  opt.out_dir = tmp.path() / "run";
  ASSERT_EQ(cmd_run(tmp.path() / "small.cfg", opt, out, err), exit_code::kOk) << err.str();

  const ProblemSpec spec = load_spec(tmp.path() / "small.cfg");
  const auto rows = lines_of(opt.out_dir / "energy.csv");
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front(), csv_header());
  EXPECT_EQ(static_cast<int>(rows.size()) - 1, spec.time.steps() / 5 + 1);

  std::ifstream f(opt.out_dir / "summary.json");
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j["spec"]["grid"]["n_interior"], "24");
  EXPECT_TRUE(j.contains("validation"));
  EXPECT_EQ(j["run"]["overflow"], false);
  EXPECT_EQ(j["energy"]["monotone"], true);
}

TEST(CmdRun, ValidationFailureExitCode) {
  TempDir tmp;
  write(tmp.path() / "bad.cfg", "[delay_u]\ntau1 = 1\ntau2 = 0.5\n");
  std::ostringstream out, err;
  RunOptions opt;
  opt.out_dir = tmp.path() / "run";
  EXPECT_EQ(cmd_run(tmp.path() / "bad.cfg", opt, out, err), exit_code::kValidation);
  EXPECT_NE(out.str().find("delay_u.tau_order"), std::string::npos) << out.str();
  EXPECT_FALSE(fs::exists(opt.out_dir / "energy.csv"));
  EXPECT_EQ(cmd_validate(tmp.path() / "bad.cfg", false, out, err), exit_code::kValidation);
  EXPECT_EQ(cmd_run(tmp.path() / "missing.cfg", opt, out, err), exit_code::kValidation);
}

TEST(CmdRun, OverflowNeedsAllowUnstable) {
  TempDir tmp;
  write(tmp.path() / "unstable.cfg", kUnstable);
  std::ostringstream out, err;
  RunOptions opt;
  opt.out_dir = tmp.path() / "a";
  // the negative margin is a hard validation failure unless opted in
  EXPECT_EQ(cmd_run(tmp.path() / "unstable.cfg", opt, out, err), exit_code::kValidation);

  write(tmp.path() / "unstable.cfg", std::string(kUnstable) + "allow_unstable = true\n");
  EXPECT_EQ(cmd_run(tmp.path() / "unstable.cfg", opt, out, err), exit_code::kOk);
  EXPECT_TRUE(fs::exists(opt.out_dir / "summary.json"));

  // opting in on the command line instead of the file
  write(tmp.path() / "unstable.cfg", kUnstable);
  opt.allow_unstable = true;
  EXPECT_EQ(cmd_run(tmp.path() / "unstable.cfg", opt, out, err), exit_code::kOk);

  // a stable spec whose threshold is below the data size trips the overflow guard
  write(tmp.path() / "low.cfg", std::string(kSmall) + "[checks]\nblow_up_threshold = 1e-3\n");
  opt.allow_unstable = false;
  EXPECT_EQ(cmd_run(tmp.path() / "low.cfg", opt, out, err), exit_code::kOverflow);
  EXPECT_NE(err.str().find("overflow"), std::string::npos);
}

TEST(Manifest, InlineSpecAndAxes) {
  const auto m = ExperimentManifest::parse(
      R"({"name": "demo", "spec": {"grid.n_interior": 16, "time.T": 0.5},
          "axes": {"delay_u.mu": [0, 0.25], "source.p": [3, 4]}, "cap": 10})",
      "/tmp/base");
  EXPECT_EQ(m.name, "demo");
  EXPECT_EQ(m.points(), 4u);
  EXPECT_EQ(m.cap, 10u);
  EXPECT_EQ(m.out, fs::path("/tmp/base/out/demo"));
  const auto p = m.point(1);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0].first, "delay_u.mu");
  EXPECT_EQ(p[0].second, "0");
  EXPECT_EQ(p[1].second, "4");
  EXPECT_EQ(m.base.get("grid.n_interior"), "16");

  EXPECT_THROW(ExperimentManifest::parse("{}", "."), Error);
  EXPECT_THROW(ExperimentManifest::parse("[1]", "."), Error);
  EXPECT_THROW(ExperimentManifest::parse(R"({"spec": {"nosection": 1}})", "."), Error);
  EXPECT_THROW(ExperimentManifest::parse(R"({"spec": {}, "axes": {"a.b": []}})", "."), Error);
  EXPECT_EQ(ExperimentManifest::parse(R"({"spec": {}})", ".").points(), 1u);
}

TEST(Sweep, RunsEveryPoint) {
  TempDir tmp;
  write(tmp.path() / "small.cfg", kSmall);
  write(tmp.path() / "sweep.json",
        R"({"spec": "small.cfg", "axes": {"delay_u.mu": [0, 0.25, 0.5, 0.75]}, "out": "res"})");
  std::ostringstream out, err;
  SweepOptions opt;
  opt.workers = 2;
  ASSERT_EQ(cmd_sweep(tmp.path() / "sweep.json", opt, out, err), exit_code::kOk) << err.str();
  const auto rows = lines_of(tmp.path() / "res" / "sweep_summary.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].rfind("point,delay_u.mu,exit_code", 0), 0u) << rows[0];
  for (int i = 0; i < 4; ++i) {
    EXPECT_TRUE(fs::exists(tmp.path() / "res" / ("point_000" + std::to_string(i)) / "energy.csv"));
  }
}

TEST(Sweep, CapIsEnforced) {
  TempDir tmp;
  std::string axis = "[";
  for (int i = 0; i < 100; ++i) axis += (i ? "," : "") + std::to_string(i);
  axis += "]";
  write(tmp.path() / "big.json", R"({"spec": {}, "axes": {"source.a": )" + axis +
                                     R"(, "source.b": )" + axis + "}}");
  std::ostringstream out, err;
  EXPECT_EQ(cmd_sweep(tmp.path() / "big.json", {}, out, err), exit_code::kValidation);
  EXPECT_NE(err.str().find("10000 points"), std::string::npos);
}

TEST(Workers, Precedence) {
  ::setenv("VISCOWAVE_WORKERS", "3", 1);
  EXPECT_EQ(resolve_workers(5), 5);
  EXPECT_EQ(resolve_workers(std::nullopt), 3);
  ::unsetenv("VISCOWAVE_WORKERS");
  EXPECT_GE(resolve_workers(std::nullopt), 1);
}
