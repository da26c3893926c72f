#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "viscowave/diagnostics.hpp"

using namespace viscowave;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec from_text(const std::string& text) {
  return spec_from_document(IniDocument::parse(text, "<test>"));
}

const char* kBare = R"(
[kernel_u]
family = zero
[kernel_v]
family = zero
[delay_u]
mu = 0
[delay_v]
mu = 0
[source]
enabled = false
[initial]
v0 = 0
)";

}  // namespace

TEST(Energy, ZeroStateIsZero) {
  const SimState s = initialize(from_text("[initial]\nu0 = 0\nv0 = 0\n"));
  const EnergyReport e = energy(s);
  EXPECT_EQ(e.total, 0.0);
  EXPECT_EQ(stability_functional_I(s), 0.0);
  EXPECT_EQ(identity_residual(s), 0.0);
}

TEST(Energy, ElasticPartOfSineMode) {
  const ProblemSpec spec =
      from_text(std::string(kBare) + "[grid]\nn_interior = 255\n[initial]\nu0 = sin(pi*x)\n");
  const SimState s = initialize(spec);
  const EnergyReport e = energy(s);
  EXPECT_NEAR(e.elastic_u, kPi * kPi / 4, 1e-3);
  EXPECT_EQ(e.kinetic_u, 0.0);
  EXPECT_EQ(e.elastic_v, 0.0);
  EXPECT_DOUBLE_EQ(e.total, e.elastic_u);
  // with no sources, memory or delay, I reduces to a(u, u)
  EXPECT_NEAR(stability_functional_I(s), kPi * kPi / 2, 2e-3);
}

TEST(Energy, DelayPartForConstantVelocity) {
  // n h = 15/16, so the constant sqrt(16/15) has unit h-weighted norm
  const std::string text = std::string(kBare) +
                           "[grid]\nn_interior = 15\n[initial]\nu0 = 0\n"
                           "u1 = sqrt(16/15)\n[history]\nphi0 = sqrt(16/15)\n"
                           "[delay_u]\nmu = 1\n[damping]\nu = 2\n";
  const SimState s = initialize(from_text(text));
  const EnergyReport e = energy(s);
  EXPECT_NEAR(e.delay_u, 0.25, 1e-13);
  EXPECT_NEAR(e.kinetic_u, 0.5, 1e-13);
  const LyapunovParts lp = lyapunov_L(s, {});
  EXPECT_NEAR(lp.I_d, 1.0 / std::numbers::e, 1e-12);
  EXPECT_LE(identity_residual(s), 1e-14);
  // the functional J matches the energy term by term; the unweighted variant does not
  EXPECT_NEAR(functional_J(s), e.total - e.kinetic_u - e.kinetic_v, 1e-14);
  EXPECT_NEAR(functional_J_unweighted(s), 0.5, 1e-13);
}

TEST(Lyapunov, PsiAndPhiAtStart) {
  const std::string text =
      "[grid]\nn_interior = 63\n[initial]\nu0 = sin(pi*x)\nu1 = sin(pi*x)\nv0 = 0\n"
      "[history]\nphi0 = sin(pi*x)\n";
  const SimState s = initialize(from_text(text));
  LyapunovConfig cfg;
  const LyapunovParts lp = lyapunov_L(s, cfg);
  EXPECT_NEAR(lp.psi, 0.5, 1e-12);
  EXPECT_EQ(lp.phi, 0.0);
  EXPECT_NEAR(lp.L, cfg.M * energy(s).total + cfg.epsilon * (lp.psi + lp.I_d) + lp.phi, 1e-12);
}

TEST(AlphaCondition, Examples) {
  EXPECT_DOUBLE_EQ(alpha_condition(3.0, 0.2, 1.0), 0.8);
  EXPECT_DOUBLE_EQ(alpha_condition(3.0, 2.0, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(alpha_condition(3.0, 0.0, 1.0), 0.0);
  EXPECT_THROW(alpha_condition(1.0, 1.0, 1.0), Error);
  EXPECT_THROW(alpha_condition(3.0, -1.0, 1.0), Error);
  EXPECT_THROW(alpha_condition(3.0, 1.0, 0.0), Error);
}

TEST(Monotonicity, FlagsUpticks) {
  const std::vector<double> e{1.0, 0.9, 0.901, 0.8};
  const auto m = monotonicity_check(e);
  EXPECT_FALSE(m.passed);
  ASSERT_EQ(m.increases.size(), 1u);
  EXPECT_EQ(m.increases[0], 1);
  EXPECT_NEAR(m.max_increase, 1e-3, 1e-15);
  EXPECT_TRUE(monotonicity_check(e, 2e-3).passed);
  EXPECT_TRUE(monotonicity_check(std::vector<double>{3, 2, 2, 1}).passed);
  EXPECT_THROW(monotonicity_check(std::vector<double>{1.0}), Error);
}

TEST(DecayFit, ExponentialOracle) {
  std::vector<double> t, e;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.1 * i);
    e.push_back(2.0 * std::exp(-0.3 * t.back()));
  }
  FitOptions fo;
  fo.t0 = 5.0;
  const DecayFit f = fit_decay(t, e, RelaxationKernel::exponential(0.25, 0.6), fo);
  // X = 0.6 (t - t0), so alpha = 0.5
  EXPECT_NEAR(f.alpha, 0.5, 1e-9);
  EXPECT_NEAR(f.K, 2.0 * std::exp(-1.5), 1e-9);
  EXPECT_NEAR(f.natural_slope, -0.3, 1e-9);
  EXPECT_LE(f.residual, 1e-9);
  EXPECT_NEAR(f.log_range, 0.3 * 35.0, 1e-9);
  EXPECT_FALSE(f.no_decay);
}

TEST(DecayFit, PolynomialOracle) {
  std::vector<double> t, e;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.1 * i);
    e.push_back(5.0 * std::pow(1.0 + t.back(), -2.0));
  }
  const DecayFit f = fit_decay(t, e, RelaxationKernel::polynomial(1.0, 2.0));
  EXPECT_NEAR(f.natural_slope, -2.0, 1e-9);
  EXPECT_GT(f.alpha, 0.0);
  EXPECT_NEAR(f.K, 5.0 * std::pow(1.0 + f.t0, -2.0), 1e-6);
}

TEST(DecayFit, ConstantAndShortSeries) {
  std::vector<double> t, e;
  for (int i = 0; i < 100; ++i) {
    t.push_back(i);
    e.push_back(1.5);
  }
  const DecayFit f = fit_decay(t, e, RelaxationKernel::exponential(0.25, 1.0));
  EXPECT_TRUE(f.no_decay);
  EXPECT_EQ(f.alpha, 0.0);
  t.resize(10);
  e.resize(10);
  EXPECT_THROW(fit_decay(t, e, RelaxationKernel::exponential(0.25, 1.0)), Error);
}

TEST(Equivalence, RatioBoundsAndErrors) {
  DiagnosticRow a, b;
  a.e.total = 1.0;
  a.L = 90.0;
  b.e.total = 0.5;
  b.L = 55.0;
  const std::vector<DiagnosticRow> rows{a, b};
  const auto r = equivalence_check(rows);
  EXPECT_TRUE(r.passed);
  EXPECT_DOUBLE_EQ(r.ratio_min, 90.0);
  EXPECT_DOUBLE_EQ(r.ratio_max, 110.0);
  EXPECT_EQ(r.samples, 2);

  std::vector<DiagnosticRow> bad = rows;
  bad[1].L = -0.1;
  EXPECT_FALSE(equivalence_check(bad).passed);
  EXPECT_THROW(equivalence_check(std::vector<DiagnosticRow>{}), Error);
}

TEST(Equivalence, SmallMultiplierBreaksLowerBound) {
  // L = M E + eps psi + ...: a tiny M with u u_t < 0 makes L negative
  const std::string text =
      "[grid]\nn_interior = 31\n[initial]\nu0 = sin(pi*x)\nu1 = -sin(pi*x)\nv0 = 0\n"
      "[history]\nphi0 = -sin(pi*x)\n";
  const SimState s = initialize(from_text(text));
  LyapunovConfig cfg;
  cfg.M = 1e-3;
  cfg.epsilon = 1.0;
  const std::vector<DiagnosticRow> rows{diagnostic_row(s, cfg)};
  const auto r = equivalence_check(rows);
  EXPECT_LE(r.ratio_min, 0.0);
  EXPECT_FALSE(r.passed);
}

TEST(Csv, HeaderAndLineAgree) {
  const std::string h = csv_header();
  EXPECT_EQ(std::count(h.begin(), h.end(), ','), 16);
  DiagnosticRow row;
  row.e.t = 0.1;
  row.L = 1.0 / 3.0;
  const std::string line = csv_line(row);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 16);
  EXPECT_NE(line.find("0.33333333333333331"), std::string::npos);
  EXPECT_EQ(h.substr(0, 12), "t,kinetic_u,");
}
