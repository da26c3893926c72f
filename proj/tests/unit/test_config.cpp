#include <gtest/gtest.h>

#include <cmath>

#include "viscowave/config.hpp"

using namespace viscowave;

namespace {

ProblemSpec from_text(const std::string& text) {
  return spec_from_document(IniDocument::parse(text, "<test>"));
}

const Finding* find(const ValidationReport& r, const std::string& check) {
  for (const auto& f : r.findings) {
    if (f.check == check) return &f;
  }
  return nullptr;
}

}  // namespace

TEST(LoadSpec, MinimalConfigTakesDefaults) {
  const ProblemSpec s = from_text("");
  EXPECT_EQ(s.grid.n_interior, 128);
  EXPECT_TRUE(s.time.dt_from_cfl);
  const double h = 1.0 / 129.0;
  EXPECT_DOUBLE_EQ(s.h, h);
  EXPECT_GT(s.time.dt, 0.0);
  EXPECT_LE(s.time.dt, 0.9 * h);
  // T is an integer number of steps
  EXPECT_NEAR(s.time.steps() * s.time.dt, s.time.T, 1e-9);
  EXPECT_TRUE(validate_spec(s).passed()) << validate_spec(s).to_string();
}

TEST(LoadSpec, DeferredValidationForBadTau) {
  const ProblemSpec s = from_text("[delay_u]\ntau1 = 1\ntau2 = 0.5\n");
  EXPECT_DOUBLE_EQ(s.delay_u.tau1(), 1.0);
  const auto r = validate_spec(s);
  EXPECT_FALSE(r.passed());
  ASSERT_NE(find(r, "delay_u.tau_order"), nullptr);
  EXPECT_EQ(find(r, "delay_u.tau_order")->severity, Severity::kFail);
}

TEST(LoadSpec, PolyFamily) {
  const ProblemSpec s = from_text("[kernel_u]\nfamily = poly\na = 1\nnu = 2\n");
  EXPECT_EQ(s.kernel_u.family, KernelFamily::kPoly);
  EXPECT_DOUBLE_EQ(s.kernel_u.nu, 2.0);
  EXPECT_DOUBLE_EQ(s.kernel_u.value(1.0), 0.25);
}

TEST(LoadSpec, Errors) {
  EXPECT_THROW(from_text("[grid]\nn_interior = abc\n"), Error);
  EXPECT_THROW(from_text("[grid]\nbogus = 1\n"), Error);
  EXPECT_THROW(from_text("[kernel_u]\nfamily = gaussian\n"), Error);
  EXPECT_THROW(from_text("[initial]\nu0 = sin(\n"), Error);
  EXPECT_THROW(load_spec("/nonexistent/file.cfg"), Error);
}

TEST(LoadSpec, RoundTripThroughDocument) {
  const ProblemSpec a = from_text(
      "[kernel_v]\nfamily = stretched_exp\na = 0.2\nnu = 0.5\n[delay_v]\nmu = 0.1*s\n[time]\ndt = 0.005\n");
  const ProblemSpec b = spec_from_document(spec_to_document(a));
  EXPECT_EQ(a.kernel_v.family, b.kernel_v.family);
  EXPECT_DOUBLE_EQ(a.kernel_v.nu, b.kernel_v.nu);
  EXPECT_DOUBLE_EQ(a.time.dt, b.time.dt);
  EXPECT_DOUBLE_EQ(a.delay_v.mass(), b.delay_v.mass());
  EXPECT_EQ(a.initial.u0.text(), b.initial.u0.text());
}

TEST(Validate, ExponentialKernelsPassWithMargin) {
  const ProblemSpec s = from_text(
      "[kernel_u]\nfamily = exp\na = 0.5\nb = 1\n[kernel_v]\nfamily = exp\na = 0.5\nb = 1\n"
      "[delay_u]\nmu = 0.5\n[delay_v]\nmu = 0.5\n");
  const auto r = validate_spec(s);
  EXPECT_TRUE(r.passed()) << r.to_string();
  EXPECT_EQ(r.warnings(), 0);
  EXPECT_NEAR(find(r, "delay_u.margin")->value, 0.5, 1e-14);
  EXPECT_NEAR(find(r, "kernel_u.tail")->value, 0.5, 1e-14);
}

TEST(Validate, TailAtLeastOneFails) {
  const ProblemSpec s = from_text("[kernel_u]\nfamily = exp\na = 1\nb = 1\n");
  const auto r = validate_spec(s);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(find(r, "kernel_u.tail")->severity, Severity::kFail);
  EXPECT_NE(find(r, "kernel_u.tail")->detail.find("l <= 0"), std::string::npos);
}

TEST(Validate, DivergentTailFails) {
  const ProblemSpec s = from_text("[kernel_u]\nfamily = poly\na = 0.1\nnu = 0.5\n");
  EXPECT_FALSE(s.tail_u.has_value());
  EXPECT_EQ(find(validate_spec(s), "kernel_u.tail")->severity, Severity::kFail);
}

TEST(Validate, NegativeMarginIsWarningWhenAllowed) {
  const std::string text = "[delay_u]\ntau1 = 0\ntau2 = 1\nmu = 2\n";
  const ProblemSpec strict = from_text(text);
  EXPECT_EQ(find(validate_spec(strict), "delay_u.margin")->severity, Severity::kFail);
  const ProblemSpec loose = from_text(text + "[checks]\nallow_unstable = true\n");
  const auto r = validate_spec(loose);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(find(r, "delay_u.margin")->severity, Severity::kWarning);
}

TEST(Validate, CompatibilityViolation) {
  const ProblemSpec s = from_text("[initial]\nu1 = sin(pi*x)\n[history]\nphi0 = 0\n");
  EXPECT_EQ(find(validate_spec(s), "history.compat_u")->severity, Severity::kFail);
  const ProblemSpec ok = from_text("[initial]\nu1 = sin(pi*x)\n[history]\nphi0 = sin(pi*x)*cos(r)\n");
  EXPECT_EQ(find(validate_spec(ok), "history.compat_u")->severity, Severity::kPass);
}

TEST(Validate, ExponentAndCfl) {
  EXPECT_EQ(find(validate_spec(from_text("[source]\np = 2\n")), "source.exponent")->severity,
            Severity::kFail);
  EXPECT_EQ(find(validate_spec(from_text("[source]\np = 7\n")), "source.growth")->severity,
            Severity::kFail);
  EXPECT_EQ(find(validate_spec(from_text("[time]\ndt = 0.1\n")), "time.cfl")->severity,
            Severity::kFail);
  EXPECT_EQ(find(validate_spec(from_text("[operator_u]\ncoefficient = x - 0.5\n")),
                 "operator_u.coercivity")
                ->severity,
            Severity::kFail);
}

TEST(Validate, KernelInequalityForEveryFamily) {
  for (const char* fam : {"exp", "poly", "stretched_exp", "log_power"}) {
    const ProblemSpec s =
        from_text(std::string("[kernel_u]\nfamily = ") + fam + "\na = 0.2\nb = 1\nnu = 2\n");
    const auto r = validate_spec(s);
    EXPECT_EQ(find(r, "kernel_u.decay_inequality")->severity, Severity::kPass) << fam;
  }
  // exp: equality g' = -zeta g
  const ProblemSpec e = from_text("[kernel_u]\nfamily = exp\na = 0.2\nb = 1\n");
  EXPECT_LE(std::fabs(find(validate_spec(e), "kernel_u.decay_inequality")->value), 1e-15);
}

TEST(Validate, LogPowerRateRiseIsAWarning) {
  const ProblemSpec s = from_text("[kernel_u]\nfamily = log_power\na = 0.2\nnu = 2\n");
  const auto r = validate_spec(s);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(find(r, "kernel_u.zeta_nonincreasing")->severity, Severity::kWarning);
}

TEST(Validate, Deterministic) {
  const ProblemSpec s = from_text("[delay_u]\nmu = 3\n");
  EXPECT_EQ(validate_spec(s).to_string(), validate_spec(s).to_string());
}
