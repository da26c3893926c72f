#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "viscowave/operator.hpp"

using namespace viscowave;

namespace {

CoefficientField sampled(const GridSpec& g, double (*a)(double)) {
  CoefficientField c;
  for (double x : g.interfaces()) c.samples.push_back(a(x));
  return c;
}

CoefficientField constant(const GridSpec& g, double v) {
  return CoefficientField{std::vector<double>(g.n_interior + 1, v)};
}

Field random_field(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(n);
  for (auto& x : f) x = d(rng);
  return f;
}

}  // namespace

TEST(Assemble, HandStencil) {
  const GridSpec g{0.0, 1.0, 3};
  const auto op = assemble(g, constant(g, 1.0));
  for (int j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(op.diag(j), 32.0);
  EXPECT_DOUBLE_EQ(op.upper(0), -16.0);
  EXPECT_DOUBLE_EQ(op.lower(1), -16.0);
  EXPECT_DOUBLE_EQ(op.upper(1), -16.0);
  EXPECT_DOUBLE_EQ(op.lower(2), -16.0);
  EXPECT_DOUBLE_EQ(op.lower(0), 0.0);
  EXPECT_DOUBLE_EQ(op.upper(2), 0.0);
}

TEST(Assemble, LinearInCoefficient) {
  const GridSpec g{0.0, 1.0, 17};
  const auto a1 = assemble(g, constant(g, 1.0));
  const auto a3 = assemble(g, constant(g, 3.0));
  for (int j = 0; j < g.n_interior; ++j) {
    EXPECT_DOUBLE_EQ(a3.diag(j), 3.0 * a1.diag(j));
    EXPECT_DOUBLE_EQ(a3.upper(j), 3.0 * a1.upper(j));
  }
}

TEST(Assemble, VariableCoefficientIsSymmetric) {
  const GridSpec g{0.0, 1.0, 31};
  const auto op = assemble(g, sampled(g, [](double x) { return 1.0 + x; }));
  for (int j = 0; j + 1 < g.n_interior; ++j) EXPECT_EQ(op.upper(j), op.lower(j + 1));
  EXPECT_DOUBLE_EQ(op.coercivity(), 1.0 + 0.5 * g.spacing());
}

TEST(Assemble, DimensionMismatch) {
  const GridSpec g{0.0, 1.0, 8};
  EXPECT_THROW(assemble(g, CoefficientField{std::vector<double>(8, 1.0)}), DimensionError);
  const auto op = assemble(g, constant(g, 1.0));
  EXPECT_THROW(viscowave::apply(op, Field(7, 0.0)), DimensionError);
  EXPECT_THROW(quadratic_form(op, Field(8, 0.0), Field(9, 0.0)), DimensionError);
}

TEST(Apply, ParabolaGivesTwo) {
  const GridSpec g{0.0, 1.0, 63};
  const auto op = assemble(g, constant(g, 1.0));
  Field u;
  for (double x : g.nodes()) u.push_back(x * (1.0 - x));
  const Field lu = viscowave::apply(op, u);
  // the 3-point stencil is exact on quadratics
  for (double v : lu) EXPECT_NEAR(v, 2.0, 1e-9);
}

TEST(Apply, ZeroAndEigenvector) {
  const GridSpec g{0.0, 1.0, 40};
  const auto op = assemble(g, constant(g, 1.0));
  for (double v : viscowave::apply(op, Field(40, 0.0))) EXPECT_EQ(v, 0.0);
  Field u;
  for (double x : g.nodes()) u.push_back(std::sin(std::numbers::pi * x));
  const double h = g.spacing();
  const double lam = (2.0 - 2.0 * std::cos(std::numbers::pi * h)) / (h * h);
  EXPECT_NEAR(lam, discrete_first_eigenvalue(g), 1e-9);
  const Field lu = viscowave::apply(op, u);
  for (int j = 0; j < 40; ++j) EXPECT_NEAR(lu[j], lam * u[j], 1e-9);
}

TEST(QuadraticForm, SineEnergy) {
  const GridSpec g{0.0, 1.0, 255};
  const auto op = assemble(g, constant(g, 1.0));
  Field u;
  for (double x : g.nodes()) u.push_back(std::sin(std::numbers::pi * x));
  EXPECT_NEAR(quadratic_form(op, u, u), std::numbers::pi * std::numbers::pi / 2.0, 1e-3);
  EXPECT_EQ(quadratic_form(op, Field(255, 0.0), Field(255, 0.0)), 0.0);
}

TEST(QuadraticForm, MatchesWeightedInnerProductWithApply) {
  const GridSpec g{0.0, 2.0, 50};
  const auto op = assemble(g, sampled(g, [](double x) { return 2.0 + std::sin(x); }));
  std::mt19937_64 rng(3);
  const Field u = random_field(rng, 50), w = random_field(rng, 50);
  EXPECT_NEAR(quadratic_form(op, u, w), inner(viscowave::apply(op, u), w, g.spacing()), 1e-10);
}

TEST(QuadraticForm, SymmetryCoercivityRayleigh) {
  const GridSpec g{0.0, 1.0, 64};
  const auto op = assemble(g, sampled(g, [](double x) { return 0.5 + x * x; }));
  const double h = g.spacing();
  const double lam1 = discrete_first_eigenvalue(g);
  std::mt19937_64 rng(11);
  double min_rq = 1e300;
  for (int trial = 0; trial < 1000; ++trial) {
    const Field u = random_field(rng, 64), w = random_field(rng, 64);
    const double uw = quadratic_form(op, u, w), wu = quadratic_form(op, w, u);
    const double uu = quadratic_form(op, u, u), ww = quadratic_form(op, w, w);
    EXPECT_LE(std::fabs(uw - wu), 1e-13 * (1.0 + std::fabs(uu) + std::fabs(ww)));
    EXPECT_GE(uu, op.coercivity() * gradient_norm_sq(u, h) * (1.0 - 1e-13));
    min_rq = std::min(min_rq, uu / norm_sq(u, h));
  }
  EXPECT_GE(min_rq, op.coercivity() * lam1 * (1.0 - 1e-12));
}
