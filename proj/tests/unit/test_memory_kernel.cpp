#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "viscowave/memory_kernel.hpp"

using namespace viscowave;

namespace {

// composite Simpson with an even number of panels; independent of the library quadrature
template <class F>
double simpson(F f, double a, double b, int panels = 20000) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

GridSpec grid(int n) { return GridSpec{0.0, 1.0, n}; }

DiscreteOperator unit_op(const GridSpec& g) {
  return assemble(g, CoefficientField{std::vector<double>(g.n_interior + 1, 1.0)});
}

Field sine(const GridSpec& g) {
  Field f;
  for (double x : g.nodes()) f.push_back(std::sin(std::numbers::pi * x));
  return f;
}

}  // namespace

TEST(KernelEval, Examples) {
  EXPECT_DOUBLE_EQ(kernel_eval(RelaxationKernel::exponential(0.5, 1.0), 0.0), 0.5);
  EXPECT_DOUBLE_EQ(kernel_eval(RelaxationKernel::polynomial(2.0, 2.0), 1.0), 0.5);
  EXPECT_DOUBLE_EQ(kernel_eval(RelaxationKernel::log_power(1.0, 2.0), 0.0), 1.0);
  EXPECT_NEAR(kernel_eval(RelaxationKernel::stretched_exp(1.0, 0.5), 3.0), std::exp(-2.0), 1e-15);
  EXPECT_THROW(kernel_eval(RelaxationKernel::exponential(0.5, 1.0), -0.1), Error);
  EXPECT_EQ(kernel_eval(RelaxationKernel::zero(), 2.0), 0.0);
}

TEST(ZetaEval, Examples) {
  for (double t : {0.0, 0.7, 13.0}) {
    EXPECT_DOUBLE_EQ(zeta_eval(RelaxationKernel::exponential(0.3, 1.0), t), 1.0);
  }
  EXPECT_DOUBLE_EQ(zeta_eval(RelaxationKernel::polynomial(1.0, 2.0), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(zeta_eval(RelaxationKernel::stretched_exp(1.0, 0.5), 3.0), 0.25);
  EXPECT_THROW(zeta_eval(RelaxationKernel::zero(), 1.0), Error);
  EXPECT_THROW(zeta_eval(RelaxationKernel::polynomial(1.0, 2.0), -1.0), Error);
}

TEST(ZetaIntegral, ClosedFormsMatchQuadrature) {
  const RelaxationKernel ks[] = {
      RelaxationKernel::exponential(0.2, 1.3), RelaxationKernel::polynomial(0.2, 2.5),
      RelaxationKernel::stretched_exp(0.2, 0.5, 2.0), RelaxationKernel::stretched_exp(0.2, 1.5),
      RelaxationKernel::log_power(0.2, 2.0)};
  for (const auto& k : ks) {
    const double num = simpson([&](double s) { return k.zeta(s); }, 0.5, 12.0);
    EXPECT_NEAR(k.zeta_integral(0.5, 12.0), num, 1e-9) << k.describe();
  }
}

TEST(KernelInequality, SampledForEveryFamily) {
  const RelaxationKernel ks[] = {
      RelaxationKernel::exponential(0.2, 1.3), RelaxationKernel::polynomial(0.2, 2.5),
      RelaxationKernel::stretched_exp(0.2, 0.5), RelaxationKernel::stretched_exp(0.2, 1.5),
      RelaxationKernel::log_power(0.2, 2.0)};
  for (const auto& k : ks) {
    for (int i = 0; i < 1024; ++i) {
      const double t = 30.0 * i / 1023.0;
      EXPECT_LE(k.derivative(t) + k.zeta(t) * k.value(t), 1e-15) << k.describe() << " t=" << t;
    }
  }
  const auto e = RelaxationKernel::exponential(0.2, 1.3);
  EXPECT_NEAR(e.derivative(2.0) + e.zeta(2.0) * e.value(2.0), 0.0, 1e-17);
}

TEST(KernelDerivative, MatchesFiniteDifference) {
  const RelaxationKernel ks[] = {
      RelaxationKernel::exponential(0.2, 1.3), RelaxationKernel::polynomial(0.2, 2.5),
      RelaxationKernel::stretched_exp(0.2, 0.5), RelaxationKernel::log_power(0.2, 2.0)};
  for (const auto& k : ks) {
    for (double t : {0.3, 1.0, 5.0}) {
      const double fd = (k.value(t + 1e-6) - k.value(t - 1e-6)) / 2e-6;
      EXPECT_NEAR(k.derivative(t), fd, 1e-8) << k.describe();
    }
  }
}

TEST(TailMass, Examples) {
  EXPECT_DOUBLE_EQ(tail_mass(RelaxationKernel::exponential(0.5, 1.0)), 0.5);
  EXPECT_DOUBLE_EQ(RelaxationKernel::exponential(0.5, 1.0).relaxed_modulus(), 0.5);
  EXPECT_EQ(tail_mass(RelaxationKernel::zero()), 0.0);
  try {
    tail_mass(RelaxationKernel::polynomial(1.0, 0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("tail mass infinite"), std::string::npos);
  }
  EXPECT_THROW(tail_mass(RelaxationKernel::polynomial(1.0, 1.0)), Error);
}

TEST(TailMass, QuadratureFamiliesAgainstAnalytic) {
  // int_0^inf e^{-(1+t)} = e^{-1}
  EXPECT_NEAR(tail_mass(RelaxationKernel::stretched_exp(1.0, 1.0)), std::exp(-1.0),
              1e-8 * std::exp(-1.0));
  // int_0^inf e^{-(ln(1+t))^2} dt = e^{1/4} (sqrt(pi)/2) (1 + erf(1/2))
  const double ref = std::exp(0.25) * std::sqrt(std::numbers::pi) / 2.0 * (1.0 + std::erf(0.5));
  EXPECT_NEAR(tail_mass(RelaxationKernel::log_power(1.0, 2.0)), ref, 1e-8 * ref);
  EXPECT_NEAR(tail_mass(RelaxationKernel::polynomial(0.3, 3.0)), 0.15, 1e-15);
}

TEST(Cumulative, MatchesQuadrature) {
  const RelaxationKernel ks[] = {
      RelaxationKernel::exponential(0.2, 1.3), RelaxationKernel::polynomial(0.2, 2.5),
      RelaxationKernel::stretched_exp(0.2, 0.5), RelaxationKernel::log_power(0.2, 2.0)};
  for (const auto& k : ks) {
    const double num = simpson([&](double s) { return k.value(s); }, 0.0, 7.5);
    EXPECT_NEAR(k.cumulative(7.5), num, 1e-10) << k.describe();
  }
}

TEST(FieldHistory, IndexingAndGaps) {
  FieldHistory h(3, 0.1);
  h.push(Field{1, 2, 3});
  h.push(Field{4, 5, 6});
  EXPECT_EQ(h.index_of(0.1), 1);
  EXPECT_THROW(h.index_of(0.2), HistoryGapError);
  EXPECT_THROW(h.index_of(0.05), HistoryGapError);
  EXPECT_THROW(h.push(Field{1, 2}), DimensionError);
  EXPECT_DOUBLE_EQ(h.snapshot(1)[2], 6.0);
}

TEST(MemoryTerm, ZeroKernelAndEmptyIntegral) {
  const auto g = grid(16);
  const auto op = unit_op(g);
  FieldHistory h(16, 0.01);
  for (int k = 0; k < 5; ++k) h.push(sine(g));
  for (double v : memory_term(RelaxationKernel::zero(), h, op, 0.04)) EXPECT_EQ(v, 0.0);
  for (double v : memory_term(RelaxationKernel::exponential(0.5, 1.0), h, op, 0.0)) {
    EXPECT_EQ(v, 0.0);
  }
  EXPECT_THROW(memory_term(RelaxationKernel::exponential(0.5, 1.0), h, op, 0.05), HistoryGapError);
}

TEST(MemoryTerm, ConstantHistoryExponential) {
  const auto g = grid(32);
  const auto op = unit_op(g);
  const double a = 0.5, b = 1.0, t = 2.0;
  for (double dt : {0.02, 0.01}) {
    FieldHistory h(32, dt);
    const int steps = static_cast<int>(std::lround(t / dt));
    for (int k = 0; k <= steps; ++k) h.push(sine(g));
    const Field m = memory_term(RelaxationKernel::exponential(a, b), h, op, steps * dt);
    const Field lu = viscowave::apply(op, sine(g));
    const double factor = a / b * (1.0 - std::exp(-b * t));
    double worst = 0.0;
    for (int j = 0; j < 32; ++j) worst = std::max(worst, std::fabs(m[j] - factor * lu[j]));
    // trapezoid error a b^2 t dt^2 / 12 relative to |L u|
    EXPECT_LE(worst, 0.1 * dt * dt * max_abs(lu)) << "dt=" << dt;
  }
}

TEST(MemoryTerm, LinearInHistory) {
  const auto g = grid(20);
  const auto op = unit_op(g);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(-1, 1);
  FieldHistory h1(20, 0.05), h2(20, 0.05);
  for (int k = 0; k < 40; ++k) {
    Field f(20);
    for (auto& x : f) x = d(rng);
    h1.push(f);
    for (auto& x : f) x *= -2.5;
    h2.push(f);
  }
  const auto k = RelaxationKernel::polynomial(0.3, 2.0);
  const Field a = memory_term(k, h1, op, 39 * 0.05);
  const Field b = memory_term(k, h2, op, 39 * 0.05);
  for (int j = 0; j < 20; ++j) EXPECT_NEAR(b[j], -2.5 * a[j], 1e-12 * (1 + std::fabs(b[j])));
}

TEST(MemoryTerm, TruncationConsistency) {
  const auto g = grid(16);
  const auto op = unit_op(g);
  const double dt = 0.05;
  FieldHistory h(16, dt);
  for (int k = 0; k <= 800; ++k) {
    Field f = sine(g);
    for (auto& x : f) x *= std::cos(0.3 * k * dt);
    h.push(f);
  }
  const auto k = RelaxationKernel::exponential(0.4, 2.0);
  const double floor = 1e-6;
  MemoryConvolver c1(k, dt, floor), c2(k, dt, floor / 2);
  EXPECT_LT(c1.truncation_lag(), 800);
  Field m1(16), m2(16);
  c1.memory_term(h, op, 800, m1);
  c2.memory_term(h, op, 800, m2);
  const double lu_inf = max_abs(viscowave::apply(op, sine(g)));
  for (int j = 0; j < 16; ++j) EXPECT_LE(std::fabs(m1[j] - m2[j]), 10 * floor * lu_inf * 40.0);
}

TEST(GCirc, Examples) {
  const auto g = grid(24);
  const auto op = unit_op(g);
  FieldHistory constant(24, 0.01);
  for (int k = 0; k < 50; ++k) constant.push(sine(g));
  EXPECT_EQ(g_circ(RelaxationKernel::exponential(1.0, 1.0), constant, op, 0.49), 0.0);
  EXPECT_EQ(g_circ(RelaxationKernel::zero(), constant, op, 0.49), 0.0);

  // u(s) = s w, t = 1, a = b = 1: a(w, w) (2 - 5/e)
  const Field w = sine(g);
  const double aww = quadratic_form(op, w, w);
  double prev_err = 0.0;
  for (double dt : {0.02, 0.01}) {
    FieldHistory h(24, dt);
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    for (int k = 0; k <= steps; ++k) {
      Field f = w;
      for (auto& x : f) x *= k * dt;
      h.push(f);
    }
    const double got = g_circ(RelaxationKernel::exponential(1.0, 1.0), h, op, 1.0);
    const double err = std::fabs(got - aww * (2.0 - 5.0 / std::numbers::e));
    EXPECT_LE(err, 0.2 * dt * dt * aww);
    if (prev_err > 0.0) EXPECT_NEAR(prev_err / err, 4.0, 0.2);
    prev_err = err;
  }
}

TEST(GCirc, NonnegativeOnRandomHistories) {
  const auto g = grid(12);
  const auto op = assemble(g, CoefficientField{std::vector<double>(13, 0.7)});
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    FieldHistory h(12, 0.1);
    for (int k = 0; k < 30; ++k) {
      Field f(12);
      for (auto& x : f) x = d(rng);
      h.push(f);
    }
    EXPECT_GE(g_circ(RelaxationKernel::log_power(0.5, 2.0), h, op, 2.9), -1e-12);
  }
}

TEST(MemoryConvolver, SerialAndOpenMPBackendsAgree) {
  const auto g = grid(100);
  const auto op = unit_op(g);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-1, 1);
  FieldHistory h(100, 0.01);
  for (int k = 0; k < 300; ++k) {
    Field f(100);
    for (auto& x : f) x = d(rng);
    h.push(f);
  }
  const auto k = RelaxationKernel::polynomial(0.3, 2.0);
  MemoryConvolver s(k, 0.01, 1e-14, kernels::Backend::kSerial);
  MemoryConvolver o(k, 0.01, 1e-14, kernels::Backend::kOpenMP);
  Field a(100), b(100);
  s.memory_term(h, op, 299, a);
  o.memory_term(h, op, 299, b);
  EXPECT_EQ(a, b);
  EXPECT_EQ(s.g_circ(h, op, 299), o.g_circ(h, op, 299));
}
