#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "viscowave/field.hpp"
#include "viscowave/operator.hpp"
#include "viscowave/parallel_kernels.hpp"

namespace viscowave {

enum class KernelFamily { kZero, kExp, kPoly, kStretchedExp, kLogPower };

std::string_view family_name(KernelFamily f);
/// Accepts "zero", "exp", "poly", "stretched_exp", "log_power".
KernelFamily parse_family(std::string_view name);

/// Relaxation kernel g(t) together with its decay-rate function zeta(t).
///
///   exp            g = a e^{-b t}                 zeta = b
///   poly           g = a (1+t)^{-nu}              zeta = nu / (1+t)
///   stretched_exp  g = a e^{-b (1+t)^nu}          zeta = b nu (1+t)^{min(0, nu-1)}
///   log_power      g = a e^{-(ln(1+t))^nu}        zeta = nu (ln(1+t))^{nu-1} / (1+t)
///
/// For each family g'(t) <= -zeta(t) g(t); equality holds for exp, poly,
/// log_power and for stretched_exp with nu <= 1.
struct RelaxationKernel {
  KernelFamily family = KernelFamily::kZero;
  double a = 0.0;
  double b = 1.0;
  double nu = 1.0;

  static RelaxationKernel zero() { return {}; }
  static RelaxationKernel exponential(double a, double b) { return {KernelFamily::kExp, a, b, 1.0}; }
  static RelaxationKernel polynomial(double a, double nu) {
    return {KernelFamily::kPoly, a, 1.0, nu};
  }
  static RelaxationKernel stretched_exp(double a, double nu, double b = 1.0) {
    return {KernelFamily::kStretchedExp, a, b, nu};
  }
  static RelaxationKernel log_power(double a, double nu) {
    return {KernelFamily::kLogPower, a, 1.0, nu};
  }

  bool is_zero() const { return family == KernelFamily::kZero; }

  double value(double t) const;
  double derivative(double t) const;
  /// Throws for the zero family, which has no decay rate.
  double zeta(double t) const;
  /// Closed form of int_{t0}^{t} zeta(s) ds.
  double zeta_integral(double t0, double t) const;
  /// int_0^t g(s) ds (closed form for exp/poly, adaptive quadrature otherwise).
  double cumulative(double t) const;
  /// int_0^inf g(s) ds. Throws when the tail is not integrable.
  double tail_mass() const;
  /// l = 1 - int_0^inf g.
  double relaxed_modulus() const { return 1.0 - tail_mass(); }
  std::string describe() const;
};

/// g(t); throws for t < 0.
double kernel_eval(const RelaxationKernel& k, double t);
/// zeta(t); throws for t < 0 or the zero family.
double zeta_eval(const RelaxationKernel& k, double t);
/// int_0^inf g; 0 for the zero family.
double tail_mass(const RelaxationKernel& k);

/// Snapshots u(t_k), t_k = k dt, k = 0..latest, stored contiguously.
class FieldHistory {
 public:
  FieldHistory() = default;
  FieldHistory(int n, double dt, std::size_t reserve_steps = 0);

  void push(std::span<const double> snapshot);
  int size() const { return static_cast<int>(count_); }
  int latest_index() const { return static_cast<int>(count_) - 1; }
  int field_size() const { return n_; }
  double dt() const { return dt_; }
  double time_of(int k) const { return k * dt_; }
  std::span<const double> snapshot(int k) const;
  /// Contiguous rows [first, first+count).
  std::span<const double> rows(int first, int count) const;
  /// Grid index of t; throws HistoryGapError when t is off-grid or not yet recorded.
  int index_of(double t) const;

 private:
  int n_ = 0;
  double dt_ = 0.0;
  std::size_t count_ = 0;
  std::vector<double> data_;
};

/// Trapezoidal quadrature of the hereditary integrals over a FieldHistory,
/// with lag weights g(m dt) cached and the history truncated once
/// g falls below g_floor_rel * g(0).
class MemoryConvolver {
 public:
  MemoryConvolver() = default;
  MemoryConvolver(RelaxationKernel kernel, double dt, double g_floor_rel = 1e-14,
                  kernels::Backend backend = kernels::default_backend());

  const RelaxationKernel& kernel() const { return kernel_; }
  /// Largest lag index that contributes.
  int truncation_lag() const { return truncation_lag_; }

  /// int_0^t g(t - s) L u(s) ds at t = t_index * dt.
  void memory_term(const FieldHistory& hist, const DiscreteOperator& op, int t_index,
                   std::span<double> out) const;
  /// (g o u)(t) = int_0^t g(t - s) a(u(t) - u(s), u(t) - u(s)) ds.
  double g_circ(const FieldHistory& hist, const DiscreteOperator& op, int t_index) const;
  /// int_0^t g(t - s) (u(t) - u(s)) ds.
  void history_difference(const FieldHistory& hist, int t_index, std::span<double> out) const;

 private:
  /// Row range and matching trapezoid weights for time index N.
  int prepare(int t_index, std::vector<double>& weights) const;
  double lag_value(int m) const;

  RelaxationKernel kernel_;
  double dt_ = 0.0;
  double floor_ = 0.0;
  int truncation_lag_ = 0;
  kernels::Backend backend_ = kernels::Backend::kSerial;
  mutable std::vector<double> lag_cache_;
};

Field memory_term(const RelaxationKernel& k, const FieldHistory& hist, const DiscreteOperator& op,
                  double t, double g_floor_rel = 1e-14);
double g_circ(const RelaxationKernel& k, const FieldHistory& hist, const DiscreteOperator& op,
              double t, double g_floor_rel = 1e-14);

}  // namespace viscowave
