#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viscowave/expression.hpp"
#include "viscowave/field.hpp"

namespace viscowave {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with `points` nodes (16 or 32) mapped onto [lo, hi].
QuadratureRule gauss_legendre(int points, double lo, double hi);

/// Distributed-delay weight mu(s) on [tau1, tau2] with its quadrature.
///
/// Smooth weights (constant or expression) use 32-point Gauss-Legendre;
/// tabulated weights use the composite trapezoid rule on the table grid.
class DelayKernel {
 public:
  enum class Kind { kConstant, kExpression, kTable };

  DelayKernel() { finalize(); }

  static DelayKernel constant(double mu, double tau1, double tau2);
  /// `mu` is an expression in the variable `s`.
  static DelayKernel from_expression(Expression mu, double tau1, double tau2);
  /// Table abscissae define [tau1, tau2]; the weight is linear between entries.
  static DelayKernel from_table(std::vector<double> s, std::vector<double> mu);
  /// Two-column CSV (s, mu(s)); '#' comments and a non-numeric header line are skipped.
  static DelayKernel load_csv(const std::filesystem::path& path);

  Kind kind() const { return kind_; }
  double tau1() const { return tau1_; }
  double tau2() const { return tau2_; }
  double mu(double s) const;
  bool is_zero() const { return zero_; }

  /// int |mu(s)| ds
  double mass() const { return mass_; }
  /// int s |mu(s)| ds
  double first_moment() const { return first_moment_; }
  double sup_abs() const { return sup_abs_; }

  std::span<const double> nodes() const { return rule_.nodes; }
  std::span<const double> weights() const { return rule_.weights; }
  std::span<const double> mu_at_nodes() const { return mu_nodes_; }
  std::string describe() const;
  const std::vector<double>& table_s() const { return table_s_; }
  const std::vector<double>& table_mu() const { return table_mu_; }
  const std::optional<Expression>& expression() const { return expr_; }

 private:
  void finalize();

  Kind kind_ = Kind::kConstant;
  double tau1_ = 0.0;
  double tau2_ = 1.0;
  double constant_ = 0.0;
  std::optional<Expression> expr_;
  std::vector<double> table_s_;
  std::vector<double> table_mu_;
  QuadratureRule rule_;
  std::vector<double> mu_nodes_;
  double mass_ = 0.0;
  double first_moment_ = 0.0;
  double sup_abs_ = 0.0;
  bool zero_ = true;
};

/// Velocity snapshots u_t(t_k), t_k = k dt, in a ring buffer of
/// ceil(tau2/dt) + 2 entries, plus the prehistory phi(x, r) = u_t(x, -r)
/// for r in [0, tau2]. Lookups interpolate linearly in time; this realizes
/// z(x, k, s, t) = u_t(x, t - k s) exactly for the transport reformulation.
class VelocityHistory {
 public:
  /// Fills `out` with phi(., r).
  using Prehistory = std::function<void(double r, std::span<double> out)>;

  VelocityHistory() = default;
  VelocityHistory(int n, double dt, double tau2, Prehistory prehistory);

  void push(std::span<const double> velocity);
  int field_size() const { return n_; }
  int capacity() const { return capacity_; }
  double dt() const { return dt_; }
  double tau2() const { return tau2_; }
  bool empty() const { return count_ == 0; }
  int latest_index() const { return static_cast<int>(count_) - 1; }
  double latest_time() const { return latest_index() * dt_; }
  int oldest_index() const;
  std::span<const double> snapshot(int k) const;

  /// Throws HistoryGapError outside the retained window and prehistory domain.
  void sample(double t_query, std::span<double> out) const;

 private:
  int n_ = 0;
  double dt_ = 0.0;
  double tau2_ = 0.0;
  int capacity_ = 0;
  std::size_t count_ = 0;
  std::vector<double> ring_;
  Prehistory prehistory_;
};

Field sample_velocity(const VelocityHistory& h, double t_query);

/// sum_q w_q mu(s_q) u_t(t - s_q)
Field delay_integral(const DelayKernel& k, const VelocityHistory& h, double t);
void delay_integral_into(const DelayKernel& k, const VelocityHistory& h, double t,
                         std::span<double> out);

/// Delay integral at t_new = latest_time + dt before the velocity at t_new is
/// known. Writes the part determined by recorded velocities into `known` and
/// returns c such that the full integral is known + c * u_t(t_new).
double delay_integral_pending(const DelayKernel& k, const VelocityHistory& h,
                              std::span<double> known);

/// mu_damp - int |mu|; positive when the damping dominates the delay.
double stability_margin(const DelayKernel& k, double mu_damp);

/// 1/2 int_Omega int_0^1 int s |mu(s)| [e^{-s k}] z^2 with z = u_t(t - k s),
/// tensor Gauss rule (16 points in k, delay nodes in s); h is the grid spacing.
double delay_energy(const DelayKernel& k, const VelocityHistory& hist, double t, bool weighted,
                    double h);

/// int_Omega int_0^1 int mu(s) z^2 (signed mu, no s factor, no 1/2).
double delay_plain_functional(const DelayKernel& k, const VelocityHistory& hist, double t,
                              double h);

}  // namespace viscowave
