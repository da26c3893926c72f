#pragma once

#include <span>
#include <vector>

#include "viscowave/field.hpp"

namespace viscowave {

/// Uniform 1D grid on [x_lo, x_hi] with homogeneous Dirichlet endpoints.
struct GridSpec {
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_interior = 128;

  double spacing() const { return (x_hi - x_lo) / (n_interior + 1); }
  /// Interior node j = 0..n-1 sits at x_lo + (j+1)h.
  double node(int j) const { return x_lo + (j + 1) * spacing(); }
  /// Interface j = 0..n sits between nodes j-1 and j (nodes -1 and n are the walls).
  double interface(int j) const { return x_lo + (j + 0.5) * spacing(); }
  std::vector<double> nodes() const;
  std::vector<double> interfaces() const;
};

/// Scalar diffusion coefficient sampled at the n+1 cell interfaces.
/// In one dimension this is the whole content of the symmetric matrix A(x).
struct CoefficientField {
  std::vector<double> samples;

  double coercivity() const;  // min sample
  double max_value() const;
};

/// Symmetric tridiagonal discretization of L u = -(a u')' with Dirichlet walls.
class DiscreteOperator {
 public:
  DiscreteOperator() = default;
  DiscreteOperator(std::vector<double> interface_coeff, double h);

  int size() const { return static_cast<int>(diag_.size()); }
  double spacing() const { return h_; }
  double coercivity() const { return a0_; }

  /// Row j: lower(j) u_{j-1} + diag(j) u_j + upper(j) u_{j+1}.
  double diag(int j) const { return diag_[j]; }
  double lower(int j) const { return j == 0 ? 0.0 : off_[j - 1]; }
  double upper(int j) const { return j + 1 == size() ? 0.0 : off_[j]; }
  std::span<const double> interface_coefficients() const { return coeff_; }

 private:
  std::vector<double> coeff_;  // n+1 interface values
  std::vector<double> diag_;
  std::vector<double> off_;  // n-1 super/sub diagonal entries
  double h_ = 0.0;
  double a0_ = 0.0;
};

/// Throws DimensionError when the sample count is not n_interior + 1.
DiscreteOperator assemble(const GridSpec& grid, const CoefficientField& coeff);

/// L u with zero ghost values.
Field apply(const DiscreteOperator& op, std::span<const double> u);
void apply_into(const DiscreteOperator& op, std::span<const double> u, std::span<double> out);

/// Discrete a(u, w) = sum over interfaces of a_{j+1/2} (u_{j+1}-u_j)(w_{j+1}-w_j) / h,
/// which equals h * <L u, w>.
double quadratic_form(const DiscreteOperator& op, std::span<const double> u,
                      std::span<const double> w);

/// sum_j h ((u_{j+1} - u_j)/h)^2 including the wall differences.
double gradient_norm_sq(std::span<const double> u, double h);

/// Smallest Dirichlet eigenvalue of the unit-coefficient stencil: (2 - 2cos(pi h/len)) / h^2.
double discrete_first_eigenvalue(const GridSpec& grid);

}  // namespace viscowave
