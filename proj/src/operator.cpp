#include "viscowave/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace viscowave {

double inner(std::span<const double> a, std::span<const double> b, double h) {
  require_same_size(a.size(), b.size(), "inner");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return h * s;
}

double norm_sq(std::span<const double> a, double h) { return inner(a, a, h); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> GridSpec::nodes() const {
  std::vector<double> x(n_interior);
  for (int j = 0; j < n_interior; ++j) x[j] = node(j);
  return x;
}

std::vector<double> GridSpec::interfaces() const {
  std::vector<double> x(n_interior + 1);
  for (int j = 0; j <= n_interior; ++j) x[j] = interface(j);
  return x;
}

double CoefficientField::coercivity() const {
  if (samples.empty()) return 0.0;
  return *std::min_element(samples.begin(), samples.end());
}

double CoefficientField::max_value() const {
  if (samples.empty()) return 0.0;
  return *std::max_element(samples.begin(), samples.end());
}

DiscreteOperator::DiscreteOperator(std::vector<double> interface_coeff, double h)
    : coeff_(std::move(interface_coeff)), h_(h) {
  const int n = static_cast<int>(coeff_.size()) - 1;
  if (n < 1) throw DimensionError("operator needs at least one interior node");
  const double inv_h2 = 1.0 / (h * h);
  diag_.resize(n);
  off_.resize(n > 0 ? n - 1 : 0);
  for (int j = 0; j < n; ++j) diag_[j] = (coeff_[j] + coeff_[j + 1]) * inv_h2;
  for (int j = 0; j + 1 < n; ++j) off_[j] = -coeff_[j + 1] * inv_h2;
  a0_ = *std::min_element(coeff_.begin(), coeff_.end());
}

DiscreteOperator assemble(const GridSpec& grid, const CoefficientField& coeff) {
  if (static_cast<int>(coeff.samples.size()) != grid.n_interior + 1) {
    throw DimensionError("coefficient field has " + std::to_string(coeff.samples.size()) +
                         " interface samples, grid needs " +
                         std::to_string(grid.n_interior + 1));
  }
  return DiscreteOperator(coeff.samples, grid.spacing());
}

void apply_into(const DiscreteOperator& op, std::span<const double> u, std::span<double> out) {
  const int n = op.size();
  require_same_size(u.size(), static_cast<std::size_t>(n), "apply");
  require_same_size(out.size(), static_cast<std::size_t>(n), "apply");
  if (n == 1) {
    out[0] = op.diag(0) * u[0];
    return;
  }
  out[0] = op.diag(0) * u[0] + op.upper(0) * u[1];
  for (int j = 1; j + 1 < n; ++j) {
    out[j] = op.lower(j) * u[j - 1] + op.diag(j) * u[j] + op.upper(j) * u[j + 1];
  }
  out[n - 1] = op.lower(n - 1) * u[n - 2] + op.diag(n - 1) * u[n - 1];
}

Field apply(const DiscreteOperator& op, std::span<const double> u) {
  Field out(u.size());
  apply_into(op, u, out);
  return out;
}

double quadratic_form(const DiscreteOperator& op, std::span<const double> u,
                      std::span<const double> w) {
  const int n = op.size();
  require_same_size(u.size(), static_cast<std::size_t>(n), "quadratic_form");
  require_same_size(w.size(), static_cast<std::size_t>(n), "quadratic_form");
  const auto a = op.interface_coefficients();
  double s = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double ul = j == 0 ? 0.0 : u[j - 1];
    const double ur = j == n ? 0.0 : u[j];
    const double wl = j == 0 ? 0.0 : w[j - 1];
    const double wr = j == n ? 0.0 : w[j];
    s += a[j] * (ur - ul) * (wr - wl);
  }
  return s / op.spacing();
}

double gradient_norm_sq(std::span<const double> u, double h) {
  const std::size_t n = u.size();
  double s = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    const double l = j == 0 ? 0.0 : u[j - 1];
    const double r = j == n ? 0.0 : u[j];
    s += (r - l) * (r - l);
  }
  return s / h;
}

double discrete_first_eigenvalue(const GridSpec& grid) {
  const double h = grid.spacing();
  const double len = grid.x_hi - grid.x_lo;
  return (2.0 - 2.0 * std::cos(std::numbers::pi * h / len)) / (h * h);
}

}  // namespace viscowave
