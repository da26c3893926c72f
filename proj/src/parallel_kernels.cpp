#include "viscowave/parallel_kernels.hpp"

#include <algorithm>
#include <vector>

#include "viscowave/field.hpp"

#ifdef VISCOWAVE_HAVE_OPENMP
#include <omp.h>
#endif

namespace viscowave::kernels {

namespace {

void check_block(std::span<const double> rows, std::size_t n, std::size_t count) {
  if (rows.size() != n * count) {
    throw DimensionError("history block holds " + std::to_string(rows.size()) +
                         " values, expected " + std::to_string(n * count));
  }
}

double row_difference_energy(const double* row, std::span<const double> current,
                             std::span<const double> a) {
  const std::size_t n = current.size();
  double s = 0.0;
  double left = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = current[j] - row[j];
    s += a[j] * (d - left) * (d - left);
    left = d;
  }
  s += a[n] * left * left;
  return s;
}

// Column-block width for the OpenMP combination: each thread streams its
// columns of every row, so rows stay in the outer loop for vectorization.
constexpr std::size_t kColumnBlock = 64;

}  // namespace

bool openmp_available() {
#ifdef VISCOWAVE_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

Backend default_backend() { return openmp_available() ? Backend::kOpenMP : Backend::kSerial; }

std::string_view backend_name(Backend b) { return b == Backend::kSerial ? "serial" : "openmp"; }

namespace serial {

void history_combination(std::span<const double> rows, std::size_t n,
                         std::span<const double> weights, std::span<double> out) {
  check_block(rows, n, weights.size());
  require_same_size(out.size(), n, "history_combination");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const double* row = rows.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += w * row[j];
  }
}

double weighted_difference_energy(std::span<const double> rows, std::size_t n,
                                  std::span<const double> weights,
                                  std::span<const double> current,
                                  std::span<const double> interface_coeff, double h) {
  check_block(rows, n, weights.size());
  require_same_size(current.size(), n, "weighted_difference_energy");
  require_same_size(interface_coeff.size(), n + 1, "weighted_difference_energy");
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i] * row_difference_energy(rows.data() + i * n, current, interface_coeff);
  }
  return total / h;
}

void weighted_difference_sum(std::span<const double> rows, std::size_t n,
                             std::span<const double> weights, std::span<const double> current,
                             std::span<double> out) {
  check_block(rows, n, weights.size());
  require_same_size(current.size(), n, "weighted_difference_sum");
  require_same_size(out.size(), n, "weighted_difference_sum");
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const double* row = rows.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) out[j] += w * (current[j] - row[j]);
  }
}

}  // namespace serial

namespace omp {

void history_combination(std::span<const double> rows, std::size_t n,
                         std::span<const double> weights, std::span<double> out) {
  check_block(rows, n, weights.size());
  require_same_size(out.size(), n, "history_combination");
  const std::size_t m = weights.size();
  const long blocks = static_cast<long>((n + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const std::size_t j0 = static_cast<std::size_t>(b) * kColumnBlock;
    const std::size_t j1 = std::min(n, j0 + kColumnBlock);
    for (std::size_t j = j0; j < j1; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = weights[i];
      const double* row = rows.data() + i * n;
      for (std::size_t j = j0; j < j1; ++j) out[j] += w * row[j];
    }
  }
}

double weighted_difference_energy(std::span<const double> rows, std::size_t n,
                                  std::span<const double> weights,
                                  std::span<const double> current,
                                  std::span<const double> interface_coeff, double h) {
  check_block(rows, n, weights.size());
  require_same_size(current.size(), n, "weighted_difference_energy");
  require_same_size(interface_coeff.size(), n + 1, "weighted_difference_energy");
  const long m = static_cast<long>(weights.size());
  std::vector<double> partial(weights.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < m; ++i) {
    partial[i] = weights[i] * row_difference_energy(rows.data() + i * n, current, interface_coeff);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total / h;
}

void weighted_difference_sum(std::span<const double> rows, std::size_t n,
                             std::span<const double> weights, std::span<const double> current,
                             std::span<double> out) {
  check_block(rows, n, weights.size());
  require_same_size(current.size(), n, "weighted_difference_sum");
  require_same_size(out.size(), n, "weighted_difference_sum");
  const std::size_t m = weights.size();
  const long blocks = static_cast<long>((n + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for schedule(static)
  for (long b = 0; b < blocks; ++b) {
    const std::size_t j0 = static_cast<std::size_t>(b) * kColumnBlock;
    const std::size_t j1 = std::min(n, j0 + kColumnBlock);
    for (std::size_t j = j0; j < j1; ++j) out[j] = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double w = weights[i];
      const double* row = rows.data() + i * n;
      for (std::size_t j = j0; j < j1; ++j) out[j] += w * (current[j] - row[j]);
    }
  }
}

}  // namespace omp

void history_combination(Backend b, std::span<const double> rows, std::size_t n,
                         std::span<const double> weights, std::span<double> out) {
  if (b == Backend::kOpenMP) {
    omp::history_combination(rows, n, weights, out);
  } else {
    serial::history_combination(rows, n, weights, out);
  }
}

double weighted_difference_energy(Backend b, std::span<const double> rows, std::size_t n,
                                  std::span<const double> weights,
                                  std::span<const double> current,
                                  std::span<const double> interface_coeff, double h) {
  return b == Backend::kOpenMP
             ? omp::weighted_difference_energy(rows, n, weights, current, interface_coeff, h)
             : serial::weighted_difference_energy(rows, n, weights, current, interface_coeff, h);
}

void weighted_difference_sum(Backend b, std::span<const double> rows, std::size_t n,
                             std::span<const double> weights, std::span<const double> current,
                             std::span<double> out) {
  if (b == Backend::kOpenMP) {
    omp::weighted_difference_sum(rows, n, weights, current, out);
  } else {
    serial::weighted_difference_sum(rows, n, weights, current, out);
  }
}

}  // namespace viscowave::kernels
