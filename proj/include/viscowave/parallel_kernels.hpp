#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace viscowave::kernels {

// Data-parallel inner loops of the integrator and diagnostics. Each kernel has
// a serial reference and an OpenMP version; both produce bitwise-identical
// results (parallel reductions write per-row partials that are summed in order).
//
// `rows` is a row-major block of `weights.size()` snapshots of length `n`.

enum class Backend { kSerial, kOpenMP };

Backend default_backend();
std::string_view backend_name(Backend b);
bool openmp_available();

namespace serial {

/// out[j] = sum_i weights[i] * rows[i][j]
void history_combination(std::span<const double> rows, std::size_t n,
                         std::span<const double> weights, std::span<double> out);

/// sum_i weights[i] * a(current - rows[i], current - rows[i]) for the
/// interface-coefficient form a(.,.) on spacing h.
double weighted_difference_energy(std::span<const double> rows, std::size_t n,
                                  std::span<const double> weights,
                                  std::span<const double> current,
                                  std::span<const double> interface_coeff, double h);

/// out[j] = sum_i weights[i] * (current[j] - rows[i][j])
void weighted_difference_sum(std::span<const double> rows, std::size_t n,
                             std::span<const double> weights, std::span<const double> current,
                             std::span<double> out);

}  // namespace serial

namespace omp {

void history_combination(std::span<const double> rows, std::size_t n,
                         std::span<const double> weights, std::span<double> out);
double weighted_difference_energy(std::span<const double> rows, std::size_t n,
                                  std::span<const double> weights,
                                  std::span<const double> current,
                                  std::span<const double> interface_coeff, double h);
void weighted_difference_sum(std::span<const double> rows, std::size_t n,
                             std::span<const double> weights, std::span<const double> current,
                             std::span<double> out);

}  // namespace omp

void history_combination(Backend b, std::span<const double> rows, std::size_t n,
                         std::span<const double> weights, std::span<double> out);
double weighted_difference_energy(Backend b, std::span<const double> rows, std::size_t n,
                                  std::span<const double> weights,
                                  std::span<const double> current,
                                  std::span<const double> interface_coeff, double h);
void weighted_difference_sum(Backend b, std::span<const double> rows, std::size_t n,
                             std::span<const double> weights, std::span<const double> current,
                             std::span<double> out);

}  // namespace viscowave::kernels
