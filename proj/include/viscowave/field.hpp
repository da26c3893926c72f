#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace viscowave {

/// Nodal values at the interior grid points; Dirichlet endpoints are implicit zeros.
using Field = std::vector<double>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a history lookup falls outside what was recorded.
class HistoryGapError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": length mismatch (" + std::to_string(a) +
                         " vs " + std::to_string(b) + ")");
  }
}

// h-weighted discrete L2 quantities
double inner(std::span<const double> a, std::span<const double> b, double h);
double norm_sq(std::span<const double> a, double h);
double max_abs(std::span<const double> a);

}  // namespace viscowave
