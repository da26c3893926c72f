#pragma once

#include <functional>
#include <string>
#include <vector>

#include "viscowave/config.hpp"

namespace viscowave {

/// One separable component w(x, t) = X(x) T(t). `LX` is the continuous
/// operator -(a X')' for the spec's coefficient, supplied in closed form.
struct SeparableField {
  std::function<double(double)> X, LX;
  std::function<double(double)> T, dT, d2T;

  double value(double x, double t) const { return X(x) * T(t); }
};

struct ManufacturedSolution {
  std::string name;
  SeparableField u, v;

  /// u* = sin(pi x) sin(t), v* = 0.5 sin(2 pi x) sin(t) for a unit coefficient on [0, 1].
  static ManufacturedSolution sine_sine();
  /// u* = v* = 0.
  static ManufacturedSolution zero();
};

struct MmsLevel {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  double error = 0.0;  // discrete L2 error at T, both fields
};

struct MmsResult {
  std::vector<MmsLevel> levels;
  double observed_order = 0.0;  // least-squares slope of log error against log h
  double min_pair_order = 0.0;  // smallest order between consecutive levels
};

/// Solves the system with the residual forcing that makes (u*, v*) exact and
/// reports the error at `T` on each grid of the ladder. The delay and memory
/// settings, damping, sources and CFL factor come from `base`; dt follows the
/// CFL rule on every level.
MmsResult mms_run(const ProblemSpec& base, const ManufacturedSolution& sol,
                  const std::vector<int>& ladder, double T);

}  // namespace viscowave
