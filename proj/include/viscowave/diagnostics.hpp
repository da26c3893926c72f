#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viscowave/config.hpp"
#include "viscowave/integrator.hpp"
#include "viscowave/memory_kernel.hpp"

namespace viscowave {

struct EnergyReport {
  double t = 0.0;
  double kinetic_u = 0.0;  // 1/2 |u_t|^2
  double kinetic_v = 0.0;
  double elastic_u = 0.0;  // 1/2 (1 - int_0^t g1) a1(u, u)
  double elastic_v = 0.0;
  double memory_u = 0.0;  // 1/2 (g1 o u)
  double memory_v = 0.0;
  double delay_u = 0.0;  // 1/2 int int int s |mu2| z1^2
  double delay_v = 0.0;
  double potential = 0.0;  // int F(u, v)
  double total = 0.0;
};

EnergyReport energy(const SimState& state);

/// int int int mu z^2 (signed, no s) + (p+1) int F + (1 - int g) a(u,u) + (g o u), both fields.
double stability_functional_I(const SimState& state);

/// Energy minus the kinetic part; its delay terms carry the same s|mu| weight
/// as the energy, so E = 1/2 |u_t|^2 + 1/2 |v_t|^2 + J holds term by term.
double functional_J(const SimState& state);

/// J with the delay terms 1/2 int int int mu z^2 (signed, no s factor).
double functional_J_unweighted(const SimState& state);

/// |E - 1/2 |u_t|^2 - 1/2 |v_t|^2 - J|
double identity_residual(const SimState& state);

/// rho (2(p+1)/(p-1) E0)^{(p-1)/2}. Throws for p <= 1, E0 < 0 or rho <= 0.
double alpha_condition(double p, double E0, double rho);
double alpha_condition(const ProblemSpec& spec, double E0, double rho);

struct LyapunovParts {
  double L = 0.0;
  double psi = 0.0;  // int (u u_t + v v_t)
  double phi = 0.0;  // -int u_t int g1(t - s)(u(t) - u(s)) ds - (v analog)
  double I_d = 0.0;  // int int int s e^{-s k} |mu| z^2, both fields
};

/// L = M E + eps psi + phi + eps I_d
LyapunovParts lyapunov_L(const SimState& state, const LyapunovConfig& cfg);

/// Everything emitted per diagnostic sample.
struct DiagnosticRow {
  EnergyReport e;
  double I = 0.0;
  double J = 0.0;
  double psi = 0.0;
  double phi = 0.0;
  double I_d = 0.0;
  double L = 0.0;
};

DiagnosticRow diagnostic_row(const SimState& state, const LyapunovConfig& cfg);
std::string csv_header();
/// 17 significant digits, fixed column order matching csv_header().
std::string csv_line(const DiagnosticRow& row);

struct MonotonicityResult {
  bool passed = true;
  std::vector<int> increases;  // k such that E[k+1] > E[k] + tol
  double max_increase = 0.0;   // largest E[k+1] - E[k]
};

/// Flags E[k+1] > E[k] + tol_abs + tol_rel * E[0]. Throws for fewer than two samples.
MonotonicityResult monotonicity_check(std::span<const double> energies, double tol_rel = 1e-8,
                                      double tol_abs = 0.0);
MonotonicityResult monotonicity_check(std::span<const EnergyReport> series, double tol_rel = 1e-8,
                                      double tol_abs = 0.0);

struct FitOptions {
  std::optional<double> t0;   // default: first sample after max(tau2, 5% of the final time)
  double tau2 = 0.0;
  double floor_rel = 1e-14;  // E_floor = floor_rel * E(first sample)
  int min_samples = 32;
};

struct DecayFit {
  KernelFamily family = KernelFamily::kExp;
  double K = 0.0;
  double alpha = 0.0;
  double residual = 0.0;   // RMS of the log-domain residual
  double log_range = 0.0;  // max log E - min log E over the window
  double natural_slope = 0.0;  // slope of log E against the family's natural coordinate
  double t0 = 0.0;
  double t_end = 0.0;
  int samples = 0;
  bool no_decay = false;
};

/// Least squares of log E against X(t) = int_{t0}^t zeta: log E = log K - alpha X.
/// The natural coordinate is t (exp), ln(1+t) (poly), (1+t)^{min(1,nu)} (stretched_exp)
/// and (ln(1+t))^nu (log_power). Throws Error when too few samples lie above the floor.
DecayFit fit_decay(std::span<const double> times, std::span<const double> energies,
                   const RelaxationKernel& kernel, const FitOptions& opt = {});

struct EquivalenceResult {
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  int samples = 0;
  bool passed = false;  // 0 < ratio_min <= ratio_max < inf
};

/// min and max of L/E over the rows with E above floor_rel * E(first row).
/// Throws Error when no row qualifies.
EquivalenceResult equivalence_check(std::span<const DiagnosticRow> rows, double floor_rel = 1e-14);

}  // namespace viscowave
