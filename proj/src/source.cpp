#include "viscowave/source.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <random>

namespace viscowave {

namespace {

// b |x|^{(p-3)/2} |y|^{(p+1)/2} x, with the product taken as 0 whenever x or y is 0
double cross_term(double b, double p, double x, double y) {
  if (x == 0.0 || y == 0.0) return 0.0;
  return b * std::pow(std::fabs(x), 0.5 * (p - 3.0)) * std::pow(std::fabs(y), 0.5 * (p + 1.0)) * x;
}

double sum_term(double a, double p, double u, double v) {
  const double s = u + v;
  if (s == 0.0) return 0.0;
  return a * std::pow(std::fabs(s), p - 1.0) * s;
}

}  // namespace

double f1(const SourceParams& sp, double u, double v) {
  if (!sp.enabled) return 0.0;
  return sum_term(sp.a, sp.p, u, v) + cross_term(sp.b, sp.p, u, v);
}

double f2(const SourceParams& sp, double u, double v) {
  if (!sp.enabled) return 0.0;
  return sum_term(sp.a, sp.p, u, v) + cross_term(sp.b, sp.p, v, u);
}

double potential_F(const SourceParams& sp, double u, double v) {
  if (!sp.enabled) return 0.0;
  const double q = sp.p + 1.0;
  return (sp.a * std::pow(std::fabs(u + v), q) + 2.0 * sp.b * std::pow(std::fabs(u * v), 0.5 * q)) /
         q;
}

double check_euler_identity(const SourceParams& sp_sources, const SourceParams& sp_potential,
                            std::span<const SamplePoint> samples) {
  if (samples.empty()) throw Error("check_euler_identity: no samples");
  double worst = 0.0;
  for (const auto& s : samples) {
    const double lhs = s.u * f1(sp_sources, s.u, s.v) + s.v * f2(sp_sources, s.u, s.v);
    const double rhs = (sp_potential.p + 1.0) * potential_F(sp_potential, s.u, s.v);
    worst = std::max(worst, std::fabs(lhs - rhs) / (1.0 + std::fabs(rhs)));
  }
  return worst;
}

double check_euler_identity(const SourceParams& sp, std::span<const SamplePoint> samples) {
  return check_euler_identity(sp, sp, samples);
}

GradientCheck check_gradient(const SourceParams& sp, std::span<const SamplePoint> samples) {
  GradientCheck out;
  for (const auto& s : samples) {
    if (std::fabs(s.u) < 1e-3 || std::fabs(s.v) < 1e-3) {
      ++out.excluded;
      continue;
    }
    const double step = 1e-6 * std::max({1.0, std::fabs(s.u), std::fabs(s.v)});
    const double dFdu =
        (potential_F(sp, s.u + step, s.v) - potential_F(sp, s.u - step, s.v)) / (2.0 * step);
    const double dFdv =
        (potential_F(sp, s.u, s.v + step) - potential_F(sp, s.u, s.v - step)) / (2.0 * step);
    const double g1 = f1(sp, s.u, s.v);
    const double g2 = f2(sp, s.u, s.v);
    // relative to the local gradient magnitude; guards samples where one
    // component of the gradient passes through zero
    const double scale = std::max({std::fabs(g1), std::fabs(g2), 1e-300});
    out.max_residual = std::max(out.max_residual, std::fabs(g1 - dFdu) / scale);
    out.max_residual = std::max(out.max_residual, std::fabs(g2 - dFdv) / scale);
    ++out.checked;
  }
  return out;
}

void source_field_into(const SourceParams& sp, std::span<const double> u,
                       std::span<const double> v, std::span<double> out_u,
                       std::span<double> out_v) {
  require_same_size(u.size(), v.size(), "source_field");
  require_same_size(out_u.size(), u.size(), "source_field");
  require_same_size(out_v.size(), u.size(), "source_field");
  if (!sp.enabled) {
    std::fill(out_u.begin(), out_u.end(), 0.0);
    std::fill(out_v.begin(), out_v.end(), 0.0);
    return;
  }
  for (std::size_t j = 0; j < u.size(); ++j) {
    out_u[j] = f1(sp, u[j], v[j]);
    out_v[j] = f2(sp, u[j], v[j]);
  }
}

std::pair<Field, Field> source_field(const SourceParams& sp, std::span<const double> u,
                                     std::span<const double> v) {
  Field fu(u.size());
  Field fv(u.size());
  source_field_into(sp, u, v, fu, fv);
  return {std::move(fu), std::move(fv)};
}

double potential_integral(const SourceParams& sp, std::span<const double> u,
                          std::span<const double> v, double h) {
  require_same_size(u.size(), v.size(), "potential_integral");
  if (!sp.enabled) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += potential_F(sp, u[j], v[j]);
  return h * s;
}

SandwichConstants sandwich_constants(const SourceParams& sp, int angles) {
  const double q = sp.p + 1.0;
  auto ratio = [&](double th) {
    const double u = std::cos(th);
    const double v = std::sin(th);
    return potential_F(sp, u, v) / (std::pow(std::fabs(u), q) + std::pow(std::fabs(v), q));
  };
  const double step = 2.0 * std::numbers::pi / angles;
  int i_min = 0;
  int i_max = 0;
  std::vector<double> r(angles);
  for (int i = 0; i < angles; ++i) {
    r[i] = ratio(step * i);
    if (r[i] < r[i_min]) i_min = i;
    if (r[i] > r[i_max]) i_max = i;
  }
  // polish the extremes between neighbouring sweep angles
  using boost::math::tools::brent_find_minima;
  const auto lo = brent_find_minima(ratio, step * (i_min - 1), step * (i_min + 1), 52);
  const auto hi = brent_find_minima([&](double th) { return -ratio(th); }, step * (i_max - 1),
                                    step * (i_max + 1), 52);
  return {std::min(r[i_min], lo.second), std::max(r[i_max], -hi.second)};
}

std::vector<SamplePoint> random_samples(int count, double range, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-range, range);
  std::vector<SamplePoint> out(count);
  for (auto& s : out) {
    s.u = dist(rng);
    s.v = dist(rng);
  }
  return out;
}

}  // namespace viscowave
