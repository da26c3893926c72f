#include "viscowave/memory_kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

namespace viscowave {

namespace {

double log_power_integrand(double a, double nu, double y) { return a * std::exp(y - std::pow(y, nu)); }

double adaptive(auto f, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-13);
}

}  // namespace

std::string_view family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::kZero:
      return "zero";
    case KernelFamily::kExp:
      return "exp";
    case KernelFamily::kPoly:
      return "poly";
    case KernelFamily::kStretchedExp:
      return "stretched_exp";
    case KernelFamily::kLogPower:
      return "log_power";
  }
  return "unknown";
}

KernelFamily parse_family(std::string_view name) {
  if (name == "zero" || name == "none") return KernelFamily::kZero;
  if (name == "exp") return KernelFamily::kExp;
  if (name == "poly") return KernelFamily::kPoly;
  if (name == "stretched_exp") return KernelFamily::kStretchedExp;
  if (name == "log_power") return KernelFamily::kLogPower;
  throw Error("unknown kernel family '" + std::string(name) + "'");
}

double RelaxationKernel::value(double t) const {
  switch (family) {
    case KernelFamily::kZero:
      return 0.0;
    case KernelFamily::kExp:
      return a * std::exp(-b * t);
    case KernelFamily::kPoly:
      return a * std::pow(1.0 + t, -nu);
    case KernelFamily::kStretchedExp:
      return a * std::exp(-b * std::pow(1.0 + t, nu));
    case KernelFamily::kLogPower:
      return a * std::exp(-std::pow(std::log1p(t), nu));
  }
  return 0.0;
}

double RelaxationKernel::derivative(double t) const {
  switch (family) {
    case KernelFamily::kZero:
      return 0.0;
    case KernelFamily::kExp:
      return -b * value(t);
    case KernelFamily::kPoly:
      return -nu * a * std::pow(1.0 + t, -nu - 1.0);
    case KernelFamily::kStretchedExp:
      return -b * nu * std::pow(1.0 + t, nu - 1.0) * value(t);
    case KernelFamily::kLogPower: {
      const double l = std::log1p(t);
      const double dl = l > 0.0 ? nu * std::pow(l, nu - 1.0) / (1.0 + t) : 0.0;
      return -dl * value(t);
    }
  }
  return 0.0;
}

double RelaxationKernel::zeta(double t) const {
  switch (family) {
    case KernelFamily::kZero:
      throw Error("the zero kernel has no decay-rate function");
    case KernelFamily::kExp:
      return b;
    case KernelFamily::kPoly:
      return nu / (1.0 + t);
    case KernelFamily::kStretchedExp:
      return b * nu * std::pow(1.0 + t, std::min(0.0, nu - 1.0));
    case KernelFamily::kLogPower: {
      const double l = std::log1p(t);
      return l > 0.0 ? nu * std::pow(l, nu - 1.0) / (1.0 + t) : (nu == 1.0 ? 1.0 : 0.0);
    }
  }
  return 0.0;
}

double RelaxationKernel::zeta_integral(double t0, double t) const {
  switch (family) {
    case KernelFamily::kZero:
      throw Error("the zero kernel has no decay-rate function");
    case KernelFamily::kExp:
      return b * (t - t0);
    case KernelFamily::kPoly:
      return nu * (std::log1p(t) - std::log1p(t0));
    case KernelFamily::kStretchedExp:
      if (nu <= 1.0) return b * (std::pow(1.0 + t, nu) - std::pow(1.0 + t0, nu));
      return b * nu * (t - t0);
    case KernelFamily::kLogPower:
      return std::pow(std::log1p(t), nu) - std::pow(std::log1p(t0), nu);
  }
  return 0.0;
}

double RelaxationKernel::cumulative(double t) const {
  if (t <= 0.0) return 0.0;
  switch (family) {
    case KernelFamily::kZero:
      return 0.0;
    case KernelFamily::kExp:
      return a / b * -std::expm1(-b * t);
    case KernelFamily::kPoly:
      if (nu == 1.0) return a * std::log1p(t);
      return a * (1.0 - std::pow(1.0 + t, 1.0 - nu)) / (nu - 1.0);
    case KernelFamily::kStretchedExp:
      return adaptive([this](double s) { return value(s); }, 0.0, t);
    case KernelFamily::kLogPower: {
      const double aa = a;
      const double nn = nu;
      return adaptive([aa, nn](double y) { return log_power_integrand(aa, nn, y); }, 0.0,
                      std::log1p(t));
    }
  }
  return 0.0;
}

double RelaxationKernel::tail_mass() const {
  switch (family) {
    case KernelFamily::kZero:
      return 0.0;
    case KernelFamily::kExp:
      if (b <= 0.0) throw Error("tail mass infinite; violates (A0): exp kernel needs b > 0");
      return a / b;
    case KernelFamily::kPoly:
      if (nu <= 1.0) throw Error("tail mass infinite; violates (A0): poly kernel needs nu > 1");
      return a / (nu - 1.0);
    case KernelFamily::kStretchedExp: {
      if (b <= 0.0 || nu <= 0.0) {
        throw Error("tail mass infinite; violates (A0): stretched_exp needs b, nu > 0");
      }
      boost::math::quadrature::exp_sinh<double> integrator;
      const double bb = b;
      const double nn = nu;
      return a * integrator.integrate(
                     [bb, nn](double s) { return std::exp(-bb * std::pow(1.0 + s, nn)); }, 1e-12);
    }
    case KernelFamily::kLogPower: {
      if (nu <= 1.0) throw Error("tail mass infinite; violates (A0): log_power needs nu > 1");
      boost::math::quadrature::exp_sinh<double> integrator;
      const double nn = nu;
      return a * integrator.integrate([nn](double y) { return log_power_integrand(1.0, nn, y); },
                                      1e-12);
    }
  }
  return 0.0;
}

std::string RelaxationKernel::describe() const {
  std::ostringstream os;
  os << family_name(family) << "(a=" << a;
  if (family == KernelFamily::kExp || family == KernelFamily::kStretchedExp) os << ", b=" << b;
  if (family != KernelFamily::kExp && family != KernelFamily::kZero) os << ", nu=" << nu;
  os << ")";
  return os.str();
}

double kernel_eval(const RelaxationKernel& k, double t) {
  if (t < 0.0) throw Error("kernel evaluated at negative time");
  return k.value(t);
}

double zeta_eval(const RelaxationKernel& k, double t) {
  if (t < 0.0) throw Error("zeta evaluated at negative time");
  return k.zeta(t);
}

double tail_mass(const RelaxationKernel& k) { return k.tail_mass(); }

// ---------------------------------------------------------------------------

FieldHistory::FieldHistory(int n, double dt, std::size_t reserve_steps) : n_(n), dt_(dt) {
  if (n <= 0) throw DimensionError("history field size must be positive");
  if (!(dt > 0.0)) throw Error("history spacing must be positive");
  data_.reserve(reserve_steps * static_cast<std::size_t>(n));
}

void FieldHistory::push(std::span<const double> snapshot) {
  require_same_size(snapshot.size(), static_cast<std::size_t>(n_), "FieldHistory::push");
  data_.insert(data_.end(), snapshot.begin(), snapshot.end());
  ++count_;
}

std::span<const double> FieldHistory::snapshot(int k) const {
  if (k < 0 || k >= size()) throw HistoryGapError("history has no snapshot " + std::to_string(k));
  return {data_.data() + static_cast<std::size_t>(k) * n_, static_cast<std::size_t>(n_)};
}

std::span<const double> FieldHistory::rows(int first, int count) const {
  if (first < 0 || count < 0 || first + count > size()) {
    throw HistoryGapError("history row range out of bounds");
  }
  return {data_.data() + static_cast<std::size_t>(first) * n_,
          static_cast<std::size_t>(count) * n_};
}

int FieldHistory::index_of(double t) const {
  const double k = t / dt_;
  const double r = std::round(k);
  if (std::fabs(k - r) > 1e-6 || r < 0.0) {
    throw HistoryGapError("time " + std::to_string(t) + " is not on the history grid");
  }
  if (r > latest_index()) {
    throw HistoryGapError("history does not reach t=" + std::to_string(t));
  }
  return static_cast<int>(r);
}

// ---------------------------------------------------------------------------

MemoryConvolver::MemoryConvolver(RelaxationKernel kernel, double dt, double g_floor_rel,
                                 kernels::Backend backend)
    : kernel_(kernel), dt_(dt), backend_(backend) {
  if (kernel_.is_zero()) {
    truncation_lag_ = -1;
    return;
  }
  floor_ = g_floor_rel * std::fabs(kernel_.value(0.0));
  // All families are monotone decreasing: bracket, then bisect for the first lag below floor.
  constexpr int kMaxLag = std::numeric_limits<int>::max() / 4;
  int hi = 1;
  while (hi < kMaxLag && std::fabs(kernel_.value(hi * dt_)) >= floor_) hi *= 2;
  if (hi >= kMaxLag) {
    truncation_lag_ = kMaxLag;
    return;
  }
  int lo = hi / 2;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (std::fabs(kernel_.value(mid * dt_)) >= floor_) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  truncation_lag_ = lo;
}

double MemoryConvolver::lag_value(int m) const {
  if (m >= static_cast<int>(lag_cache_.size())) {
    const int old = static_cast<int>(lag_cache_.size());
    const int grow = std::max(m + 1, 2 * old);
    lag_cache_.resize(grow);
    for (int i = old; i < grow; ++i) lag_cache_[i] = kernel_.value(i * dt_);
  }
  return lag_cache_[m];
}

int MemoryConvolver::prepare(int t_index, std::vector<double>& weights) const {
  const int max_lag = std::min(t_index, truncation_lag_);
  weights.resize(max_lag + 1);
  const int first = t_index - max_lag;
  lag_value(max_lag);
  for (int k = first; k <= t_index; ++k) {
    const int m = t_index - k;
    const double end = (k == 0 || k == t_index) ? 0.5 : 1.0;
    weights[k - first] = end * dt_ * lag_cache_[m];
  }
  return first;
}

void MemoryConvolver::memory_term(const FieldHistory& hist, const DiscreteOperator& op,
                                  int t_index, std::span<double> out) const {
  require_same_size(out.size(), static_cast<std::size_t>(hist.field_size()), "memory_term");
  if (t_index > hist.latest_index()) throw HistoryGapError("memory_term: history too short");
  if (kernel_.is_zero() || t_index == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::vector<double> weights;
  const int first = prepare(t_index, weights);
  Field combo(out.size());
  kernels::history_combination(backend_, hist.rows(first, static_cast<int>(weights.size())),
                               out.size(), weights, combo);
  apply_into(op, combo, out);
}

double MemoryConvolver::g_circ(const FieldHistory& hist, const DiscreteOperator& op,
                               int t_index) const {
  if (t_index > hist.latest_index()) throw HistoryGapError("g_circ: history too short");
  if (kernel_.is_zero() || t_index == 0) return 0.0;
  std::vector<double> weights;
  const int first = prepare(t_index, weights);
  const auto n = static_cast<std::size_t>(hist.field_size());
  return kernels::weighted_difference_energy(
      backend_, hist.rows(first, static_cast<int>(weights.size())), n, weights,
      hist.snapshot(t_index), op.interface_coefficients(), op.spacing());
}

void MemoryConvolver::history_difference(const FieldHistory& hist, int t_index,
                                         std::span<double> out) const {
  require_same_size(out.size(), static_cast<std::size_t>(hist.field_size()),
                    "history_difference");
  if (t_index > hist.latest_index()) throw HistoryGapError("history_difference: history too short");
  if (kernel_.is_zero() || t_index == 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  std::vector<double> weights;
  const int first = prepare(t_index, weights);
  kernels::weighted_difference_sum(backend_, hist.rows(first, static_cast<int>(weights.size())),
                                   out.size(), weights, hist.snapshot(t_index), out);
}

Field memory_term(const RelaxationKernel& k, const FieldHistory& hist, const DiscreteOperator& op,
                  double t, double g_floor_rel) {
  const int idx = hist.index_of(t);
  MemoryConvolver conv(k, hist.dt(), g_floor_rel);
  Field out(hist.field_size());
  conv.memory_term(hist, op, idx, out);
  return out;
}

double g_circ(const RelaxationKernel& k, const FieldHistory& hist, const DiscreteOperator& op,
              double t, double g_floor_rel) {
  const int idx = hist.index_of(t);
  MemoryConvolver conv(k, hist.dt(), g_floor_rel);
  return conv.g_circ(hist, op, idx);
}

}  // namespace viscowave
