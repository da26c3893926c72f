#include "viscowave/delay_line.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

namespace viscowave {

namespace {

template <unsigned N>
QuadratureRule mapped_rule(double lo, double hi) {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  QuadratureRule r;
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  // boost stores the nonnegative half of the symmetric rule
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    r.nodes.push_back(mid - half * x[i]);
    r.weights.push_back(half * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(mid + half * x[i]);
    r.weights.push_back(half * w[i]);
  }
  return r;
}

double interpolate_table(const std::vector<double>& s, const std::vector<double>& mu, double x) {
  if (x <= s.front()) return mu.front();
  if (x >= s.back()) return mu.back();
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - s.begin()) - 1;
  const double th = (x - s[i]) / (s[i + 1] - s[i]);
  return (1.0 - th) * mu[i] + th * mu[i + 1];
}

const QuadratureRule& k_rule() {
  static const QuadratureRule rule = gauss_legendre(16, 0.0, 1.0);
  return rule;
}

template <class Weight>
double delay_quadratic(const DelayKernel& k, const VelocityHistory& hist, double t, double h,
                       Weight weight) {
  if (k.is_zero()) return 0.0;
  const auto& kr = k_rule();
  const auto s = k.nodes();
  const auto ws = k.weights();
  const auto mu = k.mu_at_nodes();
  Field z(hist.field_size());
  double total = 0.0;
  for (std::size_t q = 0; q < s.size(); ++q) {
    if (mu[q] == 0.0) continue;
    for (std::size_t i = 0; i < kr.nodes.size(); ++i) {
      const double kk = kr.nodes[i];
      hist.sample(t - kk * s[q], z);
      total += ws[q] * kr.weights[i] * weight(s[q], kk, mu[q]) * norm_sq(z, h);
    }
  }
  return total;
}

}  // namespace

QuadratureRule gauss_legendre(int points, double lo, double hi) {
  switch (points) {
    case 16:
      return mapped_rule<16>(lo, hi);
    case 32:
      return mapped_rule<32>(lo, hi);
    default:
      throw Error("gauss_legendre: supported sizes are 16 and 32");
  }
}

DelayKernel DelayKernel::constant(double mu, double tau1, double tau2) {
  DelayKernel k;
  k.kind_ = Kind::kConstant;
  k.constant_ = mu;
  k.tau1_ = tau1;
  k.tau2_ = tau2;
  k.expr_.reset();
  k.finalize();
  return k;
}

DelayKernel DelayKernel::from_expression(Expression mu, double tau1, double tau2) {
  if (mu.is_constant()) {
    const double v = mu.variables().empty() ? mu(std::span<const double>{}) : mu(0.0);
    return constant(v, tau1, tau2);
  }
  DelayKernel k;
  k.kind_ = Kind::kExpression;
  k.expr_ = std::move(mu);
  k.tau1_ = tau1;
  k.tau2_ = tau2;
  k.finalize();
  return k;
}

DelayKernel DelayKernel::from_table(std::vector<double> s, std::vector<double> mu) {
  if (s.size() < 2 || s.size() != mu.size()) {
    throw Error("delay table needs at least two (s, mu) rows of matching length");
  }
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw Error("delay table abscissae must be strictly increasing");
  }
  DelayKernel k;
  k.kind_ = Kind::kTable;
  k.tau1_ = s.front();
  k.tau2_ = s.back();
  k.table_s_ = std::move(s);
  k.table_mu_ = std::move(mu);
  k.expr_.reset();
  k.finalize();
  return k;
}

DelayKernel DelayKernel::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open delay table '" + path.string() + "'");
  std::vector<double> s;
  std::vector<double> mu;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0;
    double b = 0.0;
    if (!(ls >> a)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || s.empty()) continue;
      throw Error(path.string() + ":" + std::to_string(line_no) + ": non-numeric row");
    }
    if (!(ls >> b)) {
      throw Error(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    s.push_back(a);
    mu.push_back(b);
  }
  return from_table(std::move(s), std::move(mu));
}

double DelayKernel::mu(double s) const {
  switch (kind_) {
    case Kind::kConstant:
      return constant_;
    case Kind::kExpression:
      return (*expr_)(s);
    case Kind::kTable:
      return interpolate_table(table_s_, table_mu_, s);
  }
  return 0.0;
}

void DelayKernel::finalize() {
  mu_nodes_.clear();
  if (kind_ == Kind::kTable) {
    rule_ = {};
    const std::size_t m = table_s_.size();
    for (std::size_t i = 0; i < m; ++i) {
      const double left = i > 0 ? table_s_[i] - table_s_[i - 1] : 0.0;
      const double right = i + 1 < m ? table_s_[i + 1] - table_s_[i] : 0.0;
      rule_.nodes.push_back(table_s_[i]);
      rule_.weights.push_back(0.5 * (left + right));
    }
  } else {
    rule_ = gauss_legendre(32, tau1_, tau2_);
  }
  for (double s : rule_.nodes) mu_nodes_.push_back(mu(s));

  zero_ = std::all_of(mu_nodes_.begin(), mu_nodes_.end(), [](double v) { return v == 0.0; });
  sup_abs_ = 0.0;
  for (double v : mu_nodes_) sup_abs_ = std::max(sup_abs_, std::fabs(v));

  switch (kind_) {
    case Kind::kConstant:
      mass_ = std::fabs(constant_) * (tau2_ - tau1_);
      first_moment_ = std::fabs(constant_) * 0.5 * (tau2_ * tau2_ - tau1_ * tau1_);
      break;
    case Kind::kExpression: {
      using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
      if (tau2_ > tau1_) {
        mass_ = GK::integrate([this](double s) { return std::fabs(mu(s)); }, tau1_, tau2_, 15,
                              1e-12);
        first_moment_ = GK::integrate([this](double s) { return s * std::fabs(mu(s)); }, tau1_,
                                      tau2_, 15, 1e-12);
      } else {
        mass_ = first_moment_ = 0.0;
      }
      break;
    }
    case Kind::kTable:
      mass_ = first_moment_ = 0.0;
      for (std::size_t i = 0; i < rule_.nodes.size(); ++i) {
        mass_ += rule_.weights[i] * std::fabs(mu_nodes_[i]);
        first_moment_ += rule_.weights[i] * rule_.nodes[i] * std::fabs(mu_nodes_[i]);
      }
      break;
  }
}

std::string DelayKernel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kConstant:
      os << "constant(" << constant_ << ")";
      break;
    case Kind::kExpression:
      os << "expr(" << expr_->text() << ")";
      break;
    case Kind::kTable:
      os << "table(" << table_s_.size() << " rows)";
      break;
  }
  os << " on [" << tau1_ << ", " << tau2_ << "]";
  return os.str();
}

// ---------------------------------------------------------------------------

VelocityHistory::VelocityHistory(int n, double dt, double tau2, Prehistory prehistory)
    : n_(n), dt_(dt), tau2_(tau2), prehistory_(std::move(prehistory)) {
  if (n <= 0) throw DimensionError("velocity history field size must be positive");
  if (!(dt > 0.0)) throw Error("velocity history spacing must be positive");
  capacity_ = static_cast<int>(std::ceil(std::max(tau2, 0.0) / dt - 1e-9)) + 2;
  ring_.assign(static_cast<std::size_t>(capacity_) * n, 0.0);
}

void VelocityHistory::push(std::span<const double> velocity) {
  require_same_size(velocity.size(), static_cast<std::size_t>(n_), "VelocityHistory::push");
  const std::size_t slot = count_ % static_cast<std::size_t>(capacity_);
  std::copy(velocity.begin(), velocity.end(), ring_.begin() + slot * n_);
  ++count_;
}

int VelocityHistory::oldest_index() const {
  return std::max(0, static_cast<int>(count_) - capacity_);
}

std::span<const double> VelocityHistory::snapshot(int k) const {
  if (k < oldest_index() || k > latest_index()) {
    throw HistoryGapError("velocity snapshot " + std::to_string(k) + " is outside the window [" +
                          std::to_string(oldest_index()) + ", " +
                          std::to_string(latest_index()) + "]");
  }
  const std::size_t slot = static_cast<std::size_t>(k) % static_cast<std::size_t>(capacity_);
  return {ring_.data() + slot * n_, static_cast<std::size_t>(n_)};
}

void VelocityHistory::sample(double t_query, std::span<double> out) const {
  require_same_size(out.size(), static_cast<std::size_t>(n_), "sample_velocity");
  const double tol = 1e-9 * dt_;
  if (t_query < -tol || (empty() && t_query <= tol)) {
    const double r = std::max(0.0, -t_query);
    if (r > tau2_ * (1.0 + 1e-12) + tol) {
      throw HistoryGapError("velocity query at t=" + std::to_string(t_query) +
                            " precedes the prehistory window (tau2=" + std::to_string(tau2_) +
                            ")");
    }
    if (!prehistory_) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    prehistory_(r, out);
    return;
  }
  if (empty() || t_query > latest_time() + tol) {
    throw HistoryGapError("velocity query at t=" + std::to_string(t_query) +
                          " is beyond the recorded history");
  }
  const double pos = std::max(0.0, t_query / dt_);
  int k = static_cast<int>(std::floor(pos));
  double theta = pos - k;
  if (theta > 1.0 - 1e-9) {
    ++k;
    theta = 0.0;
  }
  if (k < oldest_index()) {
    throw HistoryGapError("velocity query at t=" + std::to_string(t_query) +
                          " exceeds the retained window");
  }
  if (k >= latest_index() || theta < 1e-9) {
    const auto snap = snapshot(std::min(k, latest_index()));
    std::copy(snap.begin(), snap.end(), out.begin());
    return;
  }
  const auto lo = snapshot(k);
  const auto hi = snapshot(k + 1);
  for (int j = 0; j < n_; ++j) out[j] = (1.0 - theta) * lo[j] + theta * hi[j];
}

Field sample_velocity(const VelocityHistory& h, double t_query) {
  Field out(h.field_size());
  h.sample(t_query, out);
  return out;
}

void delay_integral_into(const DelayKernel& k, const VelocityHistory& h, double t,
                         std::span<double> out) {
  require_same_size(out.size(), static_cast<std::size_t>(h.field_size()), "delay_integral");
  std::fill(out.begin(), out.end(), 0.0);
  if (k.is_zero()) return;
  const auto s = k.nodes();
  const auto w = k.weights();
  const auto mu = k.mu_at_nodes();
  Field z(out.size());
  for (std::size_t q = 0; q < s.size(); ++q) {
    const double c = w[q] * mu[q];
    if (c == 0.0) continue;
    h.sample(t - s[q], z);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += c * z[j];
  }
}

Field delay_integral(const DelayKernel& k, const VelocityHistory& h, double t) {
  Field out(h.field_size());
  delay_integral_into(k, h, t, out);
  return out;
}

double delay_integral_pending(const DelayKernel& k, const VelocityHistory& h,
                              std::span<double> known) {
  require_same_size(known.size(), static_cast<std::size_t>(h.field_size()),
                    "delay_integral_pending");
  std::fill(known.begin(), known.end(), 0.0);
  if (k.is_zero()) return 0.0;
  const double dt = h.dt();
  const double t_now = h.empty() ? -dt : h.latest_time();
  const double t_new = t_now + dt;
  const auto s = k.nodes();
  const auto w = k.weights();
  const auto mu = k.mu_at_nodes();
  Field z(known.size());
  double coef = 0.0;
  for (std::size_t q = 0; q < s.size(); ++q) {
    const double c = w[q] * mu[q];
    if (c == 0.0) continue;
    const double tq = t_new - s[q];
    if (tq > t_now + 1e-9 * dt && !h.empty()) {
      const double theta = (tq - t_now) / dt;
      const auto latest = h.snapshot(h.latest_index());
      for (std::size_t j = 0; j < known.size(); ++j) known[j] += c * (1.0 - theta) * latest[j];
      coef += c * theta;
      continue;
    }
    h.sample(tq, z);
    for (std::size_t j = 0; j < known.size(); ++j) known[j] += c * z[j];
  }
  return coef;
}

double stability_margin(const DelayKernel& k, double mu_damp) { return mu_damp - k.mass(); }

double delay_energy(const DelayKernel& k, const VelocityHistory& hist, double t, bool weighted,
                    double h) {
  const double e = delay_quadratic(k, hist, t, h, [weighted](double s, double kk, double mu) {
    const double base = s * std::fabs(mu);
    return weighted ? base * std::exp(-s * kk) : base;
  });
  return 0.5 * e;
}

double delay_plain_functional(const DelayKernel& k, const VelocityHistory& hist, double t,
                              double h) {
  return delay_quadratic(k, hist, t, h, [](double, double, double mu) { return mu; });
}

}  // namespace viscowave
