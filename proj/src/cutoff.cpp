#include "levilab/cutoff.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace levilab {

namespace {

double step_value(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kNodes[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                              0.7966664774136267,  0.9602898564975363};
constexpr double kWeights[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                0.2223810344533745, 0.1012285362903763};

// I(t) = int_0^t S; I(1) = 1/2 by the symmetry S(t) + S(1-t) = 1.
double step_integral(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 0.5 + (t - 1.0);
  constexpr int kPanels = 32;
  const double h = t / kPanels;
  double acc = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int q = 0; q < 8; ++q) acc += kWeights[q] * step_value(mid + 0.5 * h * kNodes[q]);
  }
  return 0.5 * h * acc;
}

}  // namespace

const ChiProfile& ChiProfile::get(double m) {
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<ChiProfile>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<ChiProfile>(m);
  return *slot;
}

ChiProfile::ChiProfile(double m) : m_(m), a_(kRamp), kappa_(m / (m - kRamp)) {
  if (!(m > 2.0)) throw std::invalid_argument("chi_m: m must exceed 2");
  bounds_ = {0.0, 0.0, -std::numeric_limits<double>::infinity()};
  double prev_l = 0.0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double u = m * i / (kGridPoints - 1);
    const double l = L(u);
    const auto d = slope_derivatives(u, 1);
    const double e = std::exp(l - u);
    bounds_.max_x_over_chi = std::max(bounds_.max_x_over_chi, 1.0 / e);
    bounds_.max_chi_prime = std::max(bounds_.max_chi_prime, e * d[0]);
    bounds_.max_x_chi_second =
        std::max(bounds_.max_x_chi_second, e * (d[0] * d[0] - d[0] + d[1]));
    if (l < prev_l - 1e-12) throw CutoffConstructionError("chi_m: profile is not increasing");
    prev_l = l;
  }
  constexpr double slack = 1.0 + 1e-12;
  if (bounds_.max_x_over_chi > 2.0 * slack || bounds_.max_chi_prime > 2.0 * slack ||
      bounds_.max_x_chi_second > 4.0 * slack) {
    throw CutoffConstructionError("chi_m: bound violated on the verification grid");
  }
}

double ChiProfile::L(double u) const {
  if (u <= 0.0) return 0.0;
  if (u < a_) return kappa_ * a_ * step_integral(u / a_);
  if (u <= m_ - a_) return kappa_ * (a_ / 2 + u - a_);
  if (u < m_) {
    const double t = (u - m_ + a_) / a_;
    return kappa_ * (a_ / 2 + m_ - 2 * a_ + a_ * (t - step_integral(t)));
  }
  return m_;
}

std::vector<double> ChiProfile::slope_derivatives(double u, int order) const {
  std::vector<double> d(order + 1, 0.0);
  if (u <= 0.0 || u >= m_) return d;
  if (u < a_) {
    const auto s = smooth_step_derivatives(u / a_, order);
    double scale = kappa_;
    for (int k = 0; k <= order; ++k, scale /= a_) d[k] = scale * s[k];
    return d;
  }
  if (u <= m_ - a_) {
    d[0] = kappa_;
    return d;
  }
  const auto s = smooth_step_derivatives((u - m_ + a_) / a_, order);
  double scale = kappa_;
  for (int k = 0; k <= order; ++k, scale /= a_) d[k] = (k == 0 ? kappa_ : 0.0) - scale * s[k];
  return d;
}

std::vector<double> ChiProfile::log_derivatives(double u, int order) const {
  std::vector<double> d(order + 1, 0.0);
  d[0] = L(u);
  if (order >= 1) {
    const auto s = slope_derivatives(u, order - 1);
    for (int k = 1; k <= order; ++k) d[k] = s[k - 1];
  }
  return d;
}

double ChiProfile::chi(double x) const {
  if (x <= 1.0) return 1.0;
  const double u = std::log(x);
  if (u >= m_) return std::exp(m_);
  return std::exp(L(u));
}

double ChiProfile::chi_prime(double x) const {
  if (x <= 1.0) return 0.0;
  const double u = std::log(x);
  return chi(x) * slope_derivatives(u, 0)[0] / x;
}

double ChiProfile::chi_second(double x) const {
  if (x <= 1.0) return 0.0;
  const double u = std::log(x);
  const auto d = slope_derivatives(u, 1);
  return chi(x) * (d[0] * d[0] - d[0] + d[1]) / (x * x);
}

double chi_m(double x, double m) { return ChiProfile::get(m).chi(x); }

std::vector<double> g_m_tau_derivatives(double x, double m, double log_tau, int order) {
  std::vector<double> d(order + 1, 0.0);
  if (x <= 0.0 || std::log(x) <= log_tau) {
    d[0] = 1.0;
    return d;
  }
  if (std::log(x) - log_tau >= m) return d;
  const ChiProfile& profile = ChiProfile::get(m);
  return derivatives_via_jet(
      [&](const RealJet& xj) {
        RealJet u = levilab::log(xj) + (-log_tau);
        RealJet l = u.compose(profile.log_derivatives(u.value(), u.order()));
        return l * (-1.0 / m) + 1.0;
      },
      x, order);
}

double g_m_tau(double x, double m, double log_tau) {
  return g_m_tau_derivatives(x, m, log_tau, 0)[0];
}

namespace {

class GCutoff final : public UnivariateFunction {
 public:
  GCutoff(double m, double log_tau) : m_(m), log_tau_(log_tau) { ChiProfile::get(m); }
  std::vector<double> derivatives(double x, int order) const override {
    return g_m_tau_derivatives(x, m_, log_tau_, order);
  }
  std::string name() const override {
    char buf[96];
    std::snprintf(buf, sizeof buf, "g[m=%.6g,ln_tau=%.6g]", m_, log_tau_);
    return buf;
  }

 private:
  double m_, log_tau_;
};

}  // namespace

UnivariatePtr g_m_tau_function(double m, double log_tau) {
  return std::make_shared<GCutoff>(m, log_tau);
}

double CutoffParams::tau() const { return std::exp(log_tau); }

std::vector<CutoffParams::Check> CutoffParams::checks() const {
  const double tau_v = tau();
  const double a = std::exp(log_tau + m);  // tau e^m
  constexpr double slack = 1.0 + 1e-12;
  std::vector<Check> out;
  auto add = [&](std::string name, double lhs, double rhs) {
    out.push_back({std::move(name), lhs, rhs, lhs <= rhs * slack});
  };
  add("tau*e^m <= delta", a, delta);
  add("c2*tau + sqrt(c1*tau) <= delta", c2 * tau_v + std::sqrt(c1 * tau_v), delta);
  add("c2*tau*e^m + 2*sqrt(c1*tau*e^m) <= delta", c2 * a + 2 * std::sqrt(c1 * a), delta);
  add("c3*tau*e^m <= delta/4", c3 * a, delta / 4);
  add("4*c2*sqrt(c1*tau*e^m) <= delta/4", 4 * c2 * std::sqrt(c1 * a), delta / 4);
  add("16*c1/m <= delta/4", 16 * c1 / m, delta / 4);
  // Compared in the log domain: tau may be far below the smallest normal double.
  add("ln tau <= ln min(nu1, nu2/2)", log_tau, std::log(std::min(nu1, nu2 / 2)));
  add("ln(tau*e^m) <= ln nu3", log_tau + m, std::log(nu3));
  for (auto& c : out) {
    if (c.name.rfind("ln ", 0) == 0) c.ok = c.lhs <= c.rhs + 1e-12 * std::max(1.0, std::abs(c.rhs));
  }
  return out;
}

bool CutoffParams::valid() const {
  if (!(m > 2.0) || !(delta > 0.0) || !std::isfinite(log_tau)) return false;
  for (const auto& c : checks())
    if (!c.ok) return false;
  return true;
}

CutoffParams choose_m_tau(double delta, double c1, double c2, double c3, double nu1, double nu2,
                          double nu3) {
  if (!(delta > 0.0)) throw std::invalid_argument("choose_m_tau: delta must be positive");
  if (c1 < 0 || c2 < 0 || c3 < 0 || !(nu1 > 0) || !(nu2 > 0) || !(nu3 > 0)) {
    throw std::invalid_argument("choose_m_tau: constants must be positive");
  }
  CutoffParams p;
  p.delta = delta;
  p.c1 = c1;
  p.c2 = c2;
  p.c3 = c3;
  p.nu1 = nu1;
  p.nu2 = nu2;
  p.nu3 = nu3;
  p.m = std::max(3.0, 64.0 * c1 / delta);

  // Largest tau e^m allowed by each constraint.
  double a_max = std::min(delta, nu3);
  if (c3 > 0) a_max = std::min(a_max, delta / (4 * c3));
  if (c2 > 0 && c1 > 0) a_max = std::min(a_max, std::pow(delta / (16 * c2), 2) / c1);
  {
    const double s = delta / (std::sqrt(c1) + std::sqrt(c1 + c2 * delta));
    if (std::isfinite(s)) a_max = std::min(a_max, s * s);
  }
  double log_tau = std::log(a_max) - p.m;
  {
    const double s = 2 * delta / (std::sqrt(c1) + std::sqrt(c1 + 4 * c2 * delta));
    if (std::isfinite(s)) log_tau = std::min(log_tau, 2 * std::log(s));
  }
  log_tau = std::min({log_tau, std::log(nu1), std::log(nu2 / 2)});

  p.log_tau = log_tau;
  for (int it = 0; it < 200 && !p.valid(); ++it) p.log_tau -= std::numbers::ln2;
  p.log_tau -= std::numbers::ln2;  // safety factor for sampled extrema
  if (!p.valid() || p.log_tau < std::log(1e-300)) {
    throw InfeasibleCutoffError("choose_m_tau: no feasible tau above 1e-300");
  }
  return p;
}

}  // namespace levilab
