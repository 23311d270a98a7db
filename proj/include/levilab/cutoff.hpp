#pragma once

#include "levilab/univariate.hpp"

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace levilab {

class CutoffConstructionError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class InfeasibleCutoffError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// chi_m = exp(L(ln x)) with L' = lambda a smooth clamped slope: lambda rises
/// from 0 to kappa on [0, a], stays at kappa, falls to 0 on [m - a, m];
/// kappa = m/(m - a) so that L(m) = m. Bounds are verified on construction.
class ChiProfile {
 public:
  static constexpr double kRamp = 0.6;
  static constexpr int kGridPoints = 10000;

  /// Cached per m; throws CutoffConstructionError if a bound fails on the grid.
  static const ChiProfile& get(double m);
  explicit ChiProfile(double m);

  double m() const { return m_; }
  /// L(u) and its derivatives through `order`.
  std::vector<double> log_derivatives(double u, int order) const;
  double chi(double x) const;
  double chi_prime(double x) const;
  double chi_second(double x) const;

  struct GridBounds {
    double max_x_over_chi;
    double max_chi_prime;
    double max_x_chi_second;
  };
  GridBounds grid_bounds() const { return bounds_; }

 private:
  double L(double u) const;
  std::vector<double> slope_derivatives(double u, int order) const;

  double m_, a_, kappa_;
  GridBounds bounds_{};
};

double chi_m(double x, double m);

/// g_{m,tau}(x) = 1 - L(ln x - ln tau)/m; equals 1 for x <= tau (including
/// x <= 0) and 0 for x >= tau e^m. tau enters as ln tau.
std::vector<double> g_m_tau_derivatives(double x, double m, double log_tau, int order);
double g_m_tau(double x, double m, double log_tau);
UnivariatePtr g_m_tau_function(double m, double log_tau);

struct CutoffParams {
  double m = 3.0;
  double log_tau = 0.0;
  double delta = 1.0;
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  double nu1 = 0.0, nu2 = 0.0;
  /// Lower bound on sigma where 2 zeta H_sigma(T,T) < -delta/4 |T|^2; tau e^m must stay below it.
  double nu3 = 0.0;

  double tau() const;

  struct Check {
    std::string name;
    double lhs;
    double rhs;
    bool ok;
  };
  std::vector<Check> checks() const;
  bool valid() const;
};

/// m = max(3, 64 c1 / delta); tau the largest value meeting every invariant
/// (closed form per constraint, then halving on rounding failures), times a
/// safety factor 1/2. Infinite nu values disable their constraint.
CutoffParams choose_m_tau(double delta, double c1, double c2, double c3, double nu1, double nu2,
                          double nu3 = std::numeric_limits<double>::infinity());

}  // namespace levilab
