#pragma once

#include "levilab/jet.hpp"

#include <memory>
#include <string>
#include <vector>

namespace levilab {

/// Smooth real function of one real variable with derivative access of any
/// order. `derivatives(x, k)` returns f(x), f'(x), ..., f^(k)(x).
class UnivariateFunction {
 public:
  virtual ~UnivariateFunction() = default;
  virtual std::vector<double> derivatives(double x, int order) const = 0;
  virtual std::string name() const = 0;
  double operator()(double x) const { return derivatives(x, 0)[0]; }
};

using UnivariatePtr = std::shared_ptr<const UnivariateFunction>;

std::vector<double> exp_derivatives(double x, int order);
std::vector<double> log_derivatives(double x, int order);
std::vector<double> power_derivatives(double x, double p, int order);

inline RealJet exp(const RealJet& j) { return j.compose(exp_derivatives(j.value(), j.order())); }
inline RealJet log(const RealJet& j) { return j.compose(log_derivatives(j.value(), j.order())); }
inline RealJet pow(const RealJet& j, double p) {
  return j.compose(power_derivatives(j.value(), p, j.order()));
}
inline RealJet reciprocal(const RealJet& j) { return pow(j, -1.0); }
RealJet sin(const RealJet& j);
RealJet cos(const RealJet& j);

/// Derivatives of a function written as a RealJet -> RealJet map.
template <typename F>
std::vector<double> derivatives_via_jet(F&& f, double x, int order) {
  auto basis = MonomialBasis::get(1, order);
  RealJet y = f(RealJet::variable(basis, 0, x));
  std::vector<double> out(order + 1);
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    out[k] = y[k] * fact;
  }
  return out;
}

UnivariatePtr exp_function();
UnivariatePtr log_function();
UnivariatePtr power_function(double p);
UnivariatePtr sin_function();
UnivariatePtr cos_function();

/// C-infinity step: 0 for t <= 0, 1 for t >= 1, S(t) + S(1-t) = 1.
std::vector<double> smooth_step_derivatives(double t, int order);

/// exp(1 - 1/(1-v)) for v < 1, zero beyond; the radial bump profile in v = t^2.
UnivariatePtr bump_profile();

/// s -> 1/Phi(s) where Phi(s) = s for s >= theta, theta for s <= theta/2 and
/// Phi >= s in between. Normalizes bumps into a partition of unity on
/// {sum >= theta} without ever amplifying their sum above one.
UnivariatePtr partition_normalizer(double theta);

}  // namespace levilab
