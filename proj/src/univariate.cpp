#include "levilab/univariate.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace levilab {

std::vector<double> exp_derivatives(double x, int order) {
  return std::vector<double>(order + 1, std::exp(x));
}

std::vector<double> log_derivatives(double x, int order) {
  if (!(x > 0.0)) throw std::domain_error("log of non-positive value");
  std::vector<double> d(order + 1);
  d[0] = std::log(x);
  double fact = 1.0;  // (k-1)!
  for (int k = 1; k <= order; ++k) {
    if (k > 1) fact *= (k - 1);
    d[k] = ((k % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(x, k);
  }
  return d;
}

std::vector<double> power_derivatives(double x, double p, int order) {
  const bool integral = std::floor(p) == p;
  if (x < 0.0 && !integral) throw std::domain_error("non-integer power of negative value");
  if (x == 0.0 && p < order && !(integral && p >= 0)) {
    throw std::domain_error("power not differentiable at zero");
  }
  std::vector<double> d(order + 1);
  double coef = 1.0;
  for (int k = 0; k <= order; ++k) {
    const double e = p - k;
    d[k] = (coef == 0.0) ? 0.0 : coef * std::pow(x, e);
    coef *= e;
  }
  return d;
}

RealJet sin(const RealJet& j) {
  std::vector<double> d(j.order() + 1);
  const double s = std::sin(j.value()), c = std::cos(j.value());
  const double cycle[4] = {s, c, -s, -c};
  for (int k = 0; k <= j.order(); ++k) d[k] = cycle[k % 4];
  return j.compose(d);
}

RealJet cos(const RealJet& j) {
  std::vector<double> d(j.order() + 1);
  const double s = std::sin(j.value()), c = std::cos(j.value());
  const double cycle[4] = {c, -s, -c, s};
  for (int k = 0; k <= j.order(); ++k) d[k] = cycle[k % 4];
  return j.compose(d);
}

namespace {

class Exp final : public UnivariateFunction {
 public:
  std::vector<double> derivatives(double x, int order) const override {
    return exp_derivatives(x, order);
  }
  std::string name() const override { return "exp"; }
};

class Log final : public UnivariateFunction {
 public:
  std::vector<double> derivatives(double x, int order) const override {
    return log_derivatives(x, order);
  }
  std::string name() const override { return "log"; }
};

class Power final : public UnivariateFunction {
 public:
  explicit Power(double p) : p_(p) {}
  std::vector<double> derivatives(double x, int order) const override {
    return power_derivatives(x, p_, order);
  }
  std::string name() const override {
    std::ostringstream os;
    os.precision(17);
    os << "pow[" << p_ << "]";
    return os.str();
  }

 private:
  double p_;
};

class Sin final : public UnivariateFunction {
 public:
  std::vector<double> derivatives(double x, int order) const override {
    return derivatives_via_jet([](const RealJet& t) { return levilab::sin(t); }, x, order);
  }
  std::string name() const override { return "sin"; }
};

class Cos final : public UnivariateFunction {
 public:
  std::vector<double> derivatives(double x, int order) const override {
    return derivatives_via_jet([](const RealJet& t) { return levilab::cos(t); }, x, order);
  }
  std::string name() const override { return "cos"; }
};

class Bump final : public UnivariateFunction {
 public:
  std::vector<double> derivatives(double v, int order) const override {
    if (v >= 1.0 - 5e-3) return std::vector<double>(order + 1, 0.0);
    return derivatives_via_jet(
        [](const RealJet& t) {
          RealJet one_minus = -t + 1.0;
          return exp(-reciprocal(one_minus) + 1.0);
        },
        v, order);
  }
  std::string name() const override { return "bump"; }
};

class PartitionNormalizer final : public UnivariateFunction {
 public:
  explicit PartitionNormalizer(double theta) : theta_(theta) {}
  std::vector<double> derivatives(double s, int order) const override {
    if (s >= theta_) return power_derivatives(s, -1.0, order);
    if (s <= theta_ / 2) {
      std::vector<double> d(order + 1, 0.0);
      d[0] = 1.0 / theta_;
      return d;
    }
    const double theta = theta_;
    return derivatives_via_jet(
        [theta](const RealJet& x) {
          RealJet t = (x + (-theta / 2)) * (2.0 / theta);
          RealJet w = t.compose(smooth_step_derivatives(t.value(), t.order()));
          RealJet phi = x * w + (-w + 1.0) * theta;
          return reciprocal(phi);
        },
        s, order);
  }
  std::string name() const override {
    std::ostringstream os;
    os.precision(17);
    os << "unit_normalizer[" << theta_ << "]";
    return os.str();
  }

 private:
  double theta_;
};

}  // namespace

std::vector<double> smooth_step_derivatives(double t, int order) {
  std::vector<double> d(order + 1, 0.0);
  // exp(-1/t) and all its derivatives are below 1e-60 outside this band.
  if (t <= 5e-3) return d;
  if (t >= 1.0 - 5e-3) {
    d[0] = 1.0;
    return d;
  }
  return derivatives_via_jet(
      [](const RealJet& x) {
        RealJet a = exp(-reciprocal(x));
        RealJet b = exp(-reciprocal(-x + 1.0));
        return a * reciprocal(a + b);
      },
      t, order);
}

UnivariatePtr exp_function() { return std::make_shared<Exp>(); }
UnivariatePtr log_function() { return std::make_shared<Log>(); }
UnivariatePtr power_function(double p) { return std::make_shared<Power>(p); }
UnivariatePtr sin_function() { return std::make_shared<Sin>(); }
UnivariatePtr cos_function() { return std::make_shared<Cos>(); }
UnivariatePtr bump_profile() { return std::make_shared<Bump>(); }
UnivariatePtr partition_normalizer(double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("partition_normalizer: theta must be positive");
  return std::make_shared<PartitionNormalizer>(theta);
}

}  // namespace levilab
