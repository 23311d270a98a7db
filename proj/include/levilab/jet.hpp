#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace levilab {

/// Graded monomial basis for truncated Taylor polynomials in `num_vars`
/// variables up to total degree `order`. Monomials of degree <= k always
/// occupy the first `size(k)` slots, so truncation is a prefix copy.
class MonomialBasis {
 public:
  struct Product {
    std::int32_t lhs, rhs, out;
  };
  struct DerivativeEntry {
    std::int32_t source;
    double factor;
  };

  static std::shared_ptr<const MonomialBasis> get(int num_vars, int order);

  MonomialBasis(int num_vars, int order);

  int num_vars() const { return num_vars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  int size_up_to(int degree) const { return degree_end_[degree]; }
  int degree(int index) const { return degrees_[index]; }
  std::span<const std::uint8_t> exponent(int index) const {
    return {exponents_flat_.data() + static_cast<std::size_t>(index) * num_vars_,
            static_cast<std::size_t>(num_vars_)};
  }
  /// -1 when the exponent is outside the basis.
  int index_of(std::span<const int> exponent) const;

  const std::vector<Product>& products() const { return products_; }
  /// For var a: entry i gives the coefficient source in this basis of the
  /// i-th monomial of the order-1 basis after differentiating in a.
  const std::vector<DerivativeEntry>& derivative_table(int var) const { return derivative_[var]; }

 private:
  int num_vars_;
  int order_;
  std::vector<std::vector<int>> exponents_;
  std::vector<std::uint8_t> exponents_flat_;
  std::vector<int> degrees_;
  std::vector<int> degree_end_;
  std::vector<int> lookup_;
  std::vector<Product> products_;
  std::vector<std::vector<DerivativeEntry>> derivative_;
};

/// Truncated multivariate Taylor polynomial: f(x0 + h) = sum_e c_e h^e.
/// Arithmetic is exact up to the basis order, so nested compositions give
/// exact partial derivatives (forward mode of arbitrary order).
template <typename Scalar>
class Jet {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Jet() = default;
  explicit Jet(std::shared_ptr<const MonomialBasis> basis)
      : basis_(std::move(basis)), c_(Coefficients::Zero(basis_->size())) {}

  static Jet constant(std::shared_ptr<const MonomialBasis> basis, Scalar value) {
    Jet j(std::move(basis));
    j.c_[0] = value;
    return j;
  }
  static Jet variable(std::shared_ptr<const MonomialBasis> basis, int var, Scalar value) {
    Jet j(std::move(basis));
    j.c_[0] = value;
    if (j.basis_->order() >= 1) j.c_[1 + var] = Scalar(1);
    return j;
  }

  const std::shared_ptr<const MonomialBasis>& basis() const { return basis_; }
  int order() const { return basis_->order(); }
  int num_vars() const { return basis_->num_vars(); }
  int size() const { return static_cast<int>(c_.size()); }
  Scalar value() const { return c_[0]; }
  const Scalar& operator[](int i) const { return c_[i]; }
  Scalar& operator[](int i) { return c_[i]; }
  const Coefficients& coefficients() const { return c_; }

  /// Partial derivative d^e f / dx^e at the expansion point.
  Scalar partial(std::span<const int> exponent) const {
    const int idx = basis_->index_of(exponent);
    if (idx < 0) throw std::out_of_range("partial: multi-index exceeds jet order");
    double fact = 1.0;
    for (int e : exponent)
      for (int k = 2; k <= e; ++k) fact *= k;
    return c_[idx] * fact;
  }

  Jet& operator+=(const Jet& o) {
    c_ += o.c_;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    c_ -= o.c_;
    return *this;
  }
  Jet& operator*=(Scalar s) {
    c_ *= s;
    return *this;
  }
  Jet& operator+=(Scalar s) {
    c_[0] += s;
    return *this;
  }
  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, Scalar s) { return a *= s; }
  friend Jet operator*(Scalar s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, Scalar s) { return a += s; }
  friend Jet operator-(Jet a) { return a *= Scalar(-1); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out(a.basis_);
    for (const auto& p : a.basis_->products()) out.c_[p.out] += a.c_[p.lhs] * b.c_[p.rhs];
    return out;
  }

  /// d/dx_var, one order lower.
  Jet derivative(int var) const {
    Jet out(MonomialBasis::get(num_vars(), order() - 1));
    const auto& table = basis_->derivative_table(var);
    for (int i = 0; i < out.size(); ++i) out.c_[i] = c_[table[i].source] * table[i].factor;
    return out;
  }

  Jet truncated(int new_order) const {
    if (new_order == order()) return *this;
    Jet out(MonomialBasis::get(num_vars(), new_order));
    out.c_ = c_.head(out.size());
    return out;
  }

  /// f(this) given f^(k)(value()) for k = 0..order.
  Jet compose(std::span<const Scalar> derivs) const {
    Jet out = constant(basis_, derivs[0]);
    Jet u = *this;
    u.c_[0] = Scalar(0);
    Jet power = u;
    double fact = 1.0;
    for (int k = 1; k <= order(); ++k) {
      fact *= k;
      out.c_ += power.c_ * (derivs[k] / fact);
      if (k < order()) power = power * u;
    }
    return out;
  }

  template <typename Other>
  Jet<Other> cast() const {
    Jet<Other> out(basis_);
    for (int i = 0; i < size(); ++i) out[i] = Other(c_[i]);
    return out;
  }

 private:
  std::shared_ptr<const MonomialBasis> basis_;
  Coefficients c_;
};

using RealJet = Jet<double>;
using ComplexJet = Jet<std::complex<double>>;

inline RealJet real_part(const ComplexJet& j) {
  RealJet out(j.basis());
  for (int i = 0; i < j.size(); ++i) out[i] = j[i].real();
  return out;
}

inline ComplexJet conj(const ComplexJet& j) {
  ComplexJet out = j;
  for (int i = 0; i < j.size(); ++i) out[i] = std::conj(j[i]);
  return out;
}

}  // namespace levilab
