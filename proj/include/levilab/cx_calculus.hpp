#pragma once

#include "levilab/jet.hpp"
#include "levilab/univariate.hpp"

#include <Eigen/Core>

#include <complex>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace levilab {

using cplx = std::complex<double>;
/// Point of C^n; coordinate j is x_j + i y_j.
using CPoint = Eigen::VectorXcd;
/// A (1,0) direction.
using CVector = Eigen::VectorXcd;
/// Complex Hessian (d^2 f / dz_j dzbar_k)_{jk}; Hermitian.
using HermitianForm = Eigen::MatrixXcd;

/// Real embedding (x_1, y_1, ..., x_n, y_n).
Eigen::VectorXd to_real(const CPoint& z);
CPoint from_real(const Eigen::VectorXd& x);

class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, int index) : std::runtime_error(what), index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class JetEvaluator;

/// Smooth real function on C^n with exact Taylor coefficients of any order.
/// Represented as an immutable expression DAG; copies share nodes.
class ScalarField {
 public:
  class Node {
   public:
    explicit Node(int dim) : dim_(dim) {}
    virtual ~Node() = default;
    int dimension() const { return dim_; }
    virtual RealJet evaluate(JetEvaluator& ev, int order) const = 0;
    virtual std::string describe() const = 0;

   private:
    int dim_;
  };
  using NodePtr = std::shared_ptr<const Node>;

  ScalarField() = default;
  explicit ScalarField(NodePtr node) : node_(std::move(node)) {}

  bool empty() const { return !node_; }
  int dimension() const { return node_->dimension(); }
  const NodePtr& node() const { return node_; }
  std::string descriptor() const { return node_->describe(); }
  /// Same field, reported under `name`.
  ScalarField named(std::string name) const;

  double value(const CPoint& z) const;
  double operator()(const CPoint& z) const { return value(z); }
  /// Taylor jet at z in the 2n real coordinates, exact through `order`.
  RealJet jet(const CPoint& z, int order) const;
  /// d^e f / dx^e for a real multi-index e of total order <= 3.
  double partial(const CPoint& z, std::span<const int> exponent) const;

  static ScalarField constant(int n, double c);
  /// Real coordinate 2j -> x_j, 2j+1 -> y_j.
  static ScalarField real_coordinate(int n, int index);
  static ScalarField re(int n, int j) { return real_coordinate(n, 2 * j); }
  static ScalarField im(int n, int j) { return real_coordinate(n, 2 * j + 1); }
  /// |z_j|^2.
  static ScalarField abs2(int n, int j);
  /// |z - c|^2.
  static ScalarField distance2(const CPoint& c);

  /// sum_alpha H_rho(W^alpha, W^alpha) where W^alpha(z) is the constant
  /// W0^alpha projected onto the complex tangent space of the level set of
  /// rho through z. Defined where d rho != 0.
  static ScalarField projected_levi_sum(const ScalarField& rho, std::vector<CVector> w0);

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator+(const ScalarField& a, double c);
  friend ScalarField operator+(double c, const ScalarField& a) { return a + c; }
  friend ScalarField operator-(const ScalarField& a, double c) { return a + (-c); }
  friend ScalarField operator-(double c, const ScalarField& a);
  friend ScalarField operator*(const ScalarField& a, double c);
  friend ScalarField operator*(double c, const ScalarField& a) { return a * c; }
  friend ScalarField operator-(const ScalarField& a) { return a * -1.0; }

 private:
  NodePtr node_;
};

ScalarField compose(UnivariatePtr f, const ScalarField& x);
ScalarField exp(const ScalarField& x);
ScalarField log(const ScalarField& x);
ScalarField pow(const ScalarField& x, double p);
ScalarField sin(const ScalarField& x);
ScalarField cos(const ScalarField& x);

/// Memoized evaluation of one DAG at one point. Not shareable across threads.
class JetEvaluator {
 public:
  explicit JetEvaluator(const CPoint& z);
  const Eigen::VectorXd& real_point() const { return x_; }
  int num_vars() const { return static_cast<int>(x_.size()); }
  RealJet get(const ScalarField::Node& node, int order);

 private:
  Eigen::VectorXd x_;
  std::unordered_map<const ScalarField::Node*, RealJet> cache_;
};

/// Values and complex derivatives of f at one point, through `order` (<= 3).
struct ComplexDerivatives {
  double value = 0.0;
  CVector gradient;    // df/dz_j
  HermitianForm hessian;  // d^2 f / dz_j dzbar_k
  RealJet jet;         // underlying real jet
};
ComplexDerivatives differentiate(const ScalarField& f, const CPoint& z, int order = 2);

CVector wirtinger_gradient(const ScalarField& f, const CPoint& z);
HermitianForm complex_hessian(const ScalarField& f, const CPoint& z);
/// sum H_jk X_j conj(Y_k).
cplx hessian_apply(const HermitianForm& h, const CVector& x, const CVector& y);
/// sum d^3 f / dz_j dzbar_k dz_l X_j conj(Y_k) Z_l.
cplx third_form(const ScalarField& f, const CPoint& z, const CVector& x, const CVector& y,
                const CVector& zdir);
/// Same contraction from a jet of order >= 3.
cplx third_form_from_jet(const RealJet& jet, const CVector& x, const CVector& y, const CVector& zdir);

/// Wirtinger quantities of a real jet (order >= 1 resp. >= 2).
CVector gradient_from_jet(const RealJet& jet);
HermitianForm hessian_from_jet(const RealJet& jet);
Eigen::VectorXd real_gradient_from_jet(const RealJet& jet);
Eigen::MatrixXd real_hessian_from_jet(const RealJet& jet);

/// Central differences with one Richardson step (h, h/2). Test oracle only.
HermitianForm fd_hessian_oracle(const ScalarField& f, const CPoint& z, double h = 1e-4);

/// Smallest eigenvalue of a Hermitian form and a unit direction xi attaining
/// it: hessian_apply(h, xi, xi) == value.
struct MinEigen {
  double value;
  CVector direction;
};
MinEigen hermitian_min_eigen(const HermitianForm& h);

/// |sum g_j xi_j|^2 as the Hermitian matrix G_jk = g_j conj(g_k) acting via hessian_apply.
HermitianForm gradient_outer(const CVector& g);

}  // namespace levilab
