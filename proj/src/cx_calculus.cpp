#include "levilab/cx_calculus.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <sstream>

namespace levilab {

Eigen::VectorXd to_real(const CPoint& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    x[2 * j] = z[j].real();
    x[2 * j + 1] = z[j].imag();
  }
  return x;
}

CPoint from_real(const Eigen::VectorXd& x) {
  CPoint z(x.size() / 2);
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = cplx(x[2 * j], x[2 * j + 1]);
  return z;
}

namespace {

using Node = ScalarField::Node;
using NodePtr = ScalarField::NodePtr;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string clip(std::string s) {
  constexpr std::size_t kMax = 240;
  if (s.size() > kMax) s = s.substr(0, kMax - 3) + "...";
  return s;
}

class ConstNode final : public Node {
 public:
  ConstNode(int n, double c) : Node(n), c_(c) {}
  RealJet evaluate(JetEvaluator& ev, int order) const override {
    return RealJet::constant(MonomialBasis::get(ev.num_vars(), order), c_);
  }
  std::string describe() const override { return fmt(c_); }

 private:
  double c_;
};

class CoordNode final : public Node {
 public:
  CoordNode(int n, int index) : Node(n), index_(index) {}
  RealJet evaluate(JetEvaluator& ev, int order) const override {
    return RealJet::variable(MonomialBasis::get(ev.num_vars(), order), index_,
                             ev.real_point()[index_]);
  }
  std::string describe() const override {
    return std::string(index_ % 2 == 0 ? "re" : "im") + "(z" + std::to_string(index_ / 2 + 1) + ")";
  }

 private:
  int index_;
};

// a*ca + b*cb + offset; b may be null.
class AffineNode final : public Node {
 public:
  AffineNode(NodePtr a, double ca, NodePtr b, double cb, double offset)
      : Node(a->dimension()), a_(std::move(a)), b_(std::move(b)), ca_(ca), cb_(cb), offset_(offset) {}
  RealJet evaluate(JetEvaluator& ev, int order) const override {
    RealJet out = ev.get(*a_, order);
    if (ca_ != 1.0) out *= ca_;
    if (b_) {
      RealJet jb = ev.get(*b_, order);
      if (cb_ != 1.0) jb *= cb_;
      out += jb;
    }
    out += offset_;
    return out;
  }
  std::string describe() const override {
    std::string s = (ca_ == 1.0 ? "" : fmt(ca_) + "*") + "(" + a_->describe() + ")";
    if (b_) s += " + " + (cb_ == 1.0 ? "" : fmt(cb_) + "*") + "(" + b_->describe() + ")";
    if (offset_ != 0.0) s += " + " + fmt(offset_);
    return clip(s);
  }

 private:
  NodePtr a_, b_;
  double ca_, cb_, offset_;
};

class ProductNode final : public Node {
 public:
  ProductNode(NodePtr a, NodePtr b) : Node(a->dimension()), a_(std::move(a)), b_(std::move(b)) {}
  RealJet evaluate(JetEvaluator& ev, int order) const override {
    return ev.get(*a_, order) * ev.get(*b_, order);
  }
  std::string describe() const override {
    return clip("(" + a_->describe() + ")*(" + b_->describe() + ")");
  }

 private:
  NodePtr a_, b_;
};

class ComposeNode final : public Node {
 public:
  ComposeNode(UnivariatePtr f, NodePtr x) : Node(x->dimension()), f_(std::move(f)), x_(std::move(x)) {}
  RealJet evaluate(JetEvaluator& ev, int order) const override {
    RealJet inner = ev.get(*x_, order);
    const auto d = f_->derivatives(inner.value(), order);
    return inner.compose(d);
  }
  std::string describe() const override { return clip(f_->name() + "(" + x_->describe() + ")"); }

 private:
  UnivariatePtr f_;
  NodePtr x_;
};

class NamedNode final : public Node {
 public:
  NamedNode(NodePtr inner, std::string name)
      : Node(inner->dimension()), inner_(std::move(inner)), name_(std::move(name)) {}
  RealJet evaluate(JetEvaluator& ev, int order) const override { return ev.get(*inner_, order); }
  std::string describe() const override { return name_; }

 private:
  NodePtr inner_;
  std::string name_;
};

ComplexJet to_complex(const RealJet& j) { return j.cast<cplx>(); }

// Wirtinger first derivatives of a real jet: d/dz_j = (d/dx_j - i d/dy_j)/2.
std::vector<ComplexJet> wirtinger_jets(const std::vector<RealJet>& d1) {
  const int n = static_cast<int>(d1.size()) / 2;
  std::vector<ComplexJet> out;
  out.reserve(n);
  for (int j = 0; j < n; ++j) {
    ComplexJet g = to_complex(d1[2 * j]) * cplx(0.5, 0.0);
    g += to_complex(d1[2 * j + 1]) * cplx(0.0, -0.5);
    out.push_back(std::move(g));
  }
  return out;
}

class ProjectedLeviNode final : public Node {
 public:
  ProjectedLeviNode(NodePtr rho, std::vector<CVector> w0)
      : Node(rho->dimension()), rho_(std::move(rho)), w0_(std::move(w0)) {}

  RealJet evaluate(JetEvaluator& ev, int order) const override {
    const int n = dimension();
    const int nv = 2 * n;
    const RealJet r = ev.get(*rho_, order + 2);
    std::vector<RealJet> d1;
    d1.reserve(nv);
    for (int a = 0; a < nv; ++a) d1.push_back(r.derivative(a));
    std::vector<std::vector<RealJet>> d2(nv);
    for (int a = 0; a < nv; ++a) {
      d2[a].reserve(nv);
      for (int b = 0; b < nv; ++b) d2[a].push_back(d1[a].derivative(b));
    }
    std::vector<ComplexJet> grad = wirtinger_jets(d1);
    for (auto& g : grad) g = g.truncated(order);

    // H_jk = (f_xjxk + f_yjyk + i(f_xjyk - f_yjxk)) / 4
    std::vector<std::vector<ComplexJet>> h(n, std::vector<ComplexJet>(n));
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        RealJet re = (d2[2 * j][2 * k] + d2[2 * j + 1][2 * k + 1]) * 0.25;
        RealJet im = (d2[2 * j][2 * k + 1] - d2[2 * j + 1][2 * k]) * 0.25;
        h[j][k] = to_complex(re) + to_complex(im) * cplx(0.0, 1.0);
      }
    }

    RealJet norm2 = RealJet::constant(grad[0].basis(), 0.0);
    for (const auto& g : grad) norm2 += real_part(g * conj(g));
    const ComplexJet inv_norm2 = to_complex(levilab::reciprocal(norm2));

    RealJet sigma = RealJet::constant(grad[0].basis(), 0.0);
    for (const CVector& w : w0_) {
      // W(z) = W0 - <d rho, W0> conj(d rho) / |d rho|^2
      ComplexJet inner = ComplexJet::constant(grad[0].basis(), cplx(0.0));
      for (int j = 0; j < n; ++j) inner += grad[j] * w[j];
      inner = inner * inv_norm2;
      std::vector<ComplexJet> wz;
      wz.reserve(n);
      for (int j = 0; j < n; ++j) {
        wz.push_back(ComplexJet::constant(grad[0].basis(), w[j]) - inner * conj(grad[j]));
      }
      ComplexJet acc = ComplexJet::constant(grad[0].basis(), cplx(0.0));
      for (int j = 0; j < n; ++j) {
        ComplexJet row = ComplexJet::constant(grad[0].basis(), cplx(0.0));
        for (int k = 0; k < n; ++k) row += h[j][k] * conj(wz[k]);
        acc += wz[j] * row;
      }
      sigma += real_part(acc);
    }
    return sigma;
  }

  std::string describe() const override {
    return clip("levi_sum[" + std::to_string(w0_.size()) + "](" + rho_->describe() + ")");
  }

 private:
  NodePtr rho_;
  std::vector<CVector> w0_;
};

void check_same_dimension(const ScalarField& a, const ScalarField& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ScalarField: empty operand");
  if (a.dimension() != b.dimension()) throw std::invalid_argument("ScalarField: dimension mismatch");
}

}  // namespace

JetEvaluator::JetEvaluator(const CPoint& z) : x_(to_real(z)) {}

RealJet JetEvaluator::get(const ScalarField::Node& node, int order) {
  auto it = cache_.find(&node);
  if (it != cache_.end() && it->second.order() >= order) return it->second.truncated(order);
  RealJet j = node.evaluate(*this, order);
  cache_[&node] = j;
  return j;
}

ScalarField ScalarField::named(std::string name) const {
  return ScalarField(std::make_shared<NamedNode>(node_, std::move(name)));
}

RealJet ScalarField::jet(const CPoint& z, int order) const {
  if (z.size() != dimension()) throw std::invalid_argument("ScalarField: point dimension mismatch");
  JetEvaluator ev(z);
  return ev.get(*node_, order);
}

double ScalarField::value(const CPoint& z) const { return jet(z, 0).value(); }

double ScalarField::partial(const CPoint& z, std::span<const int> exponent) const {
  int total = 0;
  for (int e : exponent) total += e;
  if (total > 3) throw std::out_of_range("partial: total order above 3");
  return jet(z, total).partial(exponent);
}

ScalarField ScalarField::constant(int n, double c) {
  return ScalarField(std::make_shared<ConstNode>(n, c));
}

ScalarField ScalarField::real_coordinate(int n, int index) {
  if (index < 0 || index >= 2 * n) throw std::out_of_range("real_coordinate: index");
  return ScalarField(std::make_shared<CoordNode>(n, index));
}

ScalarField ScalarField::abs2(int n, int j) {
  ScalarField x = re(n, j), y = im(n, j);
  return (x * x + y * y).named("abs2(z" + std::to_string(j + 1) + ")");
}

ScalarField ScalarField::distance2(const CPoint& c) {
  const int n = static_cast<int>(c.size());
  ScalarField acc;
  for (int j = 0; j < n; ++j) {
    ScalarField x = re(n, j) - c[j].real();
    ScalarField y = im(n, j) - c[j].imag();
    ScalarField t = x * x + y * y;
    acc = acc.empty() ? t : acc + t;
  }
  return acc.named("dist2(z, c)");
}

ScalarField ScalarField::projected_levi_sum(const ScalarField& rho, std::vector<CVector> w0) {
  for (const auto& w : w0) {
    if (w.size() != rho.dimension()) throw std::invalid_argument("projected_levi_sum: W dimension");
  }
  if (w0.empty()) return constant(rho.dimension(), 0.0);
  return ScalarField(std::make_shared<ProjectedLeviNode>(rho.node(), std::move(w0)));
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  check_same_dimension(a, b);
  return ScalarField(std::make_shared<AffineNode>(a.node(), 1.0, b.node(), 1.0, 0.0));
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  check_same_dimension(a, b);
  return ScalarField(std::make_shared<AffineNode>(a.node(), 1.0, b.node(), -1.0, 0.0));
}

ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  check_same_dimension(a, b);
  return ScalarField(std::make_shared<ProductNode>(a.node(), b.node()));
}

ScalarField operator/(const ScalarField& a, const ScalarField& b) { return a * pow(b, -1.0); }

ScalarField operator+(const ScalarField& a, double c) {
  return ScalarField(std::make_shared<AffineNode>(a.node(), 1.0, nullptr, 0.0, c));
}

ScalarField operator-(double c, const ScalarField& a) {
  return ScalarField(std::make_shared<AffineNode>(a.node(), -1.0, nullptr, 0.0, c));
}

ScalarField operator*(const ScalarField& a, double c) {
  return ScalarField(std::make_shared<AffineNode>(a.node(), c, nullptr, 0.0, 0.0));
}

ScalarField compose(UnivariatePtr f, const ScalarField& x) {
  return ScalarField(std::make_shared<ComposeNode>(std::move(f), x.node()));
}
ScalarField exp(const ScalarField& x) { return compose(exp_function(), x); }
ScalarField log(const ScalarField& x) { return compose(log_function(), x); }
ScalarField pow(const ScalarField& x, double p) { return compose(power_function(p), x); }
ScalarField sin(const ScalarField& x) { return compose(sin_function(), x); }
ScalarField cos(const ScalarField& x) { return compose(cos_function(), x); }

Eigen::VectorXd real_gradient_from_jet(const RealJet& jet) {
  const int nv = jet.num_vars();
  Eigen::VectorXd g(nv);
  for (int a = 0; a < nv; ++a) g[a] = jet[1 + a];
  return g;
}

Eigen::MatrixXd real_hessian_from_jet(const RealJet& jet) {
  const int nv = jet.num_vars();
  Eigen::MatrixXd h(nv, nv);
  std::vector<int> e(nv, 0);
  for (int a = 0; a < nv; ++a) {
    for (int b = a; b < nv; ++b) {
      std::fill(e.begin(), e.end(), 0);
      e[a] += 1;
      e[b] += 1;
      h(a, b) = h(b, a) = jet.partial(e);
    }
  }
  return h;
}

CVector gradient_from_jet(const RealJet& jet) {
  const int n = jet.num_vars() / 2;
  CVector g(n);
  for (int j = 0; j < n; ++j) g[j] = cplx(0.5 * jet[1 + 2 * j], -0.5 * jet[2 + 2 * j]);
  return g;
}

HermitianForm hessian_from_jet(const RealJet& jet) {
  const Eigen::MatrixXd r = real_hessian_from_jet(jet);
  const int n = jet.num_vars() / 2;
  HermitianForm h(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      const double re = 0.25 * (r(2 * j, 2 * k) + r(2 * j + 1, 2 * k + 1));
      const double im = 0.25 * (r(2 * j, 2 * k + 1) - r(2 * j + 1, 2 * k));
      h(j, k) = cplx(re, im);
    }
  }
  return h;
}

namespace {

// u with sum_a u_a d/dx_a = sum_j x_j d/dz_j.
Eigen::VectorXcd holomorphic_direction(const CVector& x) {
  Eigen::VectorXcd u(2 * x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    u[2 * j] = 0.5 * x[j];
    u[2 * j + 1] = cplx(0.0, -0.5) * x[j];
  }
  return u;
}

void check_finite(const ComplexDerivatives& d) {
  if (!std::isfinite(d.value)) throw EvaluationError("non-finite field value", -1);
  for (Eigen::Index j = 0; j < d.gradient.size(); ++j) {
    if (!std::isfinite(d.gradient[j].real()) || !std::isfinite(d.gradient[j].imag())) {
      throw EvaluationError("non-finite derivative at gradient index " + std::to_string(j),
                            static_cast<int>(j));
    }
  }
  for (Eigen::Index j = 0; j < d.hessian.rows(); ++j) {
    for (Eigen::Index k = 0; k < d.hessian.cols(); ++k) {
      if (!std::isfinite(std::abs(d.hessian(j, k)))) {
        throw EvaluationError("non-finite derivative at hessian index " + std::to_string(j) + "," +
                                  std::to_string(k),
                              static_cast<int>(j * d.hessian.cols() + k));
      }
    }
  }
}

}  // namespace

cplx third_form_from_jet(const RealJet& jet, const CVector& x, const CVector& y, const CVector& zdir) {
  if (jet.order() < 3) throw std::invalid_argument("third_form: jet order below 3");
  const int nv = jet.num_vars();
  if (x.size() * 2 != nv || y.size() * 2 != nv || zdir.size() * 2 != nv) {
    throw std::invalid_argument("third_form: dimension mismatch");
  }
  const Eigen::VectorXcd ux = holomorphic_direction(x);
  const Eigen::VectorXcd uy = holomorphic_direction(y).conjugate();
  const Eigen::VectorXcd uz = holomorphic_direction(zdir);
  std::vector<int> e(nv);
  cplx acc = 0.0;
  for (int a = 0; a < nv; ++a) {
    for (int b = 0; b < nv; ++b) {
      for (int c = 0; c < nv; ++c) {
        std::fill(e.begin(), e.end(), 0);
        ++e[a];
        ++e[b];
        ++e[c];
        acc += jet.partial(e) * ux[a] * uy[b] * uz[c];
      }
    }
  }
  return acc;
}

ComplexDerivatives differentiate(const ScalarField& f, const CPoint& z, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("differentiate: order must be 1..3");
  ComplexDerivatives d;
  d.jet = f.jet(z, order);
  d.value = d.jet.value();
  d.gradient = gradient_from_jet(d.jet);
  d.hessian = order >= 2 ? hessian_from_jet(d.jet) : HermitianForm();
  check_finite(d);
  return d;
}

CVector wirtinger_gradient(const ScalarField& f, const CPoint& z) {
  return differentiate(f, z, 1).gradient;
}

HermitianForm complex_hessian(const ScalarField& f, const CPoint& z) {
  return differentiate(f, z, 2).hessian;
}

cplx hessian_apply(const HermitianForm& h, const CVector& x, const CVector& y) {
  if (h.rows() != x.size() || h.cols() != y.size()) {
    throw std::invalid_argument("hessian_apply: dimension mismatch");
  }
  return x.transpose() * h * y.conjugate();
}

cplx third_form(const ScalarField& f, const CPoint& z, const CVector& x, const CVector& y,
                const CVector& zdir) {
  const RealJet j = f.jet(z, 3);
  const cplx t = third_form_from_jet(j, x, y, zdir);
  if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
    throw EvaluationError("non-finite third derivative", 0);
  }
  return t;
}

HermitianForm fd_hessian_oracle(const ScalarField& f, const CPoint& z, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_hessian_oracle: step must be positive");
  const Eigen::VectorXd x0 = to_real(z);
  const double scale = 1.0 + x0.cwiseAbs().maxCoeff();
  if (h / 2 < 1e-12 * scale || x0.cwiseAbs().maxCoeff() + h / 2 == x0.cwiseAbs().maxCoeff()) {
    throw std::underflow_error("fd_hessian_oracle: step underflow");
  }
  const int nv = static_cast<int>(x0.size());
  auto eval = [&](const Eigen::VectorXd& x) { return f.value(from_real(x)); };
  auto second = [&](double step) {
    Eigen::MatrixXd d(nv, nv);
    const double f0 = eval(x0);
    for (int a = 0; a < nv; ++a) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp[a] += step;
      xm[a] -= step;
      d(a, a) = (eval(xp) - 2.0 * f0 + eval(xm)) / (step * step);
      for (int b = a + 1; b < nv; ++b) {
        Eigen::VectorXd pp = x0, pm = x0, mp = x0, mm = x0;
        pp[a] += step; pp[b] += step;
        pm[a] += step; pm[b] -= step;
        mp[a] -= step; mp[b] += step;
        mm[a] -= step; mm[b] -= step;
        d(a, b) = d(b, a) = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * step * step);
      }
    }
    return d;
  };
  const Eigen::MatrixXd r = (4.0 * second(h / 2) - second(h)) / 3.0;
  const int n = nv / 2;
  HermitianForm out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      out(j, k) = cplx(0.25 * (r(2 * j, 2 * k) + r(2 * j + 1, 2 * k + 1)),
                       0.25 * (r(2 * j, 2 * k + 1) - r(2 * j + 1, 2 * k)));
    }
  }
  return out;
}

MinEigen hermitian_min_eigen(const HermitianForm& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_min_eigen: solver failed");
  return {es.eigenvalues()[0], es.eigenvectors().col(0).conjugate()};
}

HermitianForm gradient_outer(const CVector& g) { return g * g.adjoint(); }

}  // namespace levilab
