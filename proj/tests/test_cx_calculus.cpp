#include "levilab/cx_calculus.hpp"
#include "levilab/domain.hpp"

#include <doctest.h>

#include <random>

using namespace levilab;

namespace {

CPoint pt(cplx a, cplx b) {
  CPoint z(2);
  z << a, b;
  return z;
}

// |z1|^2 |z2|^2 by hand: g = (conj(z1)|z2|^2, |z1|^2 conj(z2)),
// H = [[|z2|^2, conj(z1) z2], [z1 conj(z2), |z1|^2]].
ScalarField product_field() { return ScalarField::abs2(2, 0) * ScalarField::abs2(2, 1); }

}  // namespace

TEST_CASE("real and complex coordinates round-trip") {
  const CPoint z = pt({0.25, -1.5}, {2.0, 0.125});
  const Eigen::VectorXd x = to_real(z);
  CHECK(x.size() == 4);
  CHECK(x[1] == -1.5);
  CHECK(x[2] == 2.0);
  CHECK((from_real(x) - z).norm() == 0.0);
}

TEST_CASE("Wirtinger gradient and complex Hessian of |z1|^2 |z2|^2") {
  const cplx z1(0.3, -0.7), z2(-1.1, 0.4);
  const CPoint z = pt(z1, z2);
  const ScalarField f = product_field();
  const CVector g = wirtinger_gradient(f, z);
  CHECK(std::abs(g[0] - std::conj(z1) * std::norm(z2)) < 1e-14);
  CHECK(std::abs(g[1] - std::norm(z1) * std::conj(z2)) < 1e-14);
  const HermitianForm h = complex_hessian(f, z);
  CHECK(std::abs(h(0, 0) - std::norm(z2)) < 1e-14);
  CHECK(std::abs(h(1, 1) - std::norm(z1)) < 1e-14);
  CHECK(std::abs(h(0, 1) - std::conj(z1) * z2) < 1e-14);
  CHECK(std::abs(h(1, 0) - z1 * std::conj(z2)) < 1e-14);
  CHECK((h - h.adjoint()).norm() < 1e-14);
}

TEST_CASE("hessian_apply contracts X^T H conj(Y)") {
  HermitianForm h(2, 2);
  h << 2.0, cplx(0, 1), cplx(0, -1), 3.0;
  CVector x(2), y(2);
  x << cplx(1, 1), 2.0;
  y << 0.5, cplx(0, -1);
  cplx expected = 0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) expected += h(j, k) * x[j] * std::conj(y[k]);
  CHECK(std::abs(hessian_apply(h, x, y) - expected) < 1e-15);
}

TEST_CASE("third form of the skewed egg at (1,0) equals the hand-derived 1/4") {
  // rho = A B with A = |z1|^2 + |z2|^4 - 1, B = 1 + c |z2|^2. At (1, 0) only
  // dA/dz1 * d^2B/dz2 dzbar2 = conj(z1) c survives.
  const DomainSpec s = catalog_domain("skewed-egg2");
  CVector w(2), n(2);
  w << 0.0, 1.0;
  n << 1.0, 0.0;
  const cplx v = third_form(s.rho, pt(1.0, 0.0), w, w, n);
  CHECK(v.real() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::abs(v.imag()) < 1e-14);
  const RealJet j = s.rho.jet(pt(1.0, 0.0), 3);
  CHECK(std::abs(third_form_from_jet(j, w, w, n) - v) < 1e-15);
}

TEST_CASE("jet Hessians match the finite-difference oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const auto& id : catalog_ids()) {
    const DomainSpec s = catalog_domain(id);
    for (int t = 0; t < 5; ++t) {
      CPoint z(s.n);
      for (int j = 0; j < s.n; ++j) z[j] = cplx(u(rng), u(rng)) * 0.7;
      const HermitianForm exact = complex_hessian(s.rho, z);
      const HermitianForm fd = fd_hessian_oracle(s.rho, z);
      CHECK((exact - fd).norm() / std::max(1.0, exact.norm()) < 1e-6);
    }
  }
}

TEST_CASE("minimal eigenpair reproduces its value through hessian_apply") {
  HermitianForm h(3, 3);
  h << 2.0, cplx(0.5, 0.5), 0.0, cplx(0.5, -0.5), 1.0, cplx(0, 0.3), 0.0, cplx(0, -0.3), -0.5;
  const MinEigen me = hermitian_min_eigen(h);
  CHECK(hessian_apply(h, me.direction, me.direction).real() == doctest::Approx(me.value).epsilon(1e-13));
  CHECK(me.direction.norm() == doctest::Approx(1.0));
  CVector g(2);
  g << cplx(1, 2), cplx(-0.5, 0.25);
  CVector xi(2);
  xi << cplx(0.3, -0.1), cplx(2, 1);
  const cplx pairing = g[0] * xi[0] + g[1] * xi[1];
  CHECK(hessian_apply(gradient_outer(g), xi, xi).real() == doctest::Approx(std::norm(pairing)));
}

TEST_CASE("field algebra and named descriptors") {
  const ScalarField f = (ScalarField::re(2, 0) * 2.0 + 1.0).named("2x1+1");
  CHECK(f.value(pt({0.5, 3.0}, 0.0)) == doctest::Approx(2.0));
  CHECK(f.descriptor() == "2x1+1");
  const ScalarField g = exp(log(ScalarField::abs2(2, 0) + 1.0));
  CHECK(g.value(pt({1.0, 1.0}, 0.0)) == doctest::Approx(3.0));
  const ScalarField d = ScalarField::distance2(pt(1.0, {0.0, 1.0}));
  CHECK(d.value(pt(0.0, 0.0)) == doctest::Approx(2.0));
}

TEST_CASE("evaluation outside the domain of log raises") {
  const ScalarField f = log(ScalarField::re(2, 0));
  CHECK_THROWS_AS(f.value(pt(-1.0, 0.0)), std::domain_error);
}
