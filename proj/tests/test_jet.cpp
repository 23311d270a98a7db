#include "levilab/jet.hpp"
#include "levilab/univariate.hpp"

#include <doctest.h>

#include <cmath>

using namespace levilab;

namespace {

double partial(const RealJet& j, std::initializer_list<int> e) {
  const std::vector<int> v(e);
  return j.partial(v);
}

}  // namespace

TEST_CASE("graded basis sizes are binomial") {
  // C(n + k, k) monomials of degree <= k in n variables.
  auto b = MonomialBasis::get(4, 3);
  CHECK(b->size() == 35);
  CHECK(b->size_up_to(0) == 1);
  CHECK(b->size_up_to(1) == 5);
  CHECK(b->size_up_to(2) == 15);
  const std::vector<int> too_high = {2, 2, 0, 0};
  CHECK(b->index_of(too_high) == -1);
}

TEST_CASE("product rule through third order") {
  // f = x^2 y at (1, 2): f_x = 2xy, f_xx = 2y, f_xy = 2x, f_xxy = 2.
  auto b = MonomialBasis::get(2, 3);
  RealJet x = RealJet::variable(b, 0, 1.0), y = RealJet::variable(b, 1, 2.0);
  RealJet f = x * x * y;
  CHECK(f.value() == doctest::Approx(2.0));
  CHECK(partial(f, {1, 0}) == doctest::Approx(4.0));
  CHECK(partial(f, {0, 1}) == doctest::Approx(1.0));
  CHECK(partial(f, {2, 0}) == doctest::Approx(4.0));
  CHECK(partial(f, {1, 1}) == doctest::Approx(2.0));
  CHECK(partial(f, {2, 1}) == doctest::Approx(2.0));
  CHECK(partial(f, {0, 2}) == doctest::Approx(0.0));
}

TEST_CASE("exp of a sum has every partial equal to its value") {
  auto b = MonomialBasis::get(2, 3);
  RealJet s = RealJet::variable(b, 0, 0.5) + RealJet::variable(b, 1, 1.0);
  RealJet e = exp(s);
  const double v = std::exp(1.5);
  for (auto idx : {std::vector<int>{0, 0}, {1, 0}, {0, 2}, {2, 1}, {1, 1}, {3, 0}}) {
    CHECK(e.partial(idx) == doctest::Approx(v).epsilon(1e-13));
  }
}

TEST_CASE("log, pow and reciprocal agree with closed forms") {
  auto b = MonomialBasis::get(1, 3);
  RealJet x = RealJet::variable(b, 0, 2.0);
  RealJet l = log(x);
  CHECK(partial(l, {1}) == doctest::Approx(0.5));
  CHECK(partial(l, {2}) == doctest::Approx(-0.25));
  CHECK(partial(l, {3}) == doctest::Approx(0.25));
  RealJet p = pow(x, 1.5);  // 1.5 x^0.5, 0.75 x^-0.5, -0.375 x^-1.5
  CHECK(partial(p, {1}) == doctest::Approx(1.5 * std::sqrt(2.0)));
  CHECK(partial(p, {2}) == doctest::Approx(0.75 / std::sqrt(2.0)));
  CHECK(partial(p, {3}) == doctest::Approx(-0.375 / std::pow(2.0, 1.5)));
  RealJet r = reciprocal(x) * x;
  CHECK(r.value() == doctest::Approx(1.0));
  CHECK(partial(r, {1}) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("sin and cos satisfy the Pythagorean identity to every order") {
  auto b = MonomialBasis::get(2, 3);
  RealJet u = RealJet::variable(b, 0, 0.3) * RealJet::variable(b, 1, -1.2);
  RealJet one = sin(u) * sin(u) + cos(u) * cos(u);
  CHECK(one.value() == doctest::Approx(1.0));
  for (int i = 1; i < one.size(); ++i) CHECK(std::abs(one[i]) < 1e-14);
}

TEST_CASE("derivative lowers the order and truncation is a prefix") {
  auto b = MonomialBasis::get(2, 3);
  RealJet x = RealJet::variable(b, 0, 1.5), y = RealJet::variable(b, 1, -0.5);
  RealJet f = x * x * x + x * y;
  RealJet fx = f.derivative(0);  // 3x^2 + y
  CHECK(fx.order() == 2);
  CHECK(fx.value() == doctest::Approx(3 * 2.25 - 0.5));
  CHECK(partial(fx, {1, 0}) == doctest::Approx(9.0));
  RealJet t = f.truncated(1);
  CHECK(t.size() == 3);
  CHECK(t[1] == doctest::Approx(f[1]));
}

TEST_CASE("univariate helpers") {
  const auto d = derivatives_via_jet([](const RealJet& x) { return x * x * x; }, 2.0, 3);
  CHECK(d[0] == doctest::Approx(8.0));
  CHECK(d[1] == doctest::Approx(12.0));
  CHECK(d[2] == doctest::Approx(12.0));
  CHECK(d[3] == doctest::Approx(6.0));

  for (double t : {0.1, 0.3, 0.5, 0.77}) {
    CHECK(smooth_step_derivatives(t, 0)[0] + smooth_step_derivatives(1 - t, 0)[0] == doctest::Approx(1.0));
  }
  CHECK(smooth_step_derivatives(-1.0, 2)[0] == 0.0);
  CHECK(smooth_step_derivatives(2.0, 2)[0] == 1.0);

  auto bump = bump_profile();
  CHECK((*bump)(0.0) == doctest::Approx(1.0));
  CHECK((*bump)(0.25) == doctest::Approx(std::exp(-1.0 / 3.0)));
  CHECK((*bump)(1.0) == 0.0);

  const double theta = std::exp(-1.0 / 3.0);
  auto inv = partition_normalizer(theta);
  CHECK((*inv)(2.0) == doctest::Approx(0.5));
  CHECK((*inv)(theta) == doctest::Approx(1.0 / theta));
  CHECK((*inv)(0.1) == doctest::Approx(1.0 / theta));
  // 1/Phi never amplifies: s / Phi(s) <= 1.
  for (double s = 0.01; s < 1.5; s += 0.01) CHECK(s * (*inv)(s) <= 1.0 + 1e-12);
}
