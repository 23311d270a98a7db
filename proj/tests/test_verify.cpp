#include "levilab/correction.hpp"
#include "levilab/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace levilab;

namespace {

CPoint pt(cplx a, cplx b) {
  CPoint z(2);
  z << a, b;
  return z;
}

CVector e2() {
  CVector w(2);
  w << 0.0, 1.0;
  return w;
}

std::vector<CollarPoint> collar(const DomainSpec& s, int m, Side side) {
  return collar_points(sample_boundary(s, m, 1), {0.005, 0.01, 0.015, 0.02}, side);
}

}  // namespace

TEST_CASE("McNeal constant of x^2 is 4") {
  const ScalarField f = ScalarField::re(1, 0) * ScalarField::re(1, 0);
  std::vector<CPoint> pts;
  for (double x : {-0.7, -0.1, 0.0, 0.2, 0.9}) {
    CPoint z(1);
    z << cplx(x, 0.3);
    pts.push_back(z);
  }
  const McNealResult r = mcneal_check(f, pts);
  CHECK(r.c_hat == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(r.violations == 0);
  CHECK(r.evaluated == 5);
  CHECK(mcneal_check(ScalarField::constant(1, 2.0), pts).c_hat == 0.0);
}

TEST_CASE("tangential McNeal constant of egg2 sigma is finite") {
  const DomainSpec s = catalog_domain("egg2");
  const ScalarField sigma = sigma_field(s, {e2()});
  const McNealResult r = mcneal_check_tangential(sigma, boundary_cloud(s, 200, 1));
  CHECK(std::isfinite(r.c_hat));
  CHECK(r.violations == 0);
  CHECK(r.min_value >= -1e-12);
}

TEST_CASE("exponent rules for the bounded exhaustion") {
  CHECK(df_delta(0.5, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(df_delta(0.75, 4.0) == doctest::Approx(0.25 / 10.5));
  CHECK(df_delta_exterior(2.0, 1.0) == doctest::Approx(1.0 / 12.0));
  CHECK_THROWS_AS(df_delta(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(df_delta(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(df_delta(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(df_delta_exterior(1.0, 1.0), std::invalid_argument);
  const DomainSpec s = catalog_domain("ball2");
  CHECK(df_candidate(s.rho, 0.5, 0.3).value(pt(0.0, 0.0)) == doctest::Approx(-1.0));
  CHECK(max_norm2(sample_boundary(s, 30, 2)) == doctest::Approx(1.0));
}

TEST_CASE("boundary plurisubharmonicity") {
  const InequalityReport ball = check_psh_on_boundary(catalog_domain("ball2"), sample_boundary(catalog_domain("ball2"), 50, 1));
  CHECK(ball.pass);
  CHECK(ball.min_slack > 0.0);

  const DomainSpec broken = catalog_domain("egg2-broken");
  const InequalityReport r = check_psh_on_boundary(broken, boundary_cloud(broken, 200, 1));
  CHECK_FALSE(r.pass);
  CHECK(r.min_slack == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(std::abs(std::abs(r.witness.point[0]) - 1.0) < 1e-9);
}

TEST_CASE("main inequality oracle on the skewed egg") {
  // z2 = 0: H(e2,e2) = (|z1|^2 - 1)/4, <d rho, e2> = 0, |rho| = 1 - |z1|^2.
  const DomainSpec s = catalog_domain("skewed-egg2");
  const double a = 0.99 * 0.99 - 1.0;
  const double expected = a * 0.25 + 0.01 * (-a);
  CHECK(main_slack(s.rho, 0.01, pt(0.99, 0.0), e2()) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(-0.004776).epsilon(1e-9));
}

TEST_CASE("main1 on the ball passes and witnesses reproduce") {
  const DomainSpec s = catalog_domain("ball2");
  const auto c = collar(s, 100, Side::Interior);
  const InequalityReport r = check_main1(s, s.rho, 0.05, c);
  CHECK(r.pass);
  CHECK(r.slack.size() == c.size());
  CHECK(main_slack(s.rho, 0.05, r.witness.point, r.witness.direction) ==
        doctest::Approx(r.min_slack).epsilon(1e-12));
}

TEST_CASE("raw skewed egg fails main1 near (1,0); slack is monotone in eps") {
  const DomainSpec s = catalog_domain("skewed-egg2");
  const auto cloud = boundary_cloud(s, 200, 1);
  const auto c = collar_points(cloud, {0.005, 0.01, 0.015, 0.02}, Side::Interior);
  const InequalityReport r = check_main1(s, s.rho, 0.05, c);
  CHECK_FALSE(r.pass);
  CHECK(std::abs(std::abs(r.witness.point[0]) - 1.0) < 0.1);
  CHECK(std::abs(r.witness.point[1]) < 0.1);
  CHECK(main_slack(s.rho, 0.05, r.witness.point, r.witness.direction) ==
        doctest::Approx(r.min_slack).epsilon(1e-12));
  const InequalityReport r2 = check_main1(s, s.rho, 0.1, c);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(r2.slack[k] >= r.slack[k] - 1e-15);
  CHECK_THROWS_AS(check_main1(s, s.rho, 0.0, c), std::invalid_argument);
}

TEST_CASE("main checks reject points on the wrong side") {
  const DomainSpec s = catalog_domain("ball2");
  const auto out = collar(s, 5, Side::Exterior);
  CHECK_THROWS_AS(check_main1(s, s.rho, 0.05, out), EvaluationError);
  CHECK(check_main2(s, s.rho, 0.05, out).pass);
}

TEST_CASE("cutoff property checks: trivial field passes, oversized field fails") {
  const DomainSpec s = catalog_domain("skewed-egg2");
  const auto samples = boundary_cloud(s, 200, 1);
  const CutoffReport zero = check_cutoff_properties(s, ScalarField::constant(2, 0.0), 1e-3, {e2()}, samples);
  CHECK(zero.pass);

  // tau = 1 disables the cutoff, so s = sigma, far larger than delta.
  const ScalarField sigma = sigma_field(s, {e2()});
  const ScalarField one = ScalarField::constant(2, 1.0);
  CutoffParams p;
  p.m = 3.0;
  p.log_tau = 0.0;
  p.delta = 1e-3;
  const ScalarField bad = s_field(one, sigma, p);
  const CutoffReport r = check_cutoff_properties(s, bad, 1e-3, {e2()}, samples, SFieldParts{one, sigma, 0.0});
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.prop_ii.pass);
  CHECK(r.prop_i.pass);
}

TEST_CASE("bounded exhaustion search on the ball") {
  const DomainSpec s = catalog_domain("ball2");
  const auto feet = sample_boundary(s, 100, 1);
  const auto c = collar_points(feet, {0.01, 0.02, 0.03, 0.04}, Side::Interior);
  const DFSearchResult r = df_search(s, s.rho, {0.5, 0.9, 0.99}, c, max_norm2(feet));
  CHECK(r.monotone);
  REQUIRE(r.largest_pass.has_value());
  CHECK(*r.largest_pass == doctest::Approx(0.99));
  for (std::size_t k = 0; k < r.etas.size(); ++k) {
    CHECK(r.strict_psh[k]);
    CHECK(r.bracket_ok[k]);
  }
  CHECK_THROWS_AS(df_search(s, s.rho, {}, c, 1.0), std::invalid_argument);

  const auto ext = collar_points(feet, {0.01, 0.02, 0.03, 0.04}, Side::Exterior);
  CHECK(exterior_df_check(s, s.rho, 2.0, ext, 1.0).pass);
  CHECK_THROWS_AS(exterior_df_check(s, s.rho, 1.0, ext, 1.0), std::invalid_argument);
}

TEST_CASE("Taylor factor probe") {
  const DomainSpec ball = catalog_domain("ball2");
  CHECK_FALSE(taylor_factor_probe(ball, sample_boundary(ball, 50, 1), ball.rho).defined);

  // Measured behaviour: H_rho(W,W)(q) ~ -2 d (NH)(W,W)(p) inside, +2 d outside.
  const DomainSpec s = catalog_domain("skewed-egg2");
  const FactorProbe f = taylor_factor_probe(s, boundary_cloud(s, 200, 1), s.rho);
  REQUIRE(f.defined);
  CHECK(f.nh == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(f.interior_a == doctest::Approx(-2.0).epsilon(0.02));
  CHECK(f.exterior_a == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("finalize_report breaks ties toward the lowest index") {
  InequalityReport r;
  r.slack = {0.5, -1.0, -1.0, 2.0};
  r.stratum = {0, 1, 1, 0};
  r.directions = std::vector<CVector>(4, e2());
  std::vector<CPoint> pts(4, pt(0.0, 0.0));
  finalize_report(r, pts);
  CHECK(r.witness.sample == 1);
  CHECK(r.min_slack == -1.0);
  CHECK_FALSE(r.pass);
  CHECK(r.min_by_stratum.at(0) == 0.5);
  CHECK(r.min_by_stratum.at(1) == -1.0);
}
