#include "levilab/correction.hpp"

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

CorrectionOptions fast_options() {
  CorrectionOptions o;
  o.boundary_samples = 400;
  o.directions = 16;
  return o;
}

}  // namespace

TEST_CASE("farthest-point centers cover the points") {
  std::vector<CPoint> line;
  for (double x : {0.0, 1.0, 2.0, 3.0}) line.push_back(pt(x, 0.0));
  CHECK(farthest_point_centers(line, 1.5) == std::vector<int>{0, 3});
  CHECK(farthest_point_centers(line, 10.0) == std::vector<int>{0});
  CHECK(farthest_point_centers(line, 0.5).size() == 4);
  CHECK(farthest_point_centers({}, 1.0).empty());
}

TEST_CASE("bump partition is 1 on the inner ball and 0 outside the patch") {
  Patch a;
  a.center = pt(1.0, 0.0);
  a.radius = 0.4;
  a.inner_radius = 0.2;
  Patch b = a;
  b.center = pt(-1.0, 0.0);
  const BumpCover cover = make_bump_cover(2, {a, b});
  REQUIRE(cover.zeta.size() == 2);
  CHECK(cover.theta == doctest::Approx(std::exp(-1.0 / 3.0)));
  CHECK(cover.zeta[0].value(pt(1.0, 0.0)) == doctest::Approx(1.0));
  CHECK(cover.zeta[0].value(pt(1.15, 0.05)) == doctest::Approx(1.0));
  CHECK(cover.zeta[0].value(pt(1.0, 0.41)) == 0.0);
  CHECK(cover.zeta[0].value(pt(-1.0, 0.0)) == 0.0);
  for (double x : {0.65, 0.7, 0.75, 0.8}) {
    const double z = cover.zeta[0].value(pt(x, 0.0));
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
  }
}

TEST_CASE("choose_C matches the hand value at the skewed-egg degenerate point") {
  // (NH)(W,W) = 1/4 at (1,0): C = (c1/4 - eps/2) / (1/16) * K.
  const DomainSpec s = catalog_domain("skewed-egg2");
  const std::vector<BoundarySample> stratum = {make_boundary_sample(s, pt(1.0, 0.0))};
  const ChooseCResult r = choose_C(s, 0.1, stratum, {e2()}, 1.0, 1.0, 0, 1);
  CHECK(r.c == doctest::Approx(3.2).epsilon(1e-9));
  CHECK(r.witness_nh == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(r.evaluated == 1);
  CHECK(choose_C(s, 1.0, stratum, {e2()}, 1.0, 1.0, 0, 1).c == 0.0);
  CHECK(choose_C(s, 0.1, stratum, {}, 1.0, 1.0, 0, 1).c == 0.0);

  // egg2 has no obstruction; every direction falls under the guard.
  const DomainSpec egg = catalog_domain("egg2");
  const ChooseCResult g = choose_C(egg, 0.1, {make_boundary_sample(egg, pt(1.0, 0.0))}, {e2()}, 1.0, 1.0, 4, 1);
  CHECK(g.c == 0.0);
  CHECK(g.guarded == g.evaluated);
}

TEST_CASE("the ball needs no correction") {
  const DomainSpec s = catalog_domain("ball2");
  const CorrectionLedger l = build_interior(s, 0.05, fast_options());
  for (const auto& st : l.stages) CHECK(st.trivial);
  const CPoint q = pt(0.3, cplx(0.1, 0.5));
  CHECK(l.r1.value(q) == s.rho.value(q));
}

TEST_CASE("skewed egg correction at eps = 0.05") {
  const DomainSpec s = catalog_domain("skewed-egg2");
  const CorrectionLedger l = build_interior(s, 0.05, fast_options());
  REQUIRE(!l.stages.empty());
  const StageRecord& st0 = l.stages[0];
  CHECK(st0.k == 0);
  CHECK_FALSE(st0.trivial);
  CHECK(st0.c > 0.0);
  REQUIRE(!st0.patches.empty());
  const double expected_delta = 0.05 / (st0.c * static_cast<double>(st0.patches.size()) * st0.kappa);
  CHECK(st0.delta == doctest::Approx(expected_delta).epsilon(1e-12));
  CHECK(st0.c1_effective == doctest::Approx(2.0 * st0.c1_distance));
  for (const auto& ps : st0.patches) CHECK(ps.params.valid());
  for (const auto& cr : st0.cutoff_reports) CHECK(cr.pass);

  const ScalarField r2 = build_exterior(s, l);
  for (const auto& b : sample_boundary(s, 20, 9)) {
    CHECK(std::abs(l.r1.value(b.p)) < 1e-10);
    const CPoint q = b.p - 0.01 * b.normal;
    CHECK(l.r1.value(q) < 0.0);
    const double rho = s.rho.value(q);
    CHECK(l.r1.value(q) * r2.value(q) == doctest::Approx(rho * rho).epsilon(1e-10));
  }
}

TEST_CASE("correction refuses a domain that fails the boundary psh check") {
  CHECK_THROWS_AS(build_interior(catalog_domain("egg2-broken"), 0.05, fast_options()), std::invalid_argument);
}
