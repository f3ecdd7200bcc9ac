#include <catch2/catch_amalgamated.hpp>

#include "effham/profile.hpp"

using namespace effham;

namespace {

RadialProfile ridge() { return RadialProfile({0.0, 0.5, 1.0}, {0.0, 2.0, 1.0}, 2.0); }
RadialProfile ring() { return RadialProfile({0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, 3.0); }
RadialProfile orderly_m1() { return RadialProfile({0.0, 1.0, 2.0}, {1.0, 2.0, 0.0}, 3.0); }
RadialProfile triple() {
  return RadialProfile({0, 1, 2, 3, 4, 5, 6}, {1.5, 2.0, 1.0, 2.5, 0.5, 3.0, 0.0}, 5.0);
}

}  // namespace

TEST_CASE("piecewise linear evaluation hits knots exactly") {
  RadialProfile p = ridge();
  CHECK(p.eval(0.0) == 0.0);
  CHECK(p.eval(0.5) == 2.0);
  CHECK(p.eval(1.0) == 1.0);
  CHECK(p.eval(2.0) == Catch::Approx(3.0));      // tail: 1 + 2*(2-1)
  CHECK(p.eval(0.25) == Catch::Approx(1.0));     // midpoint of the first ramp
  CHECK(p.eval(0.75) == Catch::Approx(1.5));
  CHECK(p.max_abs_slope() == 4.0);
}

TEST_CASE("constructor rejects malformed knot data") {
  CHECK_THROWS(RadialProfile({0.0, 0.5, 0.5}, {0.0, 1.0, 2.0}, 1.0));   // duplicate radius
  CHECK_THROWS(RadialProfile({0.5, 1.0}, {0.0, 1.0}, 1.0));             // missing r=0
  CHECK_THROWS(RadialProfile({0.0, 1.0}, {0.0, 1.0}, -1.0));            // noncoercive tail
  CHECK_THROWS(RadialProfile({0.0, 1.0}, {0.0}, 1.0));                  // length mismatch
}

TEST_CASE("classification: single increasing segment is quasiconvex") {
  RadialProfile p({0.0}, {0.0}, 1.0);
  HypothesisReport rep = p.validate();
  CHECK(rep.cls == ProfileClass::quasiconvex);
  CHECK(rep.m == 0);
}

TEST_CASE("classification: strictly ordered m=3 profile") {
  HypothesisReport rep = triple().validate();
  CHECK(rep.cls == ProfileClass::strict_h6);
  CHECK(rep.m == 3);
  CHECK(rep.extrema_r == std::vector<double>{0, 1, 2, 3, 4, 5, 6});
  CHECK(rep.violations.empty());
}

TEST_CASE("classification: ridge profile has its deep well at the origin") {
  // phi(s0)=0 < phi(s2)=1 breaks the ordered-minima chain, so the inductive
  // composition theorem does not cover this profile; it still alternates.
  HypothesisReport rep = ridge().validate();
  CHECK(rep.m == 1);
  CHECK(rep.alternating);
  CHECK_FALSE(rep.minima_chain_relaxed);
  CHECK(rep.cls == ProfileClass::well_at_origin);
  CHECK(rep.origin_well);
  REQUIRE_FALSE(rep.violations.empty());
  CHECK(rep.violations.front().find("phi(s0)") != std::string::npos);
  CHECK(rep.extrema_v == std::vector<double>{0.0, 2.0, 1.0});  // 0, M1=2, m1=1
}

TEST_CASE("classification: decreasing-then-increasing profile is the single-well base case") {
  HypothesisReport rep = ring().validate();
  CHECK(rep.cls == ProfileClass::single_well);
  CHECK(rep.m == 1);
}

TEST_CASE("relaxed chains: plateau surrogate passes only with the relaxed flag") {
  RadialProfile flat = ridge().flatten_below(1.0);
  HypothesisReport rep = flat.validate();
  CHECK(rep.cls == ProfileClass::relaxed_h6);
  CHECK(rep.minima_chain_relaxed);
  CHECK_FALSE(rep.minima_chain_strict);
  CHECK_THROWS(decompose_profile(flat, false));
  CHECK_NOTHROW(decompose_profile(flat, true));
}

TEST_CASE("decompose: m=0 profile yields a single piece equal to the profile") {
  RadialProfile p({0.0}, {0.0}, 2.0);
  DecompositionPlan plan = decompose_profile(p);
  REQUIRE(plan.pieces.size() == 1);
  CHECK(plan.m == 0);
  for (int i = 0; i <= 100; ++i) {
    double r = 3.0 * i / 100;
    CHECK(plan.pieces[0].fn.eval(r) == Catch::Approx(p.eval(r)));
  }
}

TEST_CASE("decompose: single-well profile splits into increasing and decreasing branches") {
  RadialProfile p = ring();
  DecompositionPlan plan = decompose_profile(p);
  REQUIRE(plan.pieces.size() == 2);
  CHECK(plan.pieces[0].increasing);
  CHECK_FALSE(plan.pieces[1].increasing);
  // native agreement: increasing branch on [1,inf), decreasing on [0,1]
  for (int i = 0; i <= 100; ++i) {
    double r = 1.0 + 3.0 * i / 100;
    CHECK(plan.pieces[0].fn.eval(r) == Catch::Approx(p.eval(r)).margin(1e-12));
  }
  for (int i = 0; i <= 100; ++i) {
    double r = 1.0 * i / 100;
    CHECK(plan.pieces[1].fn.eval(r) == Catch::Approx(p.eval(r)).margin(1e-12));
  }
  // decreasing branch must keep falling
  CHECK(plan.pieces[1].fn.eval(4.0) < plan.pieces[1].fn.eval(2.0));
}

TEST_CASE("decompose: ridge profile pieces are monotone and ordered on a dense grid") {
  RadialProfile p = ridge();
  DecompositionPlan plan = decompose_profile(p);
  REQUIRE(plan.pieces.size() == 3);
  CHECK(plan.pieces[0].increasing);
  CHECK_FALSE(plan.pieces[1].increasing);
  CHECK(plan.pieces[2].increasing);

  const int npts = 1000;
  for (int i = 0; i < npts; ++i) {
    const double r0 = 4.0 * i / npts, r1 = 4.0 * (i + 1) / npts;
    CHECK(plan.pieces[0].fn.eval(r1) > plan.pieces[0].fn.eval(r0));
    CHECK(plan.pieces[1].fn.eval(r1) < plan.pieces[1].fn.eval(r0));
    CHECK(plan.pieces[2].fn.eval(r1) > plan.pieces[2].fn.eval(r0));
    CHECK(plan.pieces[0].fn.eval(r0) >= plan.pieces[2].fn.eval(r0) - 1e-12);
  }
  // native windows
  CHECK(plan.pieces[0].fn.eval(0.25) == Catch::Approx(1.0));
  CHECK(plan.pieces[1].fn.eval(0.75) == Catch::Approx(1.5));
  CHECK(plan.pieces[2].fn.eval(2.0) == Catch::Approx(3.0));
  CHECK(plan.pieces[2].fn.eval(0.0) == Catch::Approx(-1.0));  // 2r-1 continued below its window
}

TEST_CASE("reconstruction identity holds for ordered profiles") {
  for (const RadialProfile& p : {orderly_m1(), triple()}) {
    DecompositionPlan plan = decompose_profile(p);
    const double hi = p.pl.r.back() + 2.0;
    for (int i = 0; i <= 1000; ++i) {
      const double r = hi * i / 1000;
      REQUIRE(plan_reconstruct(plan, r) == Catch::Approx(p.eval(r)).margin(1e-12));
    }
  }
}

TEST_CASE("reconstruction of the ridge profile gives its plateau surrogate") {
  // with the deep well at the origin, the recursion floor phi(s2) clips the
  // reconstruction at the ring-minimum level
  RadialProfile p = ridge();
  DecompositionPlan plan = decompose_profile(p);
  for (int i = 0; i <= 1000; ++i) {
    const double r = 4.0 * i / 1000;
    REQUIRE(plan_reconstruct(plan, r) == Catch::Approx(std::max(p.eval(r), 1.0)).margin(1e-12));
  }
}

TEST_CASE("single-well reconstruction recovers the profile") {
  RadialProfile p = ring();
  DecompositionPlan plan = decompose_profile(p);
  for (int i = 0; i <= 1000; ++i) {
    const double r = 4.0 * i / 1000;
    REQUIRE(plan_reconstruct(plan, r) == Catch::Approx(p.eval(r)).margin(1e-12));
  }
}

TEST_CASE("flatten_below clips from below and keeps the tail") {
  RadialProfile flat = ridge().flatten_below(1.0);
  CHECK(flat.eval(0.0) == 1.0);
  CHECK(flat.eval(0.2) == 1.0);   // 4r < 1 here
  CHECK(flat.eval(0.5) == 2.0);
  CHECK(flat.eval(1.0) == 1.0);
  CHECK(flat.eval(3.0) == Catch::Approx(5.0));
  for (int i = 0; i <= 400; ++i) {
    double r = 4.0 * i / 400.0;
    REQUIRE(flat.eval(r) == Catch::Approx(std::max(ridge().eval(r), 1.0)).margin(1e-12));
  }
}

TEST_CASE("plateau envelope keeps the profile up to its first peak then clips") {
  RadialProfile env = ridge().plateau_envelope();
  // equal to phi on [0, 1/2], equal to max{2, phi} past it
  for (int i = 0; i <= 1000; ++i) {
    const double r = 4.0 * i / 1000;
    const double want = r <= 0.5 ? ridge().eval(r) : std::max(2.0, ridge().eval(r));
    REQUIRE(env.eval(r) == Catch::Approx(want).margin(1e-12));
  }
  CHECK(env.validate().cls == ProfileClass::quasiconvex);  // nondecreasing with a plateau
}

TEST_CASE("decompose refuses irregular profiles") {
  // decreasing start with two wells has no covered composition
  RadialProfile p({0, 1, 2, 3, 4}, {2.0, 1.0, 3.0, 0.5, 4.0}, 2.0);
  CHECK(p.validate().cls == ProfileClass::irregular);
  CHECK_THROWS(decompose_profile(p));
}
