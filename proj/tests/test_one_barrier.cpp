#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "barropt/one_barrier.hpp"

using namespace barropt;

namespace {

ScaleFunctions bm(double mu) { return ScaleFunctions(LevyModel(mu, 2.0, 0.2)); }

RewardFunction g1() {
  return RewardFunction::rational({0.0, 0.0, 0.3}, {0.2, -0.32, 0.0, 0.5});
}

}  // namespace

TEST_CASE("f_ratio stationarity points") {
  // constant yield: F = 1/W', stationary exactly at a*
  const auto sf = bm(2.4);
  const auto cst = RewardFunction::power(0.0);
  CHECK(std::fabs(f_ratio(sf, cst, sf.a_star()).deriv) < 1e-12);

  // the rational example is stationary near the reported threshold
  const auto sf23 = bm(2.3);
  const auto fr = f_ratio(sf23, g1(), 0.8925);
  CHECK(std::fabs(fr.deriv) < 1e-3 * fr.value);
}

TEST_CASE("F' changes sign exactly once for the quadratic yield") {
  const auto sf = bm(2.4);
  const auto pw = RewardFunction::power(2.0);
  int changes = 0;
  double prev = f_ratio(sf, pw, 1e-3).deriv;
  for (double u = 0.05; u < 250.0; u += 0.05) {
    const double cur = f_ratio(sf, pw, u).deriv;
    if ((cur > 0) != (prev > 0)) ++changes;
    prev = cur;
  }
  CHECK(changes == 1);
}

TEST_CASE("find_bstar reproduces the reference thresholds") {
  const auto s23 = find_bstar(bm(2.3), g1());
  CHECK(s23.bstar == Catch::Approx(0.8925).margin(2e-3));
  CHECK_FALSE(s23.decr_f1_holds);

  const auto s24 = find_bstar(bm(2.4), g1());
  CHECK(s24.bstar == Catch::Approx(0.9165).margin(2e-3));
  CHECK_FALSE(s24.decr_f1_holds);
  CHECK(s24.fmax == Catch::Approx(f_ratio(bm(2.4), g1(), s24.bstar).value));

  // an interior threshold is stationary: g'/g = W''/W' there
  const auto sf24 = bm(2.4);
  const auto gr = g1().g_eval(s24.bstar);
  CHECK(gr.g1 / gr.g ==
        Catch::Approx(sf24.w2(s24.bstar) / sf24.w1(s24.bstar)).margin(1e-9));
}

TEST_CASE("decaying yield with a* = 0 gives a zero threshold") {
  const ScaleFunctions sf(LevyModel(-1.0, 1.0, 0.5));
  REQUIRE(sf.a_star() == 0.0);
  const auto sol = find_bstar(sf, RewardFunction::exponential(1.0));
  CHECK(sol.bstar == 0.0);  // endpoint maximizer snaps exactly
  CHECK(sol.decr_f1_holds);
}

TEST_CASE("constant yield recovers a*") {
  const auto sf = bm(2.4);
  const auto sol = find_bstar(sf, RewardFunction::power(0.0));
  CHECK(sol.bstar == Catch::Approx(sf.a_star()).margin(1e-6));
  CHECK(sol.decr_f1_holds);
}

TEST_CASE("quadratic yield has a large interior threshold") {
  const auto sol = find_bstar(bm(2.4), RewardFunction::power(2.0));
  CHECK(sol.bstar == Catch::Approx(25.56465996625683).margin(1e-5));
  CHECK(sol.decr_f1_holds);
}

TEST_CASE("scaling the reward leaves bstar unchanged") {
  const auto sf = bm(2.4);
  const auto r3 = RewardFunction::rational({0.0, 0.0, 0.9}, {0.2, -0.32, 0.0, 0.5});
  const auto a = find_bstar(sf, g1());
  const auto b = find_bstar(sf, r3);
  CHECK(a.bstar == Catch::Approx(b.bstar).margin(1e-8));
  CHECK(3.0 * a.fmax == Catch::Approx(b.fmax).epsilon(1e-9));
}

TEST_CASE("UnboundedSearch when F keeps rising past the doubled horizon") {
  OneBarrierOptions opts;
  opts.upper = 5.0;
  CHECK_THROWS_AS(find_bstar(bm(2.4), RewardFunction::power(2.0), opts),
                  UnboundedSearch);
}

TEST_CASE("one-barrier value function at and beyond the threshold") {
  const auto sf = bm(2.3);
  const auto r = g1();
  const auto sol = find_bstar(sf, r);
  const double b = sol.bstar;

  CHECK(value_one_barrier(sf, r, b, 0.0).v == 0.0);
  const double vb = r.g_eval(b).g * sf.w(b) / sf.w1(b);
  CHECK(value_one_barrier(sf, r, b, b).v == Catch::Approx(vb).epsilon(1e-12));
  CHECK(value_one_barrier(sf, r, b, 2.5).v1 ==
        Catch::Approx(r.g_eval(2.5).g).epsilon(1e-14));

  // V'' is continuous across the optimal threshold (C2 pasting)
  const ValueFunction vf(sf, r, BarrierSet(sf, r, {b}));
  const auto l = vf.eval_side(b, -1);
  const auto rt = vf.eval_side(b, +1);
  CHECK(std::fabs(l.v2 - rt.v2) < 1e-8 * (1.0 + std::fabs(l.v2)));

  // first HJB branch below the threshold: g - V' <= 0 on (0, b)
  for (double x = 0.01; x < b; x += 0.005)
    REQUIRE(r.g_eval(x).g - vf(x).v1 <= 1e-10);
}

TEST_CASE("diagnostics cover the grid and report the search upper") {
  const auto sol = find_bstar(bm(2.4), g1());
  CHECK(sol.search_upper > 100.0);
  CHECK(sol.diagnostics.size() == 4001);
  CHECK(sol.diagnostics.front().u == 0.0);
  CHECK(sol.diagnostics.back().u == Catch::Approx(sol.search_upper));
  CHECK_FALSE(sol.growth_warning);
}
