#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "barropt/value_function.hpp"

using namespace barropt;

namespace {

ScaleFunctions bm24() { return ScaleFunctions(LevyModel(2.4, 2.0, 0.2)); }

RewardFunction g1() {
  return RewardFunction::rational({0.0, 0.0, 0.3}, {0.2, -0.32, 0.0, 0.5});
}

std::vector<double> random_levels(std::mt19937_64& gen, int n_pairs) {
  std::uniform_real_distribution<double> u(0.05, 0.9);
  std::vector<double> lv;
  double x = u(gen);
  for (int i = 0; i < 2 * n_pairs + 1; ++i) {
    lv.push_back(x);
    x += u(gen);
  }
  return lv;
}

}  // namespace

TEST_CASE("BarrierSet validation") {
  const auto sf = bm24();
  const auto r = g1();
  CHECK_THROWS_AS(BarrierSet(sf, r, {}), InvalidBarriers);
  CHECK_THROWS_AS(BarrierSet(sf, r, {1.0, 2.0}), InvalidBarriers);
  CHECK_THROWS_AS(BarrierSet(sf, r, {1.0, 1.0, 2.0}), InvalidBarriers);
  CHECK_THROWS_AS(BarrierSet(sf, r, {-0.5}), InvalidBarriers);
  CHECK_NOTHROW(BarrierSet(sf, r, {0.9, 1.1, 2.2}));
}

TEST_CASE("one-barrier piecewise values") {
  const auto sf = bm24();
  const auto r = g1();
  const double b = 0.9165;
  const ValueFunction vf(sf, r, BarrierSet(sf, r, {b}));

  CHECK(vf(0.0).v == 0.0);
  CHECK(vf(-1.0).v == 0.0);

  const double at_b = r.g_eval(b).g * sf.w(b) / sf.w1(b);
  CHECK(vf(b).v == Catch::Approx(at_b).epsilon(1e-13));

  for (double x : {1.0, 1.7, 4.0}) {
    const auto e = vf(x);
    CHECK(e.regime == Regime::push);
    CHECK(e.v1 == Catch::Approx(r.g_eval(x).g).epsilon(1e-14));
    CHECK(e.v2 == Catch::Approx(r.g_eval(x).g1).epsilon(1e-14));
  }
  CHECK(vf(0.5).regime == Regime::below);
}

TEST_CASE("value function is continuous and C1 at odd barriers for any set") {
  const auto sf = bm24();
  const auto r = g1();
  std::mt19937_64 gen(19);
  for (int rep = 0; rep < 25; ++rep) {
    const auto lv = random_levels(gen, 1 + int(rep % 3));
    const ValueFunction vf(sf, r, BarrierSet(sf, r, lv));
    for (std::size_t i = 0; i < lv.size(); ++i) {
      const auto l = vf.eval_side(lv[i], -1);
      const auto rr = vf.eval_side(lv[i], +1);
      REQUIRE(std::fabs(l.v - rr.v) <= 1e-9 * (1.0 + std::fabs(l.v)));
      if (i % 2 == 0)  // odd barrier b_1, b_3, ...
        REQUIRE(std::fabs(l.v1 - rr.v1) <= 1e-8 * (1.0 + std::fabs(l.v1)));
    }
    // V is nondecreasing with positive derivative inside (0, top + 2)
    double prev = 0.0;
    for (double x = 0.01; x < lv.back() + 2.0; x += 0.01) {
      const auto e = vf(x);
      REQUIRE(e.v >= prev - 1e-12);
      REQUIRE(e.v1 > 0.0);
      prev = e.v;
    }
  }
}

TEST_CASE("regime tags partition the line") {
  const auto sf = bm24();
  const auto r = g1();
  const ValueFunction vf(sf, r, BarrierSet(sf, r, {0.9, 1.1, 2.2}));
  CHECK(vf(0.4).regime == Regime::below);
  CHECK(vf(1.0).regime == Regime::push);
  CHECK(vf(1.0).level == 0);
  CHECK(vf(1.5).regime == Regime::wait);
  CHECK(vf(1.5).level == 1);
  CHECK(vf(3.0).regime == Regime::push);
  CHECK(vf(3.0).level == 1);
  // closed push endpoints per the piecewise definition
  CHECK(vf(1.1).regime == Regime::push);
  CHECK(vf.eval_side(1.1, +1).regime == Regime::wait);
  CHECK(vf(2.2).regime == Regime::push);
  CHECK(vf.eval_side(2.2, -1).regime == Regime::wait);
}

TEST_CASE("reward scaling leaves the structure and scales values") {
  const auto sf = bm24();
  const auto r = g1();
  const auto r3 = RewardFunction::rational({0.0, 0.0, 0.9}, {0.2, -0.32, 0.0, 0.5});
  const std::vector<double> lv{0.9, 1.2, 2.1};
  const ValueFunction v1(sf, r, BarrierSet(sf, r, lv));
  const ValueFunction v3(sf, r3, BarrierSet(sf, r3, lv));
  for (double x : {0.3, 1.0, 1.6, 3.5})
    REQUIRE(v3(x).v == Catch::Approx(3.0 * v1(x).v).epsilon(1e-12));
}
