#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "barropt/numeric.hpp"
#include "barropt/scale.hpp"

using namespace barropt;

namespace {

ScaleFunctions bm24() { return ScaleFunctions(LevyModel(2.4, 2.0, 0.2)); }
ScaleFunctions bm23() { return ScaleFunctions(LevyModel(2.3, 2.0, 0.2)); }

ScaleFunctions hyp2() {
  return ScaleFunctions(LevyModel(
      0.5, 1.2, 0.3, HyperExpJumps{2.0, {{0.4, 0.7}, {0.6, 2.5}}}));
}

LevyModel random_bm(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return LevyModel(-1.0 + 4.0 * u01(gen), 0.3 + 2.0 * u01(gen), 0.05 + u01(gen));
}

LevyModel random_hyp(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int nph = 1 + int(u01(gen) * 3.0);
  std::vector<HyperExpPhase> phases;
  double alpha = 0.2 + u01(gen), psum = 0.0;
  for (int i = 0; i < nph; ++i) {
    const double p = 0.1 + u01(gen);
    phases.push_back({p, alpha});
    psum += p;
    alpha += 0.3 + 2.0 * u01(gen);
  }
  for (auto& ph : phases) ph.p /= psum;
  return LevyModel(-0.5 + 2.0 * u01(gen), 0.4 + u01(gen), 0.05 + u01(gen),
                   HyperExpJumps{0.2 + 2.0 * u01(gen), phases});
}

// independent transform check: adaptive quadrature of int_0^T e^{-theta x} W
// with T chosen so the tail bound is < 1e-10
void check_laplace_transform(const ScaleFunctions& sf, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double phi = sf.phi();
  const double lead = sf.coeffs().back();
  for (int rep = 0; rep < 5; ++rep) {
    const double theta = phi + 0.1 + 4.9 * u01(gen);
    const double gap = theta - phi;
    const double T = (std::log(2.0 * lead / gap) + 23.03) / gap;
    const double quad = num::integrate(
        [&](double x) { return std::exp(-theta * x) * sf.w(x); }, 0.0,
        std::max(T, 1.0), 1e-12);
    const double exact =
        1.0 / (sf.model().laplace_exponent(theta) - sf.model().q());
    REQUIRE(quad == Catch::Approx(exact).epsilon(1e-8));
  }
}

}  // namespace

TEST_CASE("values at and below zero") {
  const auto sf = bm24();
  CHECK(sf.w(0.0) == 0.0);
  CHECK(sf.z(0.0) == 1.0);
  CHECK(sf.w1(0.0) == Catch::Approx(0.5).epsilon(1e-14));  // 2 / sigma^2
  CHECK(sf.w(-1.0) == 0.0);
  CHECK(sf.z(-1.0) == 1.0);
  CHECK(sf.w1(-1.0) == 0.0);
  CHECK(sf.w2(-1.0) == 0.0);
}

TEST_CASE("Brownian closed-form values") {
  const auto sf = bm24();
  CHECK(sf.phi() == Catch::Approx(0.07823299831252684).epsilon(1e-14));
  CHECK(sf.zeta1() == Catch::Approx(1.278232998312527).epsilon(1e-14));
  CHECK(sf.w(1.0) == Catch::Approx(0.29593279987327764).epsilon(1e-13));
  CHECK(sf.z(1.0) == Catch::Approx(1.035071167307361).epsilon(1e-13));
}

TEST_CASE("a_star closed form, stationarity, and zero case") {
  const auto sf = bm24();
  CHECK(sf.a_star() == Catch::Approx(4.1188535624447775).epsilon(1e-12));
  // independent check: golden-section minimization of W'
  const double amin = num::golden_max(
      [&](double x) { return -sf.w1(x); }, 0.0, 20.0, 1e-11);
  CHECK(amin == Catch::Approx(sf.a_star()).margin(1e-8));

  const auto sf23 = bm23();
  CHECK(std::fabs(sf23.w2(sf23.a_star())) < 1e-10);

  const ScaleFunctions neg(LevyModel(-1.0, 1.0, 0.5));
  CHECK(neg.w2(0.0) > 0.0);
  CHECK(neg.a_star() == 0.0);

  const auto hy = hyp2();
  CHECK(std::fabs(hy.w2(hy.a_star())) < 1e-10);
  const double hmin = num::golden_max(
      [&](double x) { return -hy.w1(x); }, 0.0, 20.0, 1e-11);
  CHECK(hmin == Catch::Approx(hy.a_star()).margin(1e-8));
}

TEST_CASE("exit probabilities") {
  const auto sf = bm24();
  const auto at_top = sf.exit_probabilities(2.0, 2.0, 0.0);
  CHECK(at_top.up == Catch::Approx(1.0).epsilon(1e-14));
  const auto mid = sf.exit_probabilities(1.0, 2.0, 0.0);
  CHECK(mid.up == Catch::Approx(0.7353462326516935).epsilon(1e-13));
  CHECK(mid.down == Catch::Approx(0.22148202902613368).epsilon(1e-12));
  CHECK(mid.up >= 0.0);
  CHECK(mid.up <= 1.0);
  CHECK(mid.down >= 0.0);
  CHECK(mid.down <= 1.0);
  // x at the lower level: W(0) = 0, Z(0) = 1
  const auto at_bot = sf.exit_probabilities(1e-14, 2.0, 0.0);
  CHECK(at_bot.up == Catch::Approx(0.0).margin(1e-13));
  CHECK(at_bot.down == Catch::Approx(1.0).margin(1e-13));
  CHECK_THROWS_AS(sf.exit_probabilities(3.0, 2.0, 0.0), InvalidInterval);
  CHECK_THROWS_AS(sf.exit_probabilities(0.0, 2.0, 0.5), InvalidInterval);
}

TEST_CASE("Laplace transform identity, Brownian and hyperexponential") {
  std::mt19937_64 gen(11);
  check_laplace_transform(bm24(), gen);
  check_laplace_transform(hyp2(), gen);
  for (int i = 0; i < 3; ++i) {
    check_laplace_transform(ScaleFunctions(random_bm(gen)), gen);
    check_laplace_transform(ScaleFunctions(random_hyp(gen)), gen);
  }
}

TEST_CASE("harmonicity of W and Z, Brownian case") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = random_bm(gen);
    const ScaleFunctions sf(m);
    const double v = 0.01 + 8.0 * u01(gen);
    const double s2 = m.sigma() * m.sigma();
    // sigma^2 W''/2 + mu W' = q W
    const double lhs_w = 0.5 * s2 * sf.w2(v) + m.mu() * sf.w1(v);
    const double rhs_w = m.q() * sf.w(v);
    const double scale_w =
        std::fabs(0.5 * s2 * sf.w2(v)) + std::fabs(m.mu() * sf.w1(v)) + std::fabs(rhs_w);
    REQUIRE(std::fabs(lhs_w - rhs_w) <= 1e-10 * std::max(1.0, scale_w));
    // sigma^2 q W'/2 + mu q W = q Z
    const double lhs_z = 0.5 * s2 * m.q() * sf.w1(v) + m.mu() * m.q() * sf.w(v);
    const double rhs_z = m.q() * sf.z(v);
    const double scale_z = std::fabs(lhs_z) + std::fabs(rhs_z);
    REQUIRE(std::fabs(lhs_z - rhs_z) <= 1e-10 * std::max(1.0, scale_z));
  }
}

TEST_CASE("Wronskian-type identities at random 0 <= b < v < z") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto m = random_bm(gen);
    const ScaleFunctions sf(m);
    const double s4 = std::pow(m.sigma(), 4);
    const double b = 2.0 * u01(gen);
    const double v = b + 0.01 + 2.0 * u01(gen);
    const double z = v + 0.01 + 2.0 * u01(gen);
    // the identity values can be exponentially smaller than the products
    // whose difference forms them, so allow the cancellation floor
    const double e = std::exp((sf.phi() - sf.zeta1()) * v);
    const double lhs1 = sf.w1(v) * sf.w1(v) - sf.w(v) * sf.w2(v);
    const double floor1 =
        1e-13 * (sf.w1(v) * sf.w1(v) + std::fabs(sf.w(v) * sf.w2(v)));
    REQUIRE(lhs1 == Catch::Approx(4.0 / s4 * e).epsilon(1e-10).margin(floor1));

    const double ezv = std::exp((sf.phi() - sf.zeta1()) * (z - v));
    const double lhs2 =
        sf.w2(z - b) * sf.w1(z - v) - sf.w1(z - b) * sf.w2(z - v);
    const double rhs2 = 4.0 * m.q() / s4 * ezv * sf.w(v - b);
    const double floor2 = 1e-13 * (std::fabs(sf.w2(z - b) * sf.w1(z - v)) +
                                   std::fabs(sf.w1(z - b) * sf.w2(z - v)));
    REQUIRE(lhs2 == Catch::Approx(rhs2).epsilon(1e-10).margin(floor2));

    const double lhs3 =
        sf.w1(z - b) * sf.w1(z - v) - sf.w2(z - v) * sf.w(z - b);
    const double rhs3 = 4.0 / s4 * ezv * sf.z(v - b);
    const double floor3 = 1e-13 * (std::fabs(sf.w1(z - b) * sf.w1(z - v)) +
                                   std::fabs(sf.w2(z - v) * sf.w(z - b)));
    REQUIRE(lhs3 == Catch::Approx(rhs3).epsilon(1e-10).margin(floor3));
  }
}

TEST_CASE("log-convexity of W' for hyperexponential models") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const ScaleFunctions sf(random_hyp(gen));
    for (int k = 0; k < 10; ++k) {
      const double u = 0.02 + 6.0 * u01(gen);
      const double v = 0.02 + 6.0 * u01(gen);
      const double mid = std::log(sf.w1(0.5 * (u + v)));
      const double avg = 0.5 * (std::log(sf.w1(u)) + std::log(sf.w1(v)));
      REQUIRE(mid <= avg + 1e-12);
    }
  }
}

TEST_CASE("W''/W' tends to Phi(q) and has the right limit at 0") {
  std::mt19937_64 gen(23);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_bm(gen);
    const ScaleFunctions sf(m);
    const double u = 50.0 / sf.phi();
    REQUIRE(sf.w2(u) / sf.w1(u) == Catch::Approx(sf.phi()).margin(1e-6));
    REQUIRE(sf.w2(0.0) / sf.w1(0.0) ==
            Catch::Approx(-2.0 * m.mu() / (m.sigma() * m.sigma())).epsilon(1e-11));
  }
  const auto hy = hyp2();
  REQUIRE(hy.w2(50.0 / hy.phi()) / hy.w1(50.0 / hy.phi()) ==
          Catch::Approx(hy.phi()).margin(1e-6));
}

TEST_CASE("W is strictly increasing and continuous on a grid") {
  const auto sf = hyp2();
  double prev = sf.w(0.0);
  for (double x = 0.01; x < 12.0; x += 0.01) {
    const double cur = sf.w(x);
    REQUIRE(cur > prev);
    prev = cur;
  }
}
