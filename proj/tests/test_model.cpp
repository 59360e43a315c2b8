#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "barropt/model.hpp"

using namespace barropt;

namespace {
LevyModel bm(double mu, double sigma, double q) { return LevyModel(mu, sigma, q); }

LevyModel one_phase(double mu, double sigma, double q, double lambda, double alpha) {
  return LevyModel(mu, sigma, q, HyperExpJumps{lambda, {{1.0, alpha}}});
}
}  // namespace

TEST_CASE("laplace_exponent closed forms") {
  const auto m = bm(2.4, 2.0, 0.2);
  CHECK(m.laplace_exponent(0.0) == 0.0);
  CHECK(m.laplace_exponent(1.0) == Catch::Approx(4.4).epsilon(1e-15));
  const auto j = one_phase(1.0, 0.0, 0.5, 1.0, 2.0);
  CHECK(j.laplace_exponent(1.0) == Catch::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(j.laplace_exponent(0.0) == 0.0);
}

TEST_CASE("phi_q closed form and defining equation") {
  CHECK(phi_q(bm(2.4, 2.0, 0.2)) ==
        Catch::Approx(0.07823299831252684).epsilon(1e-13));
  CHECK(phi_q(bm(2.3, 2.0, 0.2)) ==
        Catch::Approx(0.08122023742033435).epsilon(1e-13));
  const auto m = one_phase(1.0, 1.0, 0.5, 1.0, 1.0);
  const double p = phi_q(m);
  CHECK(std::fabs(m.laplace_exponent(p) - m.q()) < 1e-12 * std::max(1.0, m.q()));
}

TEST_CASE("psi_roots Brownian pair") {
  const auto r = psi_roots(bm(2.4, 2.0, 0.2));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == Catch::Approx(-1.278232998312527).epsilon(1e-13));
  CHECK(r[1] == Catch::Approx(0.07823299831252684).epsilon(1e-13));
}

TEST_CASE("psi_roots hyperexponential count and location") {
  const auto m = one_phase(1.0, 1.0, 0.5, 1.0, 1.0);
  const auto r = psi_roots(m);
  REQUIRE(r.size() == 3);  // sigma > 0, one phase -> m + 2
  CHECK(r[0] < -1.0);
  CHECK((r[1] > -1.0 && r[1] < 0.0));
  CHECK(r[2] > 0.0);
  for (double t : r)
    CHECK(std::fabs(m.laplace_exponent(t) - m.q()) < 1e-12 * std::max(1.0, m.q()));
  // sigma = 0: m + 1 roots
  const auto bv = one_phase(1.0, 0.0, 0.5, 1.0, 2.0);
  CHECK(psi_roots(bv).size() == 2);
}

TEST_CASE("psi strict convexity on random models") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double mu = -1.0 + 4.0 * u01(gen);
    const double sigma = 0.3 + 2.0 * u01(gen);
    const double q = 0.05 + u01(gen);
    const auto m = bm(mu, sigma, q);
    double t1 = 3.0 * u01(gen), t3 = t1 + 0.1 + 3.0 * u01(gen);
    const double lam = u01(gen);
    const double t2 = lam * t1 + (1.0 - lam) * t3;
    const double lin = lam * m.laplace_exponent(t1) + (1.0 - lam) * m.laplace_exponent(t3);
    if (t2 != t1 && t2 != t3) CHECK(m.laplace_exponent(t2) < lin + 1e-12);
  }
}

TEST_CASE("root count and interlacing over random hyperexponential models") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int nph = 1 + int(u01(gen) * 3.0);
    std::vector<HyperExpPhase> phases;
    double alpha = 0.2 + u01(gen);
    double psum = 0.0;
    for (int i = 0; i < nph; ++i) {
      const double p = 0.1 + u01(gen);
      phases.push_back({p, alpha});
      psum += p;
      alpha += 0.3 + 2.0 * u01(gen);
    }
    for (auto& ph : phases) ph.p /= psum;
    const LevyModel m(-0.5 + 2.0 * u01(gen), 0.4 + u01(gen), 0.05 + u01(gen),
                      HyperExpJumps{0.2 + 2.0 * u01(gen), phases});
    const auto roots = psi_roots(m);
    REQUIRE(roots.size() == std::size_t(nph) + 2);
    CHECK(roots.back() > 0.0);
    for (std::size_t i = 0; i + 1 < roots.size(); ++i) CHECK(roots[i] < 0.0);
    // negative roots interlace with the poles
    auto rates = m.sorted_rates();
    std::vector<double> poles;
    for (double a : rates) poles.push_back(-a);
    std::sort(poles.begin(), poles.end());
    CHECK(roots[0] < poles[0]);
    for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
      CHECK(roots[i + 1] > poles[i]);
      CHECK(roots[i + 1] < poles[i + 1]);
    }
    CHECK(roots[poles.size()] > poles.back());
  }
}

TEST_CASE("construction validates invariants") {
  CHECK_THROWS_AS(bm(1.0, 1.0, 0.0), InvalidModel);   // q > 0
  CHECK_THROWS_AS(bm(1.0, 0.0, 0.5), InvalidModel);   // no jumps needs sigma > 0
  CHECK_THROWS_AS(one_phase(-1.0, 0.0, 0.5, 1.0, 2.0), InvalidModel);  // monotone
  CHECK_THROWS_AS(LevyModel(1.0, 1.0, 0.5, HyperExpJumps{1.0, {{0.5, 1.0}, {0.5, 1.0}}}),
                  InvalidModel);  // coincident rates
  CHECK_THROWS_AS(LevyModel(1.0, 1.0, 0.5, HyperExpJumps{1.0, {{0.7, 1.0}, {0.7, 2.0}}}),
                  InvalidModel);  // weights must sum to 1
}
