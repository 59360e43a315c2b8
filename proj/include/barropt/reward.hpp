#pragma once

// Instantaneous marginal yield g with derivatives and antiderivative G.
//
// Kinds: power x^alpha, exponential e^{-beta x}, rational P(x)/Q(x)
// (coefficients in ascending degree), and a sampled table interpolated by a
// natural cubic spline. The table kind carries an O(h^2) derivative error and
// is meant for exploratory use, not high-precision solves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/numeric.hpp"

namespace barropt {

struct GTriple {
  double g, g1, g2;
};

class RewardFunction {
 public:
  enum class Kind { power, exponential, rational, table };

  static RewardFunction power(double alpha) {
    if (!(alpha >= 0.0)) throw InvalidReward("power: alpha must be >= 0");
    RewardFunction r;
    r.kind_ = Kind::power;
    r.alpha_ = alpha;
    return r;
  }

  static RewardFunction exponential(double beta) {
    if (!(beta > 0.0)) throw InvalidReward("exp: beta must be > 0");
    RewardFunction r;
    r.kind_ = Kind::exponential;
    r.beta_ = beta;
    return r;
  }

  static RewardFunction rational(std::vector<double> num, std::vector<double> den) {
    if (num.empty() || den.empty()) throw InvalidReward("rational: empty coefficients");
    RewardFunction r;
    r.kind_ = Kind::rational;
    r.num_ = std::move(num);
    r.den_ = std::move(den);
    // dense pre-scan over the antiderivative range: positivity, denominator
    // sign flips, and near-pole blow-ups (even-order roots never flip signs)
    double dprev = 0.0;
    for (int i = 1; i <= 65536; ++i) {
      const double x = 1024.0 * i / 65536;
      const double d = horner(r.den_, x);
      if (d == 0.0 || (i > 1 && (d > 0.0) != (dprev > 0.0)))
        throw InvalidReward("rational: denominator vanishes on (0, 1024]");
      dprev = d;
      const double g = horner(r.num_, x) / d;
      if (!(g > 0.0) && x > 1.0 / 64)
        throw InvalidReward("rational: g must be positive on (0, inf)");
      if (!(g < 1e10))
        throw InvalidReward("rational: g blows up; denominator nearly vanishes");
    }
    try {
      r.build_antiderivative_table();
    } catch (const DomainError& e) {
      throw InvalidReward(std::string("rational: ") + e.what());
    }
    return r;
  }

  static RewardFunction table(std::vector<double> xs, std::vector<double> gs) {
    if (xs.size() != gs.size() || xs.size() < 4)
      throw InvalidReward("table: need >= 4 matched samples");
    if (xs.front() != 0.0) throw InvalidReward("table: grid must start at x = 0");
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (!(xs[i] > xs[i - 1])) throw InvalidReward("table: x must increase strictly");
      if (!(gs[i] > 0.0)) throw InvalidReward("table: g must be positive");
    }
    if (gs.front() < 0.0) throw InvalidReward("table: g(0) must be >= 0");
    RewardFunction r;
    r.kind_ = Kind::table;
    r.tx_ = std::move(xs);
    r.tg_ = std::move(gs);
    r.build_spline();
    return r;
  }

  Kind kind() const { return kind_; }
  double power_alpha() const { return alpha_; }
  double exp_beta() const { return beta_; }
  const std::vector<double>& rational_num() const { return num_; }
  const std::vector<double>& rational_den() const { return den_; }
  const std::vector<double>& table_x() const { return tx_; }
  const std::vector<double>& table_g() const { return tg_; }

  GTriple g_eval(double x) const {
    switch (kind_) {
      case Kind::power: {
        if (alpha_ == 0.0) return {1.0, 0.0, 0.0};
        const double g = std::pow(x, alpha_);
        return {g, alpha_ * std::pow(x, alpha_ - 1.0),
                alpha_ * (alpha_ - 1.0) * std::pow(x, alpha_ - 2.0)};
      }
      case Kind::exponential: {
        const double g = std::exp(-beta_ * x);
        return {g, -beta_ * g, beta_ * beta_ * g};
      }
      case Kind::rational: {
        double n, n1, n2, d, d1, d2;
        horner3(num_, x, n, n1, n2);
        horner3(den_, x, d, d1, d2);
        if (std::fabs(d) < 1e-300 * std::max(1.0, std::fabs(n)))
          throw DomainError("rational reward: denominator vanishes at x");
        const double g = n / d;
        const double g1 = (n1 - g * d1) / d;
        const double g2 = (n2 - 2.0 * g1 * d1 - g * d2) / d;
        return {g, g1, g2};
      }
      case Kind::table:
        return spline_eval(x);
    }
    throw std::logic_error("unreachable");
  }

  // G(x) = int_0^x g(y) dy, x >= 0
  double G_eval(double x) const {
    if (x < 0.0) throw DomainError("G is defined on x >= 0");
    switch (kind_) {
      case Kind::power:
        return std::pow(x, alpha_ + 1.0) / (alpha_ + 1.0);
      case Kind::exponential:
        return -std::expm1(-beta_ * x) / beta_;
      case Kind::rational: {
        auto it = std::upper_bound(gx_.begin(), gx_.end(), x);
        const std::size_t i = it == gx_.begin() ? 0 : std::size_t(it - gx_.begin()) - 1;
        const double base = gcum_[i];
        return base + num::integrate([this](double y) { return g_eval(y).g; },
                                     gx_[i], x, 1e-14);
      }
      case Kind::table: {
        if (x > tx_.back()) throw DomainError("table reward: x beyond sampled range");
        auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
        const std::size_t i = it == tx_.begin() ? 0 : std::size_t(it - tx_.begin()) - 1;
        const std::size_t j = std::min(i, tx_.size() - 2);
        return tcum_[j] + spline_segment_integral(j, x);
      }
    }
    throw std::logic_error("unreachable");
  }

  // reward of an instantaneous push from `from` down to `to`
  double lump_reward(double from, double to) const {
    if (!(from >= to && to >= 0.0))
      throw InvalidPush("lump_reward requires from >= to >= 0");
    if (from == to) return 0.0;
    return G_eval(from) - G_eval(to);
  }

  // heuristic check of g(z) = o(e^{phi z}): g(10k/phi) e^{-10k} must decrease
  // in k = 1..5
  bool growth_ok(double phi) const {
    if (kind_ == Kind::table) return true;  // compact support, nothing to check
    double prev = 0.0;
    for (int k = 1; k <= 5; ++k) {
      const double zk = 10.0 * k / phi;
      const double v = g_eval(zk).g * std::exp(-10.0 * k);
      if (k > 1 && v >= prev) return false;
      prev = v;
    }
    return true;
  }

 private:
  RewardFunction() = default;

  static double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
  }

  static void horner3(const std::vector<double>& c, double x, double& p,
                      double& p1, double& p2) {
    p = 0.0;
    p1 = 0.0;
    p2 = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) {
      p2 = p2 * x + 2.0 * p1;
      p1 = p1 * x + p;
      p = p * x + c[i];
    }
  }

  void build_antiderivative_table() {
    gx_.clear();
    gcum_.clear();
    gx_.push_back(0.0);
    const auto push_range = [this](double to, double step) {
      for (double x = gx_.back() + step; x < to + 0.5 * step; x += step)
        gx_.push_back(std::min(x, to));
    };
    push_range(16.0, 1.0 / 32);
    push_range(128.0, 0.25);
    push_range(1024.0, 2.0);
    gcum_.resize(gx_.size());
    gcum_[0] = 0.0;
    for (std::size_t i = 1; i < gx_.size(); ++i)
      gcum_[i] = gcum_[i - 1] +
                 num::integrate([this](double y) { return g_eval(y).g; },
                                gx_[i - 1], gx_[i], 1e-14);
  }

  void build_spline() {
    const std::size_t n = tx_.size();
    ty2_.assign(n, 0.0);
    std::vector<double> u(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double sig = (tx_[i] - tx_[i - 1]) / (tx_[i + 1] - tx_[i - 1]);
      const double p = sig * ty2_[i - 1] + 2.0;
      ty2_[i] = (sig - 1.0) / p;
      u[i] = (tg_[i + 1] - tg_[i]) / (tx_[i + 1] - tx_[i]) -
             (tg_[i] - tg_[i - 1]) / (tx_[i] - tx_[i - 1]);
      u[i] = (6.0 * u[i] / (tx_[i + 1] - tx_[i - 1]) - sig * u[i - 1]) / p;
    }
    for (std::size_t i = n - 1; i-- > 0;) ty2_[i] = ty2_[i] * ty2_[i + 1] + u[i];
    tcum_.assign(n - 1, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      tcum_[i] = acc;
      acc += spline_segment_integral(i, tx_[i + 1]);
    }
  }

  GTriple spline_eval(double x) const {
    if (x < tx_.front() || x > tx_.back())
      throw DomainError("table reward: x beyond sampled range");
    auto it = std::upper_bound(tx_.begin(), tx_.end(), x);
    const std::size_t i =
        std::min(it == tx_.begin() ? std::size_t(0) : std::size_t(it - tx_.begin()) - 1,
                 tx_.size() - 2);
    const double h = tx_[i + 1] - tx_[i];
    const double a = (tx_[i + 1] - x) / h, b = 1.0 - a;
    const double y = a * tg_[i] + b * tg_[i + 1] +
                     ((a * a * a - a) * ty2_[i] + (b * b * b - b) * ty2_[i + 1]) * h * h / 6.0;
    const double y1 = (tg_[i + 1] - tg_[i]) / h -
                      (3.0 * a * a - 1.0) / 6.0 * h * ty2_[i] +
                      (3.0 * b * b - 1.0) / 6.0 * h * ty2_[i + 1];
    const double y2 = a * ty2_[i] + b * ty2_[i + 1];
    return {y, y1, y2};
  }

  // int_{tx_[i]}^{x} of the spline on segment i
  double spline_segment_integral(std::size_t i, double x) const {
    const double h = tx_[i + 1] - tx_[i];
    const double b = (x - tx_[i]) / h, a = 1.0 - b;
    const double a2 = a * a, b2 = b * b;
    // antiderivative of the cubic-spline segment, zero at x = tx_[i]
    return h * (tg_[i] * (1.0 - a2) / 2.0 + tg_[i + 1] * b2 / 2.0) +
           h * h * h *
               (ty2_[i] * (-(a2 * a2 - 1.0) / 4.0 + (a2 - 1.0) / 2.0) / 6.0 +
                ty2_[i + 1] * (b2 * b2 / 4.0 - b2 / 2.0) / 6.0);
  }

  Kind kind_ = Kind::power;
  double alpha_ = 1.0, beta_ = 1.0;
  std::vector<double> num_, den_;
  std::vector<double> gx_, gcum_;            // rational: antiderivative nodes
  std::vector<double> tx_, tg_, ty2_, tcum_;  // table: spline data
};

}  // namespace barropt
