#pragma once

// BarrierSet: a strictly increasing odd-length set of levels b_1 < ... <
// b_{2n+1} together with the per-level constants of the recursive value
// structure. ValueFunction: the piecewise-analytic expected reward V_b of the
// multibarrier strategy (n = 0 gives the one-barrier case), with one-sided
// derivatives at the pasting points.
//
// Pieces, low to high:
//   [0, b_1)            g(b_1)/W'(b_1) * W(x)
//   [b_1, b_2]          H(x; b_1)                       (push)
//   (b_{2k}, b_{2k+1})  H_k Z(x - b_{2k}) + F_k W(x - b_{2k})   (wait)
//   [b_{2k+1}, b_{2k+2}]  G(x) - G(b_{2k+1}) + V(b_{2k+1})      (push)
// where H_k = H(b_{2k}; b_{2k-1} set) and F_k is the slope constant
// F(b_{2k}, b_{2k+1}; previous set) of the auxiliary surface.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/reward.hpp"
#include "barropt/scale.hpp"

namespace barropt {

class BarrierSet {
 public:
  BarrierSet(const ScaleFunctions& sf, const RewardFunction& r,
             std::vector<double> levels)
      : levels_(std::move(levels)) {
    if (levels_.empty() || levels_.size() % 2 == 0)
      throw InvalidBarriers("barrier set must have odd length >= 1");
    if (!(levels_.front() >= 0.0)) throw InvalidBarriers("barriers must be >= 0");
    for (std::size_t i = 1; i < levels_.size(); ++i)
      if (!(levels_[i] > levels_[i - 1]))
        throw InvalidBarriers("barriers must increase strictly");
    rebuild(sf, r);
  }

  std::size_t n_pairs() const { return (levels_.size() - 1) / 2; }
  const std::vector<double>& levels() const { return levels_; }
  double b(std::size_t i) const { return levels_.at(i - 1); }  // 1-based b_i
  double top() const { return levels_.back(); }

  // constants for level k (1-based pair index)
  double h_const(std::size_t k) const { return hk_.at(k - 1); }
  double slope_const(std::size_t k) const { return fk_.at(k - 1); }
  // V(b_{2k+1}), k = 0..n
  double value_at_odd(std::size_t k) const { return vodd_.at(k); }
  double below_coeff() const { return below_coeff_; }

 private:
  void rebuild(const ScaleFunctions& sf, const RewardFunction& r) {
    const std::size_t n = n_pairs();
    const double b1 = levels_[0];
    const double w1b1 = sf.w1(b1);
    below_coeff_ = r.g_eval(b1).g / w1b1;
    vodd_.assign(n + 1, 0.0);
    vodd_[0] = below_coeff_ * sf.w(b1);
    hk_.assign(n, 0.0);
    fk_.assign(n, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      const double b2k = levels_[2 * k - 1];
      const double b2k1 = levels_[2 * k];
      const double bprev = levels_[2 * k - 2];
      const double gap = b2k1 - b2k;
      hk_[k - 1] = r.G_eval(b2k) - r.G_eval(bprev) + vodd_[k - 1];
      fk_[k - 1] =
          (r.g_eval(b2k1).g - sf.model().q() * hk_[k - 1] * sf.w(gap)) / sf.w1(gap);
      vodd_[k] = hk_[k - 1] * sf.z(gap) + sf.w(gap) * fk_[k - 1];
    }
  }

  std::vector<double> levels_;
  std::vector<double> hk_, fk_, vodd_;
  double below_coeff_ = 0.0;
};

enum class Regime { below, push, wait };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::below: return "below";
    case Regime::push: return "push";
    case Regime::wait: return "wait";
  }
  return "?";
}

struct ValueEval {
  double v, v1, v2;
  Regime regime;
  int level;  // pair index k of the piece (0 for below / first push)
};

class ValueFunction {
 public:
  ValueFunction(ScaleFunctions sf, RewardFunction r, BarrierSet b)
      : sf_(std::move(sf)), r_(std::move(r)), b_(std::move(b)) {}

  const BarrierSet& barriers() const { return b_; }
  const ScaleFunctions& scale() const { return sf_; }
  const RewardFunction& reward() const { return r_; }

  // natural-side evaluation: push pieces own their closed endpoints
  ValueEval operator()(double x) const { return eval_piece(piece_of(x, 0), x); }

  // one-sided evaluation, side = -1 (left limit) or +1 (right limit)
  ValueEval eval_side(double x, int side) const {
    return eval_piece(piece_of(x, side), x);
  }

  // pasting points b_1 .. b_{2n+1}
  const std::vector<double>& pasting_points() const { return b_.levels(); }

 private:
  // pieces: 0 = below, odd 2k+1 = push k, even 2k (k>=1) = wait k
  int piece_of(double x, int side) const {
    const auto& b = b_.levels();
    const std::size_t n = b_.n_pairs();
    if (x < b[0] || (x == b[0] && side < 0)) return 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double lo = b[2 * k];       // b_{2k+1}
      const double hi = b[2 * k + 1];   // b_{2k+2}
      if (x < hi || (x == hi && side <= 0)) {
        if (x > lo || (x == lo && side >= 0)) return int(2 * k + 1);  // push k
        return int(2 * k);  // wait k (or below when k = 0)
      }
    }
    const double lo = b[2 * n];
    if (x > lo || (x == lo && side >= 0)) return int(2 * n + 1);  // top push
    return int(2 * n);
  }

  ValueEval eval_piece(int piece, double x) const {
    if (x < 0.0) return {0.0, 0.0, 0.0, Regime::below, 0};
    if (piece == 0) {
      const double c = b_.below_coeff();
      return {c * sf_.w(x), c * sf_.w1(x), c * sf_.w2(x), Regime::below, 0};
    }
    const std::size_t k = std::size_t(piece) / 2;
    if (piece % 2 == 1) {  // push k
      const double bodd = b_.levels()[2 * k];
      const auto g = r_.g_eval(x);
      return {r_.G_eval(x) - r_.G_eval(bodd) + b_.value_at_odd(k), g.g, g.g1,
              Regime::push, int(k)};
    }
    // wait k, k >= 1
    const double beven = b_.levels()[2 * k - 1];
    const double hk = b_.h_const(k);
    const double fk = b_.slope_const(k);
    const double q = sf_.model().q();
    const double u = x - beven;
    return {hk * sf_.z(u) + fk * sf_.w(u), q * hk * sf_.w(u) + fk * sf_.w1(u),
            q * hk * sf_.w1(u) + fk * sf_.w2(u), Regime::wait, int(k)};
  }

  ScaleFunctions sf_;
  RewardFunction r_;
  BarrierSet b_;
};

}  // namespace barropt
