#pragma once

// One-barrier threshold selection: the ratio F(u) = g(u)/W'(u), its largest
// global maximizer b* on [0, U], and the sufficient optimality condition
// (F non-increasing beyond b*).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/reward.hpp"
#include "barropt/scale.hpp"
#include "barropt/value_function.hpp"

namespace barropt {

struct FRatio {
  double value;  // F(u)
  double deriv;  // F'(u)
};

inline FRatio f_ratio(const ScaleFunctions& sf, const RewardFunction& r, double u) {
  const auto g = r.g_eval(u);
  const double w1 = sf.w1(u);
  const double f = g.g / w1;
  // F' = (g' W' - g W'') / W'^2, the expanded form of F (g'/g - W''/W')
  return {f, (g.g1 * w1 - g.g * sf.w2(u)) / (w1 * w1)};
}

struct GridPoint {
  double u, f, df;
};

struct OneBarrierOptions {
  double upper = 0.0;    // 0 = automatic: max(10 a*, 20 / Phi(q))
  int grid_n = 4001;
  double refine_tol = 1e-10;
  int max_doublings = 2;
};

struct OneBarrierSolution {
  double bstar = 0.0;
  double fmax = 0.0;
  bool decr_f1_holds = false;  // F' <= 0 on [b*, U] within slack
  double search_upper = 0.0;
  bool growth_warning = false;
  std::vector<GridPoint> diagnostics;
};

inline double default_search_upper(const ScaleFunctions& sf) {
  return std::max(10.0 * sf.a_star(), 20.0 / sf.phi());
}

// Largest global maximizer of F on [0, U]. The grid best and every grid-local
// top are refined by golden section; among refined maxima within 1e-9
// relative of the best, the largest abscissa wins (this realizes the sup in
// the threshold definition). U doubles up to max_doublings times while
// F(U) > 0.99 * current max; if it still does after that, the search is
// declared unbounded.
inline OneBarrierSolution find_bstar(const ScaleFunctions& sf, const RewardFunction& r,
                                     OneBarrierOptions opts = {}) {
  OneBarrierSolution sol;
  sol.growth_warning = !r.growth_ok(sf.phi());
  double upper = opts.upper > 0.0 ? opts.upper : default_search_upper(sf);

  const auto fv = [&](double u) { return f_ratio(sf, r, u).value; };

  std::vector<double> us, fs;
  for (int pass = 0;; ++pass) {
    us = num::linspace(0.0, upper, std::size_t(opts.grid_n));
    fs.resize(us.size());
    double fbest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < us.size(); ++i) {
      fs[i] = fv(us[i]);
      fbest = std::max(fbest, fs[i]);
    }
    if (fs.back() <= 0.99 * fbest || fbest <= 0.0) break;
    if (pass >= opts.max_doublings)
      throw UnboundedSearch("find_bstar: F still rising at U after doublings");
    upper *= 2.0;
  }
  sol.search_upper = upper;

  // refine every grid-local top; a golden pass bounds the maximum, then a
  // sign change of F' (analytic) pins interior tops to machine precision
  struct Top {
    double u, f;
  };
  std::vector<Top> tops;
  const std::size_t n = us.size();
  const auto fd = [&](double u) { return f_ratio(sf, r, u).deriv; };
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || fs[i] >= fs[i - 1];
    const bool right_ok = i + 1 == n || fs[i] >= fs[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double lo = us[i == 0 ? 0 : i - 1];
    const double hi = us[i + 1 >= n ? n - 1 : i + 1];
    double u = lo == hi ? lo : num::golden_max(fv, lo, hi, opts.refine_tol);
    const double h = std::max(1e-7, 10.0 * opts.refine_tol) * (1.0 + u);
    const double dlo = u - h > lo ? fd(u - h) : fd(lo);
    const double dhi = u + h < hi ? fd(u + h) : fd(hi);
    if (dlo > 0.0 && dhi < 0.0)
      u = num::bisect_root(fd, std::max(lo, u - h), std::min(hi, u + h), 1e-15);
    else if (i == 0 && fv(us[0]) >= fv(u))
      u = us[0];  // endpoint maximizer: snap exactly
    tops.push_back({u, fv(u)});
  }
  double fmax = -std::numeric_limits<double>::infinity();
  for (const auto& t : tops) fmax = std::max(fmax, t.f);
  double b = 0.0;
  for (const auto& t : tops)
    if (t.f >= fmax - 1e-9 * std::max(1.0, std::fabs(fmax))) b = std::max(b, t.u);
  sol.bstar = b;
  sol.fmax = fmax;

  sol.decr_f1_holds = true;
  sol.diagnostics.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto fr = f_ratio(sf, r, us[i]);
    sol.diagnostics.push_back({us[i], fr.value, fr.deriv});
    if (us[i] >= b && fr.deriv > 1e-9 * (1.0 + std::fabs(fr.value)))
      sol.decr_f1_holds = false;
  }
  return sol;
}

// Expected reward of the barrier strategy at level b, with derivatives
// (one-sided at x = b: the push side owns the point).
inline ValueEval value_one_barrier(const ScaleFunctions& sf, const RewardFunction& r,
                                   double b, double x) {
  return ValueFunction(sf, r, BarrierSet(sf, r, {b}))(x);
}

}  // namespace barropt
