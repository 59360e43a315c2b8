#pragma once

// Multibarrier solver for Brownian motion with drift.
//
// The recursive value structure lives in BarrierSet / ValueFunction. This
// module adds the auxiliary surface F(v, z; b), its boundary behaviour, the
// push-region drift (L - q)H, the crossing points c_{2k-1}, the maximizer
// curve z(v), the D-set infimum, and the barrier-extension loop.
//
// Level convention: `level` k means the barrier prefix b_1..b_{2k+1}; H and F
// below always refer to that truncated set.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/one_barrier.hpp"
#include "barropt/value_function.hpp"

namespace barropt {

// H(v; b_{2k+1} prefix) = G(v) - G(b_{2k+1}) + V(b_{2k+1}), v >= b_{2k+1}
inline double h_eval(const ScaleFunctions&, const RewardFunction& r,
                     const BarrierSet& b, std::size_t level, double v) {
  const double bodd = b.levels().at(2 * level);
  return r.G_eval(v) - r.G_eval(bodd) + b.value_at_odd(level);
}

// phi(x; b_{2k+1} prefix) on the open wait interval (b_{2k}, b_{2k+1}), k >= 1
inline double phi_eval(const ScaleFunctions& sf, const RewardFunction&,
                       const BarrierSet& b, std::size_t level, double x) {
  if (level < 1) throw OutOfRegime("phi is defined for k >= 1");
  const double lo = b.levels().at(2 * level - 1);
  const double hi = b.levels().at(2 * level);
  if (!(lo < x && x < hi))
    throw OutOfRegime("phi_eval: x outside the wait interval");
  const double u = x - lo;
  return b.h_const(level) * sf.z(u) + sf.w(u) * b.slope_const(level);
}

struct SurfacePoint {
  double value;   // F(v, z; b)
  double dz;      // dF/dz
};

// auxiliary surface F(v, z; b) = (g(z) - q H(v; b) W(z - v)) / W'(z - v)
// for b_{2k+1} <= v < z; dz per its closed-form derivative
inline SurfacePoint f_surface(const ScaleFunctions& sf, const RewardFunction& r,
                              const BarrierSet& b, std::size_t level, double v,
                              double z) {
  if (!(z > v)) throw InvalidPair("f_surface requires z > v");
  const double q = sf.model().q();
  const double hv = h_eval(sf, r, b, level, v);
  const double u = z - v;
  const double w = sf.w(u), w1 = sf.w1(u), w2 = sf.w2(u);
  const auto g = r.g_eval(z);
  const double f = (g.g - q * hv * w) / w1;
  const double df = (g.g1 - q * hv * w1 - w2 * f) / w1;
  return {f, df};
}

// boundary value F(v, v+; b) = sigma^2 g(v) / 2
inline double f_surface_boundary(const ScaleFunctions& sf, const RewardFunction& r,
                                 double v) {
  const double s = sf.model().sigma();
  return 0.5 * s * s * r.g_eval(v).g;
}

// (L - q)H(v; b_{2k+1} prefix) = sigma^2 g'(v)/2 + mu g(v) - q H(v; b),
// the generator drift of the push region; Brownian models only.
inline double gen_H(const ScaleFunctions& sf, const RewardFunction& r,
                    const BarrierSet& b, std::size_t level, double v) {
  const auto& m = sf.model();
  if (m.has_jumps())
    throw UnsupportedModel("gen_H: multibarrier analysis is Brownian-only");
  const auto g = r.g_eval(v);
  return 0.5 * m.sigma() * m.sigma() * g.g1 + m.mu() * g.g -
         m.q() * h_eval(sf, r, b, level, v);
}

// Smallest v > b_{2k-1} where (L - q)H(.; b_{2k-1} prefix) crosses from <= 0
// to > 0, refined by bisection. NoSignChange when the drift stays nonpositive
// on (b_{2k-1}, U]; that signals algorithm termination to the caller.
inline double find_c(const ScaleFunctions& sf, const RewardFunction& r,
                     const BarrierSet& b, std::size_t level, double upper,
                     int grid_n = 2001) {
  const double lo = b.levels().at(2 * level);
  const auto gh = [&](double v) { return gen_H(sf, r, b, level, v); };
  const auto vs = num::linspace(lo + 1e-6 * (1.0 + lo), upper, std::size_t(grid_n));
  double prev = gh(vs[0]);
  for (std::size_t i = 1; i < vs.size(); ++i) {
    const double cur = gh(vs[i]);
    if (prev <= 0.0 && cur > 0.0)
      return num::bisect_root(gh, vs[i - 1], vs[i], 1e-10);
    prev = cur;
  }
  throw NoSignChange("find_c: (L-q)H <= 0 on the whole interval");
}

struct ZOfV {
  double z;        // largest global maximizer, or v itself
  double fmax;     // F(v, z) at the maximizer (boundary value when z = v)
  bool interior;   // true when the interior maximum attains the supremum
};

// Largest global maximizer of z -> F(v, z; b) over (v, U], against the
// boundary value sigma^2 g(v)/2. Grid + golden refinement, ties resolved to
// the largest abscissa, mirroring find_bstar.
inline ZOfV z_of_v(const ScaleFunctions& sf, const RewardFunction& r,
                   const BarrierSet& b, std::size_t level, double v, double upper,
                   int grid_n = 4001) {
  const double eps = 1e-12 * (1.0 + v);
  if (upper <= v + 2.0 * eps) throw UnboundedSearch("z_of_v: empty search interval");
  const auto fz = [&](double z) { return f_surface(sf, r, b, level, v, z).value; };

  auto zs = num::linspace(v + eps, upper, std::size_t(grid_n));
  std::vector<double> fs(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) fs[i] = fz(zs[i]);

  const auto fdz = [&](double z) { return f_surface(sf, r, b, level, v, z).dz; };
  double zbest = zs[0], fbest = -std::numeric_limits<double>::infinity();
  const std::size_t n = zs.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || fs[i] >= fs[i - 1];
    const bool right_ok = i + 1 == n || fs[i] >= fs[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double lo = zs[i == 0 ? 0 : i - 1];
    const double hi = zs[i + 1 >= n ? n - 1 : i + 1];
    double zt = lo == hi ? lo : num::golden_max(fz, lo, hi, 1e-10);
    // pin interior tops on the analytic dF/dz sign change
    const double h = 1e-6 * (1.0 + zt);
    if (zt - h > lo && zt + h < hi && fdz(zt - h) > 0.0 && fdz(zt + h) < 0.0)
      zt = num::bisect_root(fdz, zt - h, zt + h, 1e-15);
    const double ft = fz(zt);
    if (ft > fbest + 1e-9 * std::max(1.0, std::fabs(ft)))
      fbest = ft, zbest = zt;
    else if (ft >= fbest - 1e-9 * std::max(1.0, std::fabs(fbest)))
      zbest = std::max(zbest, zt);
  }

  // the admissible rewards make F(v, .) fall below the boundary value far
  // out; a best point sitting on the right edge with positive slope means
  // the search interval truncated the maximizer
  if (zbest >= zs[n - 2] && fdz(zbest) > 0.0)
    throw UnboundedSearch("z_of_v: surface still rising at the search upper");

  const double bound = f_surface_boundary(sf, r, v);
  const bool interior = fbest >= bound - 1e-9 * std::max(1.0, std::fabs(bound)) &&
                        zbest - v > 1e-7 * (1.0 + v);
  if (!interior) return {v, bound, false};
  return {zbest, fbest, true};
}

enum class StopReason { condition_ineq1, condition_ineq2, max_barriers };

inline const char* stop_reason_name(StopReason s) {
  switch (s) {
    case StopReason::condition_ineq1: return "condition_ineq1";
    case StopReason::condition_ineq2: return "condition_ineq2";
    case StopReason::max_barriers: return "max_barriers";
  }
  return "?";
}

struct TraceRow {
  std::string stage;
  int k;
  double v, z, f, gen_h;
};

using TraceSink = std::function<void(const TraceRow&)>;

struct NextPair {
  double b_even, b_odd;  // (b_{2k}, b_{2k+1})
  double f_match;        // F(b_{2k}, b_{2k+1}; prefix)
};

// b_{2k} = inf D_{2k-1}, b_{2k+1} = z(b_{2k}): grid scan of the membership
// predicate on [b_{2k-1}, c_{2k-1}], then predicate bisection when the
// bracket is clean (false left, true right), else the finest-grid point.
// Verifies the matching condition F(v,v) = F(v,z(v)) at the returned pair.
inline NextPair next_pair(const ScaleFunctions& sf, const RewardFunction& r,
                          const BarrierSet& b, std::size_t level, double c_point,
                          double upper, int grid_n = 2001,
                          const TraceSink& trace = {}) {
  const double lo = b.levels().at(2 * level);
  const auto in_d = [&](double v) {
    return z_of_v(sf, r, b, level, v, upper).interior;
  };

  const auto vs = num::linspace(lo, c_point, std::size_t(grid_n));
  std::optional<std::size_t> hit;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto zv = z_of_v(sf, r, b, level, vs[i], upper);
    if (trace) trace({"zscan", int(level) + 1, vs[i], zv.z, zv.fmax, 0.0});
    if (zv.interior) {
      hit = i;
      break;
    }
  }
  if (!hit)
    throw EmptyD("next_pair: no grid point lies in D; the grid scan found no "
                 "interior maximizer up to c");

  double beven;
  if (*hit == 0) {
    beven = vs[0];
  } else if (!in_d(vs[*hit - 1])) {
    beven = num::bisect_predicate(in_d, vs[*hit - 1], vs[*hit], 1e-9);
  } else {
    beven = vs[*hit];  // non-monotone bracket: fall back to the grid point
  }

  const auto zb = z_of_v(sf, r, b, level, beven, upper);
  if (!zb.interior)
    throw EmptyD("next_pair: membership lost at the refined infimum");
  const double boundary = f_surface_boundary(sf, r, beven);
  const double scale = std::max(1.0, std::fabs(boundary));
  if (std::fabs(zb.fmax - boundary) > 1e-6 * scale)
    throw MatchingFailure("next_pair: F(v,v) != F(v,z(v)) at the D-set infimum");
  return {beven, zb.z, zb.fmax};
}

struct MultibarrierOptions {
  int max_barriers = 21;   // odd cap on the barrier count
  double upper = 0.0;      // 0 = automatic
  OneBarrierOptions one_barrier;
};

struct MultibarrierSolution {
  std::vector<double> barriers;
  std::vector<double> c_points;
  StopReason stopped_reason = StopReason::condition_ineq1;
  bool partial = false;  // true when max_barriers cut the loop
  std::size_t n = 0;     // number of accepted pairs
  double search_upper = 0.0;
  OneBarrierSolution one_barrier;
  std::vector<std::string> warnings;
};

namespace detail {

// (L - q)H <= slack on [from, U]?
inline bool gen_h_nonpositive(const ScaleFunctions& sf, const RewardFunction& r,
                              const BarrierSet& b, std::size_t level, double from,
                              double upper, int grid_n, const TraceSink& trace,
                              int k_label) {
  const auto vs = num::linspace(from, upper, std::size_t(grid_n));
  std::vector<double> gh(vs.size());
  double amax = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    gh[i] = gen_H(sf, r, b, level, vs[i]);
    amax = std::max(amax, std::fabs(gh[i]));
    if (trace) trace({"genH", k_label, vs[i], 0.0, 0.0, gh[i]});
  }
  const double slack = 1e-7 * (1.0 + amax);
  for (double v : gh)
    if (v > slack) return false;
  return true;
}

// Prop 4.5 shortcut: z -> F(b_{2k}, z) non-increasing beyond b_{2k+1}
inline bool f_tail_nonincreasing(const ScaleFunctions& sf, const RewardFunction& r,
                                 const BarrierSet& b, std::size_t level,
                                 double beven, double bodd, double upper,
                                 int grid_n = 2001) {
  const auto zs = num::linspace(bodd, upper, std::size_t(grid_n));
  double prev = f_surface(sf, r, b, level, beven, zs[0]).value;
  for (std::size_t i = 1; i < zs.size(); ++i) {
    const double cur = f_surface(sf, r, b, level, beven, zs[i]).value;
    if (cur > prev + 1e-9 * (1.0 + std::fabs(prev))) return false;
    prev = cur;
  }
  return true;
}

}  // namespace detail

// Algorithm: b_1 from the one-barrier threshold; then repeatedly stop if
// (L - q)H <= 0 beyond the top barrier, else locate c, extend by next_pair.
inline MultibarrierSolution solve(const ScaleFunctions& sf, const RewardFunction& r,
                                  MultibarrierOptions opts = {},
                                  const TraceSink& trace = {}) {
  if (sf.model().has_jumps())
    throw UnsupportedModel("solve: multibarrier solver is Brownian-only");
  MultibarrierSolution sol;
  sol.one_barrier = find_bstar(sf, r, opts.one_barrier);
  if (sol.one_barrier.growth_warning)
    sol.warnings.push_back("reward growth check failed: g(z) e^{-Phi(q) z} is not "
                           "decreasing on the probe points; results may depend on U");
  const double upper =
      opts.upper > 0.0 ? opts.upper : sol.one_barrier.search_upper;
  sol.search_upper = upper;
  sol.barriers = {sol.one_barrier.bstar};

  // Remark-4.2-style degeneracy probe: (L - q)g vanishing on an interval
  {
    const auto& m = sf.model();
    const auto vs = num::linspace(sol.one_barrier.bstar, upper, 512);
    int run = 0, worst = 0;
    for (double v : vs) {
      const auto g = r.g_eval(v);
      const double lg =
          0.5 * m.sigma() * m.sigma() * g.g2 + m.mu() * g.g1 - m.q() * g.g;
      run = std::fabs(lg) < 1e-12 * (1.0 + std::fabs(g.g)) ? run + 1 : 0;
      worst = std::max(worst, run);
    }
    if (worst >= 3)
      sol.warnings.push_back("(L-q)g vanishes on an interval; the crossing points "
                             "of (L-q)H may be ill-defined there");
  }

  for (std::size_t k = 1;; ++k) {
    BarrierSet bset(sf, r, sol.barriers);
    const std::size_t level = k - 1;  // prefix b_1..b_{2k-1}
    const double btop = sol.barriers.back();
    if (detail::gen_h_nonpositive(sf, r, bset, level, btop, upper, 2001, trace,
                                  int(k))) {
      sol.stopped_reason =
          k == 1 ? StopReason::condition_ineq1 : StopReason::condition_ineq2;
      break;
    }
    if (int(sol.barriers.size()) + 2 > opts.max_barriers) {
      sol.stopped_reason = StopReason::max_barriers;
      sol.partial = true;
      sol.warnings.push_back("max_barriers reached; returning a partial set");
      break;
    }
    double c;
    try {
      c = find_c(sf, r, bset, level, upper);
    } catch (const NoSignChange&) {
      // positive drift exists but never crosses cleanly; treat as stopped
      sol.stopped_reason =
          k == 1 ? StopReason::condition_ineq1 : StopReason::condition_ineq2;
      sol.warnings.push_back("(L-q)H positive somewhere but without a clean "
                             "upward crossing; stopping");
      break;
    }
    sol.c_points.push_back(c);
    if (trace) trace({"c", int(k), c, 0.0, 0.0, 0.0});

    const auto pair = next_pair(sf, r, bset, level, c, upper, 2001, trace);
    sol.barriers.push_back(pair.b_even);
    sol.barriers.push_back(pair.b_odd);
    sol.n = (sol.barriers.size() - 1) / 2;
    if (trace)
      trace({"pair", int(k), pair.b_even, pair.b_odd, pair.f_match, 0.0});

    // probe, not assume: the drift must stay negative just right of the
    // accepted even barrier for the pair to be well defined
    {
      const double span = 0.1 * (pair.b_odd - pair.b_even);
      bool neg = true;
      for (int i = 1; i <= 32; ++i)
        if (gen_H(sf, r, bset, level, pair.b_even + span * i / 32.0) >= 0.0)
          neg = false;
      if (!neg)
        sol.warnings.push_back("(L-q)H is not negative just right of b_" +
                               std::to_string(2 * k) +
                               "; the accepted pair may be ill-posed");
    }

    // sufficient stopping condition: F(b_{2k}, .) non-increasing past b_{2k+1}
    if (detail::f_tail_nonincreasing(sf, r, bset, level, pair.b_even, pair.b_odd,
                                     upper)) {
      sol.stopped_reason = StopReason::condition_ineq2;
      break;
    }
  }
  sol.n = (sol.barriers.size() - 1) / 2;
  return sol;
}

// Piecewise value of the multibarrier strategy; bset need not be optimal.
inline ValueEval value_multibarrier(const ScaleFunctions& sf, const RewardFunction& r,
                                    const BarrierSet& b, double x) {
  return ValueFunction(sf, r, b)(x);
}

}  // namespace barropt
