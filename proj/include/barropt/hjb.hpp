#pragma once

// Numerical check of the HJB variational inequality
//   max{ (L - q)V, g - V' } <= 0  on (0, inf)
// for a piecewise-analytic candidate value function, plus smooth-pasting gaps
// at the barrier levels (C0 and C1 everywhere, C2 away from even barriers).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/model.hpp"
#include "barropt/numeric.hpp"
#include "barropt/value_function.hpp"

namespace barropt {

// local part: sigma^2 V''/2 + mu V' - q V
inline double apply_generator(const LevyModel& m, double v, double v1, double v2) {
  return 0.5 * m.sigma() * m.sigma() * v2 + m.mu() * v1 - m.q() * v;
}

// full generator for hyperexponential jump models. The jump integral is split
// at the kink z = x of the extended candidate (and at any interior kinks the
// caller declares, e.g. the candidate's pasting points): mapped Gauss-Legendre
// panels on [0, x] and a per-phase Gauss-Laguerre tail over (x, inf), where f
// runs over its extension below zero.
inline double apply_generator(const LevyModel& m,
                              const std::function<double(double)>& f, double x,
                              double v, double v1, double v2, int nodes = 64,
                              const std::vector<double>& f_kinks = {}) {
  double val = apply_generator(m, v, v1, v2);
  if (!m.has_jumps()) return val;
  const auto& leg = num::gauss_legendre(nodes);
  const auto& lag = num::gauss_laguerre(nodes);
  const double lambda = m.jumps().lambda;

  // panel edges in z: kinks of f(x - z) on (0, x), then a resolution cap
  std::vector<double> edges{0.0, x};
  for (double k : f_kinks)
    if (x - k > 0.0 && x - k < x) edges.push_back(x - k);
  std::sort(edges.begin(), edges.end());

  for (const auto& ph : m.jumps().phases) {
    double acc = 0.0;
    if (x > 0.0) {
      for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double width = edges[e + 1] - edges[e];
        if (!(width > 0.0)) continue;
        const int panels = std::max(1, int(std::ceil(ph.alpha * width / 30.0)));
        for (int p = 0; p < panels; ++p) {
          const double lo = edges[e] + width * p / panels;
          const double hi = edges[e] + width * (p + 1) / panels;
          const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
          double s = 0.0;
          for (int i = 0; i < nodes; ++i) {
            const double z = mid + half * leg.x[i];
            s += leg.w[i] * f(x - z) * std::exp(-ph.alpha * z);
          }
          acc += half * ph.alpha * s;
        }
      }
    }
    double tail = 0.0;
    for (int i = 0; i < nodes; ++i) tail += lag.w[i] * f(-lag.x[i] / ph.alpha);
    acc += std::exp(-ph.alpha * x) * tail;
    val += lambda * ph.p * acc;
  }
  val -= lambda * f(x);
  return val;
}

struct PastingGap {
  double barrier;
  bool even;            // C2 is not required at even barriers
  double v_gap, v1_gap, v2_gap;
  bool ok;
};

struct HjbGridSpec {
  std::size_t n = 10000;
  double hi = 0.0;       // 0 = automatic: max(3 b_last, 2 default search upper)
  double tol = 0.0;      // 0 = automatic: 1e-7 (1 + max |V|)
};

struct HjbReport {
  std::vector<double> grid;
  std::vector<double> residual_gen;   // (L - q)V
  std::vector<double> residual_grad;  // g - V'
  double max_violation_gen = 0.0;
  double max_violation_grad = 0.0;
  std::vector<PastingGap> pasting;
  double tol = 0.0;
  bool pass = false;
  std::vector<std::string> warnings;
};

inline HjbReport check_hjb(const ValueFunction& vf, HjbGridSpec spec = {}) {
  HjbReport rep;
  const auto& m = vf.scale().model();
  const auto& pts = vf.pasting_points();
  const double hi = spec.hi > 0.0
                        ? spec.hi
                        : std::max(3.0 * pts.back(),
                                   2.0 * (std::max(10.0 * vf.scale().a_star(),
                                                   20.0 / vf.scale().phi())));
  rep.grid = num::linspace(0.0, hi, spec.n);

  double vmax = 0.0;
  std::vector<ValueEval> evals(rep.grid.size());
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    evals[i] = vf(rep.grid[i]);
    vmax = std::max(vmax, std::fabs(evals[i].v));
  }
  rep.tol = spec.tol > 0.0 ? spec.tol : 1e-7 * (1.0 + vmax);

  const auto near_pasting = [&](double x) {
    for (double b : pts)
      if (std::fabs(x - b) <= 1e-6) return true;
    return false;
  };
  const std::function<double(double)> fval = [&](double y) { return vf(y).v; };

  rep.residual_gen.assign(rep.grid.size(), 0.0);
  rep.residual_grad.assign(rep.grid.size(), 0.0);
  rep.max_violation_gen = -std::numeric_limits<double>::infinity();
  rep.max_violation_grad = -std::numeric_limits<double>::infinity();
  double quad_mismatch = 0.0;
  for (std::size_t i = 0; i < rep.grid.size(); ++i) {
    const double x = rep.grid[i];
    const auto& e = evals[i];
    double gen;
    if (m.has_jumps()) {
      gen = apply_generator(m, fval, x, e.v, e.v1, e.v2, 64, pts);
      const double gen128 = apply_generator(m, fval, x, e.v, e.v1, e.v2, 128, pts);
      quad_mismatch = std::max(
          quad_mismatch, std::fabs(gen - gen128) / (1.0 + std::fabs(gen)));
    } else {
      gen = apply_generator(m, e.v, e.v1, e.v2);
    }
    rep.residual_gen[i] = gen;
    rep.residual_grad[i] = vf.reward().g_eval(x).g - e.v1;
    if (!near_pasting(x))
      rep.max_violation_gen = std::max(rep.max_violation_gen, gen);
    rep.max_violation_grad = std::max(rep.max_violation_grad, rep.residual_grad[i]);
  }
  if (quad_mismatch > 1e-7)
    rep.warnings.push_back("QuadratureWarning: 64- vs 128-node generator values "
                           "disagree beyond 1e-7 relative");

  bool pasting_ok = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    PastingGap gap;
    gap.barrier = pts[i];
    gap.even = (i % 2 == 1);  // b_2, b_4, ...
    if (pts[i] == 0.0) {
      // a threshold at the ruin boundary has no interior left side
      gap.v_gap = gap.v1_gap = gap.v2_gap = 0.0;
      gap.ok = true;
    } else {
      const auto l = vf.eval_side(pts[i], -1);
      const auto r = vf.eval_side(pts[i], +1);
      gap.v_gap = std::fabs(l.v - r.v);
      gap.v1_gap = std::fabs(l.v1 - r.v1);
      gap.v2_gap = std::fabs(l.v2 - r.v2);
      gap.ok = gap.v_gap <= 1e-9 * (1.0 + std::fabs(l.v)) &&
               gap.v1_gap <= 1e-8 * (1.0 + std::fabs(l.v1)) &&
               (gap.even || gap.v2_gap <= 1e-8 * (1.0 + std::fabs(l.v2)));
    }
    pasting_ok = pasting_ok && gap.ok;
    rep.pasting.push_back(gap);
  }

  rep.pass = rep.max_violation_gen <= rep.tol &&
             rep.max_violation_grad <= rep.tol && pasting_ok;
  return rep;
}

}  // namespace barropt
