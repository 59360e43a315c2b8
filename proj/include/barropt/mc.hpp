#pragma once

// Monte Carlo oracle for the controlled process under a barrier strategy.
// Estimates the expected discounted reward independently of the scale-function
// formulas: only the model parameters, g, G and the barrier levels enter.
//
// Scheme per step (Brownian part): exact Gaussian increment for the free
// motion; reflection at the active odd barrier through the exact in-step
// maximum of the Brownian bridge (so the local-time increment carries no
// O(sqrt(dt)) discretization bias); crossings of the absorbing levels
// (b_{2k}, and 0 for ruin) by endpoint sign change plus an optional
// Brownian-bridge hitting correction, on by default. Hitting b_{2k} pushes
// the process to b_{2k-1} and pays the lump G(b_{2k}) - G(b_{2k-1}), matching
// the controlled-process construction. Jump models (one-barrier only) add
// per-step compound-Poisson thinning.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/model.hpp"
#include "barropt/numeric.hpp"
#include "barropt/reward.hpp"
#include "barropt/rng.hpp"

namespace barropt {

struct SimConfig {
  long n_paths = 100000;
  double dt = 1e-4;
  double horizon = 200.0;
  std::uint64_t seed = 1;
  double x0 = 0.0;
  bool antithetic = false;
  int threads = 1;
  bool bridge_hit = true;        // Brownian-bridge hitting correction
  bool exact_reflection = true;  // in-step-maximum reflection
};

struct SimEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  long n_ruined = 0;
  long n_paths = 0;
  double truncation_bound = 0.0;  // e^{-qT} tail bound for surviving paths
};

struct PathRow {
  long path;
  double t, x, l, reward;  // reward = cumulative discounted reward
  int regime;
};

namespace detail {

struct SimPlan {
  double mu, sigma, q, dt, sqdt, s2dt, horizon;
  long n_steps;
  bool bridge_hit, exact_reflection;
  bool has_jumps;
  double lambda = 0.0;
  std::vector<double> jump_cum_p, jump_alpha;
  std::vector<double> odd, even, g_odd;  // per regime k: barriers and g(b_odd)
  std::vector<double> lump_at_switch;    // k -> G(even_k) - G(odd_{k-1})
  double x0, init_lump, init_l;
  int init_regime;
  bool init_ruin;
  bool ruin_at_zero_barrier = false;
  double disc_step, disc_half;
};

inline SimPlan make_plan(const LevyModel& m, const RewardFunction& r,
                         const std::vector<double>& barriers, const SimConfig& c) {
  if (barriers.empty() || barriers.size() % 2 == 0)
    throw InvalidBarriers("simulate: barrier set must have odd length");
  for (std::size_t i = 1; i < barriers.size(); ++i)
    if (!(barriers[i] > barriers[i - 1]))
      throw InvalidBarriers("simulate: barriers must increase strictly");
  if (!(barriers.front() >= 0.0)) throw InvalidBarriers("simulate: barriers must be >= 0");
  if (m.has_jumps() && barriers.size() > 1)
    throw UnsupportedModel("simulate: jump models support one barrier only");
  if (!(c.dt > 0.0) || c.dt >= c.horizon)
    throw ConfigError("simulate: need 0 < dt < horizon");
  if (c.n_paths <= 0) throw ConfigError("simulate: n_paths must be positive");
  if (c.antithetic && c.n_paths % 2 != 0)
    throw ConfigError("simulate: antithetic pairing needs an even n_paths");
  if (c.x0 < 0.0) throw ConfigError("simulate: x0 must be >= 0");

  SimPlan p;
  p.mu = m.mu();
  p.sigma = m.sigma();
  p.q = m.q();
  p.dt = c.dt;
  p.sqdt = std::sqrt(c.dt) * m.sigma();
  p.s2dt = m.sigma() * m.sigma() * c.dt;
  p.horizon = c.horizon;
  p.n_steps = long(c.horizon / c.dt);
  p.bridge_hit = c.bridge_hit && m.sigma() > 0.0;
  p.exact_reflection = c.exact_reflection && m.sigma() > 0.0;
  p.has_jumps = m.has_jumps();
  if (p.has_jumps) {
    p.lambda = m.jumps().lambda;
    double acc = 0.0;
    for (const auto& ph : m.jumps().phases) {
      acc += ph.p;
      p.jump_cum_p.push_back(acc);
      p.jump_alpha.push_back(ph.alpha);
    }
    p.jump_cum_p.back() = 1.0;
  }
  const std::size_t nreg = (barriers.size() + 1) / 2;
  for (std::size_t k = 0; k < nreg; ++k) {
    p.odd.push_back(barriers[2 * k]);
    p.even.push_back(k == 0 ? 0.0 : barriers[2 * k - 1]);
    p.g_odd.push_back(r.g_eval(barriers[2 * k]).g);
  }
  p.lump_at_switch.assign(nreg, 0.0);
  for (std::size_t k = 1; k < nreg; ++k)
    p.lump_at_switch[k] = r.G_eval(p.even[k]) - r.G_eval(p.odd[k - 1]);

  // a reflecting barrier at the ruin boundary gives no time to collect:
  // for sigma > 0 the process leaves 0 downward instantly
  p.ruin_at_zero_barrier = p.odd[0] == 0.0 && m.sigma() > 0.0;

  // initial regime and lump
  p.x0 = c.x0;
  p.init_lump = 0.0;
  p.init_regime = int(nreg) - 1;
  p.init_ruin = false;
  if (c.x0 == 0.0 && m.sigma() > 0.0) {
    p.init_ruin = true;  // 0 is regular for (-inf, 0): immediate ruin
  } else if (c.x0 >= p.odd.back()) {
    p.init_lump = r.G_eval(c.x0) - r.G_eval(p.odd.back());
    p.x0 = p.odd.back();
  } else {
    for (std::size_t k = 0; k < nreg; ++k) {
      const double hi = k + 1 < nreg ? p.even[k + 1] : p.odd.back();
      if (c.x0 < p.odd[k]) {
        p.init_regime = int(k);
        break;
      }
      if (c.x0 <= hi) {  // inside push region k
        p.init_regime = int(k);
        p.init_lump = r.G_eval(c.x0) - r.G_eval(p.odd[k]);
        p.x0 = p.odd[k];
        break;
      }
    }
  }
  if (p.ruin_at_zero_barrier && p.init_regime == 0 && p.x0 == 0.0)
    p.init_ruin = true;
  p.init_l = c.x0 - p.x0;  // size of the initial control jump
  p.disc_step = std::exp(-p.q * p.dt);
  p.disc_half = std::exp(-0.5 * p.q * p.dt);
  return p;
}

struct PathResult {
  double total;
  bool ruined;
};

struct NullRecorder {
  void operator()(long, double, double, double, double, int) const {}
};

// One controlled path. `sign` flips the Gaussian draws for antithetic pairs.
template <class Recorder>
PathResult run_path(const SimPlan& p, RandomStream& rs, double sign, long path_id,
                    Recorder&& rec) {
  double total = p.init_lump;
  if (p.init_ruin) {
    rec(path_id, 0.0, 0.0, 0.0, total, 0);
    return {total, true};
  }
  double x = p.x0;
  double l = p.init_l;
  int reg = p.init_regime;
  double disc = 1.0;
  rec(path_id, 0.0, x, l, total, reg);

  const double mdt = p.mu * p.dt;
  for (long i = 0; i < p.n_steps; ++i) {
    const double xi = mdt + p.sqdt * (sign * rs.normal());
    // in-step maximum of the free increment path
    double m_step = xi > 0.0 ? xi : 0.0;
    const double btop = p.odd[std::size_t(reg)];
    if (p.exact_reflection) {
      const double gap = btop - x - m_step;
      if (!(gap > 0.0) || gap * gap < 20.0 * p.s2dt) {
        const double u = rs.uniform();
        m_step = 0.5 * (xi + std::sqrt(xi * xi - 2.0 * p.s2dt * std::log(u)));
      }
    }
    double xn = x + xi;
    double dl = x + m_step - btop;
    if (dl > 0.0) {
      total += disc * p.disc_half * p.g_odd[std::size_t(reg)] * dl;
      l += dl;
      xn = x + xi - dl;
    }
    // compound-Poisson jump (one-barrier jump models)
    if (p.has_jumps && rs.uniform() < p.lambda * p.dt) {
      const double u = rs.uniform();
      std::size_t j = 0;
      while (j + 1 < p.jump_cum_p.size() && u > p.jump_cum_p[j]) ++j;
      xn -= -std::log(rs.uniform()) / p.jump_alpha[j];
    }

    disc *= p.disc_step;

    // absorbing level of the current regime: even barrier, or 0 for ruin
    bool sub_hit = true;
    while (sub_hit) {
      sub_hit = false;
      const double lev = p.even[std::size_t(reg)];
      bool hit = xn <= lev;
      if (!hit && p.bridge_hit && x > lev && xn > lev) {
        const double prod = (x - lev) * (xn - lev);
        if (prod < 20.0 * p.s2dt &&
            rs.uniform() < std::exp(-2.0 * prod / p.s2dt))
          hit = true;  // the in-step minimum dipped to lev
      }
      if (!hit) break;
      if (reg == 0) {
        rec(path_id, (i + 1) * p.dt, std::min(xn, 0.0), l, total, reg);
        return {total, true};
      }
      // push from the touched even barrier down to the next odd one, then
      // map the post-touch displacement of the free increment onto the new
      // regime: upward displacement re-reflects at the restart barrier,
      // downward displacement survives below it
      const double disp = xn - lev;  // <= 0 endpoint hit, > 0 bridge hit
      total += disc * p.lump_at_switch[std::size_t(reg)];
      reg -= 1;
      const double bodd = p.odd[std::size_t(reg)];
      l += lev - bodd;
      if (reg == 0 && p.ruin_at_zero_barrier) {
        rec(path_id, (i + 1) * p.dt, 0.0, l, total, reg);
        return {total, true};
      }
      if (disp > 0.0) {
        total += disc * p.g_odd[std::size_t(reg)] * disp;
        l += disp;
        xn = bodd;
      } else {
        xn = bodd + disp;
      }
      x = lev;  // bridge-correction anchor for the cascaded check
      sub_hit = true;
    }
    x = xn;
    if ((i & 1023) == 0) rec(path_id, (i + 1) * p.dt, x, l, total, reg);
  }
  rec(path_id, p.n_steps * p.dt, x, l, total, reg);
  return {total, false};
}

}  // namespace detail

inline SimEstimate simulate_value(const LevyModel& m, const RewardFunction& r,
                                  const std::vector<double>& barriers,
                                  const SimConfig& cfg) {
  const auto plan = detail::make_plan(m, r, barriers, cfg);
  const long n = cfg.n_paths;
  std::vector<double> totals(static_cast<std::size_t>(n), 0.0);
  std::atomic<long> ruined{0}, survived{0};

  const int nthreads = std::max(1, cfg.threads);
  const auto worker = [&](int t) {
    long local_ruined = 0, local_survived = 0;
    for (long i = t; i < n; i += nthreads) {
      const std::uint64_t stream_id =
          cfg.antithetic ? std::uint64_t(i / 2) : std::uint64_t(i);
      const double sign = cfg.antithetic && (i % 2 == 1) ? -1.0 : 1.0;
      RandomStream rs(cfg.seed, stream_id);
      const auto res =
          detail::run_path(plan, rs, sign, i, detail::NullRecorder{});
      totals[std::size_t(i)] = res.total;
      if (res.ruined)
        ++local_ruined;
      else
        ++local_survived;
    }
    ruined += local_ruined;
    survived += local_survived;
  };
  if (nthreads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }

  SimEstimate est;
  est.n_paths = n;
  est.n_ruined = ruined.load();
  est.mean = num::pairwise_sum(totals) / double(n);

  // standard error over independent units (pairs when antithetic)
  if (cfg.antithetic) {
    std::vector<double> pairs(std::size_t(n / 2));
    for (long j = 0; j < n / 2; ++j)
      pairs[std::size_t(j)] =
          0.5 * (totals[std::size_t(2 * j)] + totals[std::size_t(2 * j + 1)]);
    double ss = 0.0;
    for (double v : pairs) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / double(pairs.size() - 1) / double(pairs.size()));
  } else {
    double ss = 0.0;
    for (double v : totals) ss += (v - est.mean) * (v - est.mean);
    est.stderr_ = std::sqrt(ss / double(n - 1) / double(n));
  }

  // tail bound: V <= g_max / Phi(q), and Phi >= Phi_Brownian (>= q/mu if
  // sigma = 0) since the jump part only lowers psi
  double gmax = 0.0;
  for (double x : num::linspace(0.0, barriers.back(), 512))
    gmax = std::max(gmax, r.g_eval(x).g);
  const double phi_lb =
      m.sigma() > 0.0
          ? (std::sqrt(m.mu() * m.mu() + 2.0 * m.q() * m.sigma() * m.sigma()) -
             m.mu()) /
                (m.sigma() * m.sigma())
          : m.q() / m.mu();
  est.truncation_bound = std::exp(-m.q() * cfg.horizon) * gmax / phi_lb *
                         double(survived.load()) / double(n);
  return est;
}

// Step-sampled traces of the first n_trace paths (same streams as
// simulate_value, so traced paths reproduce estimated ones).
inline std::vector<PathRow> simulate_paths(const LevyModel& m,
                                           const RewardFunction& r,
                                           const std::vector<double>& barriers,
                                           const SimConfig& cfg, long n_trace) {
  if (n_trace > cfg.n_paths)
    throw ConfigError("simulate_paths: n_trace must be <= n_paths");
  const auto plan = detail::make_plan(m, r, barriers, cfg);
  std::vector<PathRow> rows;
  for (long i = 0; i < n_trace; ++i) {
    const std::uint64_t stream_id =
        cfg.antithetic ? std::uint64_t(i / 2) : std::uint64_t(i);
    const double sign = cfg.antithetic && (i % 2 == 1) ? -1.0 : 1.0;
    RandomStream rs(cfg.seed, stream_id);
    detail::run_path(plan, rs, sign, i,
                     [&](long pid, double t, double x, double l, double rew,
                         int reg) { rows.push_back({pid, t, x, l, rew, reg}); });
  }
  return rows;
}

}  // namespace barropt
