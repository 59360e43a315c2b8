#pragma once

// Small numeric toolkit: bracketed root finding, golden-section maximization,
// adaptive Simpson quadrature, Gauss-Legendre / Gauss-Laguerre rules.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "barropt/errors.hpp"

namespace barropt::num {

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> xs(n);
  if (n == 1) {
    xs[0] = a;
    return xs;
  }
  const double h = (b - a) / double(n - 1);
  for (std::size_t i = 0; i < n; ++i) xs[i] = a + h * double(i);
  xs.back() = b;
  return xs;
}

// Bisection on a sign change of f over [lo, hi], to a relative width xtol,
// followed by one Newton polish step when df is supplied.
template <class F>
double bisect_root(F&& f, double lo, double hi, double xtol = 1e-14,
                   const std::function<double(double)>& df = {}) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw ConvergenceFailure("bisect_root: no sign change in bracket");
  for (int it = 0; it < 200 && (hi - lo) > xtol * std::max(1.0, std::min(std::fabs(lo), std::fabs(hi))); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  if (df) {
    const double d = df(x);
    if (d != 0.0) {
      const double step = f(x) / d;
      if (x - step > lo && x - step < hi) x -= step;
    }
  }
  return x;
}

// Bisection on a boolean predicate with a false -> true transition over
// [lo, hi]. Returns the left edge of the true side, bracketed to xtol.
template <class P>
double bisect_predicate(P&& pred, double lo, double hi, double xtol = 1e-9) {
  for (int it = 0; it < 200 && (hi - lo) > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// Golden-section maximization on [a, b]; returns the abscissa of the maximum.
template <class F>
double golden_max(F&& f, double a, double b, double xtol = 1e-10) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && (b - a) > xtol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

namespace detail {

template <class F>
double simpson_step(F& f, double a, double m, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson on [a, b] with absolute tolerance tol.
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

struct Quadrature {
  std::vector<double> x, w;
};

// Gauss-Legendre nodes/weights on [-1, 1] by Newton on P_n.
inline Quadrature make_gauss_legendre(int n) {
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    q.x[i] = -z;
    q.x[n - 1 - i] = z;
    q.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    q.w[n - 1 - i] = q.w[i];
  }
  return q;
}

// Gauss-Laguerre nodes/weights for weight e^{-x} on [0, inf).
inline Quadrature make_gauss_laguerre(int n) {
  Quadrature q;
  q.x.resize(n);
  q.w.resize(n);
  double z = 0.0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * n);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * n);
    } else {
      const double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - q.x[i - 2]);
    }
    double pp = 0.0, p1 = 0.0;
    int settled = 0;
    for (int it = 0; it < 200 && settled < 3; ++it) {
      double p0 = 1.0;
      p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0 - z) * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (p0 - p1) / z;
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15 * z) ++settled;
    }
    q.x[i] = z;
    q.w[i] = -1.0 / (pp * n * p1);
  }
  return q;
}

inline const Quadrature& gauss_legendre(int n) {
  static std::map<int, Quadrature> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

inline const Quadrature& gauss_laguerre(int n) {
  static std::map<int, Quadrature> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_laguerre(n)).first;
  return it->second;
}

// Order-stable pairwise summation.
inline double pairwise_sum(const double* p, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace barropt::num
