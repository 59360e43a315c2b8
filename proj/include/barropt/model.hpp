#pragma once

// Spectrally negative Levy model: Brownian motion with drift plus an optional
// compound-Poisson jump part with hyperexponential (completely monotone)
// density nu(z) = lambda * sum_j p_j alpha_j e^{-alpha_j z}, z > 0.
//
// Laplace exponent, with the jump compensator absorbed into the drift:
//   psi(theta) = mu theta + sigma^2 theta^2 / 2
//              + lambda (sum_j p_j alpha_j / (alpha_j + theta) - 1)

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/numeric.hpp"

namespace barropt {

struct HyperExpPhase {
  double p;      // mixture weight
  double alpha;  // exponential rate
};

struct HyperExpJumps {
  double lambda = 0.0;  // jump intensity
  std::vector<HyperExpPhase> phases;
};

class LevyModel {
 public:
  LevyModel(double mu, double sigma, double q,
            std::optional<HyperExpJumps> jumps = std::nullopt)
      : mu_(mu), sigma_(sigma), q_(q), jumps_(std::move(jumps)) {
    if (!(q_ > 0.0)) throw InvalidModel("discount rate q must be > 0");
    if (!(sigma_ >= 0.0)) throw InvalidModel("sigma must be >= 0");
    if (!jumps_ && !(sigma_ > 0.0))
      throw InvalidModel("Brownian-with-drift model requires sigma > 0");
    if (sigma_ == 0.0 && !(mu_ > 0.0))
      throw InvalidModel("sigma = 0 requires mu > 0 (non-monotone paths)");
    if (jumps_) {
      const auto& j = *jumps_;
      if (!(j.lambda > 0.0)) throw InvalidModel("jump intensity must be > 0");
      if (j.phases.empty()) throw InvalidModel("jump part needs >= 1 phase");
      double psum = 0.0;
      for (const auto& ph : j.phases) {
        if (!(ph.p > 0.0)) throw InvalidModel("phase weights must be > 0");
        if (!(ph.alpha > 0.0)) throw InvalidModel("phase rates must be > 0");
        psum += ph.p;
      }
      if (std::fabs(psum - 1.0) > 1e-9)
        throw InvalidModel("phase weights must sum to 1");
      for (auto& ph : jumps_->phases) ph.p /= psum;
      auto rates = sorted_rates();
      for (std::size_t i = 1; i < rates.size(); ++i)
        if (rates[i] - rates[i - 1] <= 1e-9 * std::max(1.0, rates[i]))
          throw InvalidModel("phase rates must differ by >= 1e-9 relative");
    }
  }

  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double q() const { return q_; }
  bool has_jumps() const { return jumps_.has_value(); }
  bool brownian() const { return !jumps_; }
  const HyperExpJumps& jumps() const { return *jumps_; }

  // psi(theta); analytic off the poles {-alpha_j}.
  double laplace_exponent(double theta) const {
    double v = mu_ * theta + 0.5 * sigma_ * sigma_ * theta * theta;
    if (jumps_) {
      double s = 0.0;
      for (const auto& ph : jumps_->phases) s += ph.p * ph.alpha / (ph.alpha + theta);
      v += jumps_->lambda * (s - 1.0);
    }
    return v;
  }

  // psi'(theta)
  double laplace_exponent_d(double theta) const {
    double v = mu_ + sigma_ * sigma_ * theta;
    if (jumps_) {
      double s = 0.0;
      for (const auto& ph : jumps_->phases) {
        const double d = ph.alpha + theta;
        s += ph.p * ph.alpha / (d * d);
      }
      v -= jumps_->lambda * s;
    }
    return v;
  }

  // jump density nu(z), z > 0
  double jump_density(double z) const {
    if (!jumps_) return 0.0;
    double s = 0.0;
    for (const auto& ph : jumps_->phases) s += ph.p * ph.alpha * std::exp(-ph.alpha * z);
    return jumps_->lambda * s;
  }

  std::vector<double> sorted_rates() const {
    std::vector<double> r;
    if (jumps_)
      for (const auto& ph : jumps_->phases) r.push_back(ph.alpha);
    std::sort(r.begin(), r.end());
    return r;
  }

 private:
  double mu_, sigma_, q_;
  std::optional<HyperExpJumps> jumps_;
};

// All real roots of psi(theta) = q, ascending. For sigma > 0 with m phases
// there are m + 2 of them, exactly one positive; the negative ones interlace
// with the poles {-alpha_j}. For sigma = 0 (with mu > 0) there are m + 1.
// Brownian-with-drift: the pair {-zeta_1, Phi(q)} in closed form.
inline std::vector<double> psi_roots(const LevyModel& m) {
  const double q = m.q();
  if (m.brownian()) {
    const double s2 = m.sigma() * m.sigma();
    const double d = std::sqrt(m.mu() * m.mu() + 2.0 * q * s2);
    return {-(d + m.mu()) / s2, (d - m.mu()) / s2};
  }

  const auto f = [&](double t) { return m.laplace_exponent(t) - q; };
  const auto df = std::function<double(double)>(
      [&](double t) { return m.laplace_exponent_d(t); });

  std::vector<double> poles;  // ascending, all negative
  for (double a : m.sorted_rates()) poles.push_back(-a);
  std::sort(poles.begin(), poles.end());

  std::vector<std::pair<double, double>> brackets;
  const auto off = [](double p) { return 1e-12 * std::max(1.0, std::fabs(p)); };

  if (m.sigma() > 0.0) {
    // psi -> +inf to the left of the leftmost pole
    double lo = poles.front() - 1.0;
    int guard = 0;
    while (f(lo) < 0.0) {
      lo = poles.front() - 2.0 * (poles.front() - lo);
      if (++guard > 200) throw ConvergenceFailure("psi_roots: no left bracket");
    }
    brackets.emplace_back(lo, poles.front() - off(poles.front()));
  }
  for (std::size_t i = 0; i + 1 < poles.size(); ++i) {
    const double lo = poles[i] + off(poles[i]);
    const double hi = poles[i + 1] - off(poles[i + 1]);
    if (!(lo < hi)) throw DegenerateModel("psi_roots: interlacing bracket collapsed");
    brackets.emplace_back(lo, hi);
  }
  brackets.emplace_back(poles.back() + off(poles.back()), -1e-300);
  {
    double hi = 1.0;
    int guard = 0;
    while (m.laplace_exponent(hi) < q) {
      hi *= 2.0;
      if (++guard > 200) throw ConvergenceFailure("psi_roots: no positive bracket");
    }
    brackets.emplace_back(1e-300, hi);
  }

  std::vector<double> roots;
  for (auto [lo, hi] : brackets) {
    if ((f(lo) > 0) == (f(hi) > 0))
      throw ConvergenceFailure("psi_roots: bracket lost its sign change");
    roots.push_back(num::bisect_root(f, lo, hi, 1e-14, df));
  }
  std::sort(roots.begin(), roots.end());

  const std::size_t expect = m.jumps().phases.size() + (m.sigma() > 0.0 ? 2 : 1);
  if (roots.size() != expect)
    throw ConvergenceFailure("psi_roots: unexpected root count");
  for (double r : roots)
    if (std::fabs(m.laplace_exponent(r) - q) > 1e-10 * std::max(1.0, q))
      throw ConvergenceFailure("psi_roots: residual too large");
  return roots;
}

// Largest root Phi(q) of psi(theta) = q.
inline double phi_q(const LevyModel& m) {
  if (m.brownian()) {
    const double s2 = m.sigma() * m.sigma();
    return (std::sqrt(m.mu() * m.mu() + 2.0 * m.q() * s2) - m.mu()) / s2;
  }
  return psi_roots(m).back();
}

}  // namespace barropt
