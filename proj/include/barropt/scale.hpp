#pragma once

// q-scale functions W^{(q)}, Z^{(q)} and their derivatives.
//
// Every supported model admits the exponential-mixture form
//   W^{(q)}(x) = sum_i e^{theta_i x} / psi'(theta_i),   x >= 0,
// over the real roots theta_i of psi = q (for Brownian motion with drift this
// is exactly the classical two-term closed form). W = 0 on (-inf, 0),
// Z = 1 + q int_0^x W, Z = 1 on (-inf, 0].

#include <cmath>
#include <vector>

#include "barropt/errors.hpp"
#include "barropt/model.hpp"
#include "barropt/numeric.hpp"

namespace barropt {

struct ExitProbabilities {
  double up;    // E_x[e^{-q tau_a^+}; tau_a^+ < tau_b^-]
  double down;  // E_x[e^{-q tau_b^-}; tau_b^- < tau_a^+]
};

class ScaleFunctions {
 public:
  explicit ScaleFunctions(const LevyModel& model)
      : model_(model), roots_(psi_roots(model)) {
    coeffs_.reserve(roots_.size());
    for (double r : roots_) coeffs_.push_back(1.0 / model_.laplace_exponent_d(r));
    phi_ = roots_.back();
    zeta1_ = model_.brownian() ? -roots_.front() : 0.0;
    sum_a_ = 0.0;
    z_const_ = 1.0;
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      sum_a_ += coeffs_[i];
      z_const_ -= model_.q() * coeffs_[i] / roots_[i];
    }
    if (model_.sigma() > 0.0) sum_a_ = 0.0;  // W(0+) = 0 exactly
    astar_ = compute_astar();
  }

  const LevyModel& model() const { return model_; }
  const std::vector<double>& roots() const { return roots_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double phi() const { return phi_; }

  /// zeta_1 of the Brownian-with-drift closed form; 0 for jump models.
  double zeta1() const { return zeta1_; }

  /// Unique minimizer of W' on [0, inf); 0 when W''(0+) >= 0.
  double a_star() const { return astar_; }

  double w(double x) const {
    if (x < 0.0) return 0.0;
    if (phi_ * x > kFactorCut) {
      double s = 0.0;
      for (std::size_t i = 0; i < roots_.size(); ++i)
        s += coeffs_[i] * std::exp((roots_[i] - phi_) * x);
      return std::exp(phi_ * x) * s;
    }
    // expm1 keeps W accurate near 0 where the plain sum cancels
    double s = sum_a_;
    for (std::size_t i = 0; i < roots_.size(); ++i)
      s += coeffs_[i] * std::expm1(roots_[i] * x);
    return s;
  }

  double w1(double x) const { return moment_sum(x, 1); }
  double w2(double x) const { return moment_sum(x, 2); }

  double z(double x) const {
    if (x <= 0.0) return 1.0;
    if (phi_ * x > kFactorCut) {
      double s = 0.0;
      for (std::size_t i = 0; i < roots_.size(); ++i)
        s += coeffs_[i] / roots_[i] * std::exp((roots_[i] - phi_) * x);
      return z_const_ + model_.q() * std::exp(phi_ * x) * s;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < roots_.size(); ++i)
      s += coeffs_[i] / roots_[i] * std::expm1(roots_[i] * x);
    return 1.0 + model_.q() * s;
  }

  // two-sided exit identities on b < x <= a
  ExitProbabilities exit_probabilities(double x, double a, double b) const {
    if (!(b < x && x <= a))
      throw InvalidInterval("exit_probabilities requires b < x <= a");
    const double up = w(x - b) / w(a - b);
    double down = z(x - b) - z(a - b) * up;
    const auto clamp01 = [](double v) { return std::min(1.0, std::max(0.0, v)); };
    return {clamp01(up), clamp01(down)};
  }

 private:
  static constexpr double kFactorCut = 30.0;

  double moment_sum(double x, int k) const {
    if (x < 0.0) return 0.0;
    const bool factor = phi_ * x > kFactorCut;
    double s = 0.0;
    for (std::size_t i = 0; i < roots_.size(); ++i) {
      const double rk = k == 1 ? roots_[i] : roots_[i] * roots_[i];
      s += coeffs_[i] * rk * std::exp(factor ? (roots_[i] - phi_) * x : roots_[i] * x);
    }
    return factor ? std::exp(phi_ * x) * s : s;
  }

  double compute_astar() const {
    if (w2(0.0) >= 0.0) return 0.0;
    if (model_.brownian())
      return 2.0 * std::log(zeta1_ / phi_) / (phi_ + zeta1_);
    double hi = 1.0;
    int guard = 0;
    while (w2(hi) < 0.0) {
      hi *= 2.0;
      if (++guard > 100) throw ConvergenceFailure("a_star: W'' stays negative");
    }
    return num::bisect_root([&](double x) { return w2(x); }, 0.0, hi, 1e-14);
  }

  LevyModel model_;
  std::vector<double> roots_, coeffs_;
  double phi_, zeta1_, sum_a_, z_const_, astar_;
};

}  // namespace barropt
