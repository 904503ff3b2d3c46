#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "fblab/common.hpp"

namespace fblab {

// Reaction-term profile family: a nonnegative bump beta supported in [0,1]
// with mass M = int_0^1 beta, its antiderivative B, and the scaled
// evaluation beta_eps(t) = (1/eps) beta(t/eps).

enum class BetaKind { polynomial_bump, smooth_bump, tabulated };

namespace detail {
// Normalization of exp(-1/(t(1-t))) so the smooth bump has unit mass
// before scaling.  1 / int_0^1 exp(-1/(t(1-t))) dt.
constexpr double kSmoothBumpNorm = 142.25037577709587;

inline double smooth_bump_raw(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return kSmoothBumpNorm * std::exp(-1.0 / (t * (1.0 - t)));
}
}  // namespace detail

class BetaProfile {
 public:
  /// C^1 polynomial bump scale * 6 t (1 - t); mass = scale.
  static BetaProfile polynomial(double scale = 1.0) {
    if (!(scale > 0.0)) throw invalid_profile_error("profile scale must be positive");
    BetaProfile p;
    p.kind_ = BetaKind::polynomial_bump;
    p.scale_ = scale;
    p.mass_ = scale;
    return p;
  }

  /// C^inf bump scale * c * exp(-1/(t(1-t))); mass = scale.
  static BetaProfile smooth(double scale = 1.0) {
    if (!(scale > 0.0)) throw invalid_profile_error("profile scale must be positive");
    BetaProfile p;
    p.kind_ = BetaKind::smooth_bump;
    p.scale_ = scale;
    p.build_table([scale](double t) { return scale * detail::smooth_bump_raw(t); });
    return p;
  }

  /// Piecewise-linear profile through (t, beta) samples.  The sample grid
  /// must contain t = 0 and t = 1 and be strictly increasing; values are
  /// clamped to zero outside [0,1].  B uses trapezoid quadrature at sample
  /// resolution.
  static BetaProfile tabulated(std::vector<std::pair<double, double>> samples,
                               double scale = 1.0) {
    if (!(scale > 0.0)) throw invalid_profile_error("profile scale must be positive");
    if (samples.size() < 2) throw invalid_profile_error("tabulated profile needs >= 2 samples");
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
      if (!(samples[i].first < samples[i + 1].first))
        throw invalid_profile_error("tabulated sample grid must be strictly increasing");
    if (samples.front().first > 0.0 || samples.back().first < 1.0)
      throw invalid_profile_error("tabulated sample grid must contain t=0 and t=1");
    for (const auto& [t, b] : samples) {
      (void)t;
      if (!(b >= 0.0) || !std::isfinite(b))
        throw invalid_profile_error("tabulated beta values must be finite and nonnegative");
    }
    BetaProfile p;
    p.kind_ = BetaKind::tabulated;
    p.scale_ = scale;
    p.samples_ = std::move(samples);
    // cumulative trapezoid over the sample grid restricted to [0,1]
    p.table_t_.clear();
    p.table_B_.clear();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.samples_.size(); ++i) {
      const auto [t, b] = p.samples_[i];
      if (t < 0.0 || t > 1.0) continue;
      if (!p.table_t_.empty()) {
        const double t0 = p.table_t_.back();
        const double b0 = p.table_last_b_;
        acc += 0.5 * (b0 + b) * (t - t0) * scale;
      }
      p.table_t_.push_back(t);
      p.table_B_.push_back(acc);
      p.table_last_b_ = b;
    }
    if (p.table_t_.empty() || p.table_t_.front() != 0.0 || p.table_t_.back() != 1.0)
      throw invalid_profile_error("tabulated sample grid must contain t=0 and t=1");
    p.mass_ = acc;
    if (!(p.mass_ > 0.0)) throw invalid_profile_error("profile has zero mass");
    return p;
  }

  BetaKind kind() const { return kind_; }
  double scale() const { return scale_; }

  /// M = int_0^1 beta.
  double mass() const { return mass_; }

  /// beta(t): nonnegative, zero outside [0,1].
  double beta(double t) const {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    switch (kind_) {
      case BetaKind::polynomial_bump:
        return scale_ * 6.0 * t * (1.0 - t);
      case BetaKind::smooth_bump:
        return scale_ * detail::smooth_bump_raw(t);
      case BetaKind::tabulated: {
        auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double x, const auto& s) { return x < s.first; });
        if (it == samples_.begin() || it == samples_.end()) return 0.0;
        const auto [t1, b1] = *it;
        const auto [t0, b0] = *(it - 1);
        const double w = (t - t0) / (t1 - t0);
        return scale_ * ((1.0 - w) * b0 + w * b1);
      }
    }
    return 0.0;
  }

  /// Derivative of beta, used by the pointwise Newton solve.  Piecewise
  /// constant for tabulated profiles.
  double beta_prime(double t) const {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    switch (kind_) {
      case BetaKind::polynomial_bump:
        return scale_ * (6.0 - 12.0 * t);
      case BetaKind::smooth_bump: {
        const double d = t * (1.0 - t);
        return scale_ * detail::smooth_bump_raw(t) * (1.0 - 2.0 * t) / (d * d);
      }
      case BetaKind::tabulated: {
        auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                                   [](double x, const auto& s) { return x < s.first; });
        if (it == samples_.begin() || it == samples_.end()) return 0.0;
        const auto [t1, b1] = *it;
        const auto [t0, b0] = *(it - 1);
        return scale_ * (b1 - b0) / (t1 - t0);
      }
    }
    return 0.0;
  }

  /// B(s) = int_0^s beta, clamped to [0, M]: 0 for s <= 0, M for s >= 1.
  double B(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return mass_;
    switch (kind_) {
      case BetaKind::polynomial_bump:
        return scale_ * (3.0 * s * s - 2.0 * s * s * s);
      case BetaKind::smooth_bump: {
        // dense cumulative Simpson table, linear interp between knots
        const double x = s * double(table_B_.size() - 1);
        const std::size_t i = std::min<std::size_t>(std::size_t(x), table_B_.size() - 2);
        const double w = x - double(i);
        return (1.0 - w) * table_B_[i] + w * table_B_[i + 1];
      }
      case BetaKind::tabulated: {
        auto it = std::upper_bound(table_t_.begin(), table_t_.end(), s);
        if (it == table_t_.begin()) return 0.0;
        const std::size_t i = std::size_t(it - table_t_.begin()) - 1;
        if (i + 1 >= table_t_.size()) return mass_;
        const double t0 = table_t_[i], t1 = table_t_[i + 1];
        // integrate the linear segment up to s
        const double b0 = beta(t0), bs = beta(s);
        (void)t1;
        return table_B_[i] + 0.5 * (b0 + bs) * (s - t0);
      }
    }
    return 0.0;
  }

  /// beta_eps(t) = (1/eps) beta(t/eps); requires eps > 0.
  double beta_eps(double t, double eps) const {
    if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
    return beta(t / eps) / eps;
  }

  double beta_eps_prime(double t, double eps) const {
    if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
    return beta_prime(t / eps) / (eps * eps);
  }

 private:
  void build_table(auto f) {
    // composite Simpson on a dense uniform grid; the integrand vanishes to
    // all orders at both endpoints, so this converges quickly
    constexpr int kPanels = 4096;
    table_B_.assign(kPanels + 1, 0.0);
    const double h = 1.0 / kPanels;
    double acc = 0.0;
    double prev = f(0.0);
    for (int i = 1; i <= kPanels; ++i) {
      const double a = (i - 1) * h, b = i * h;
      const double mid = f(0.5 * (a + b));
      const double fb = f(b);
      acc += (h / 6.0) * (prev + 4.0 * mid + fb);
      table_B_[std::size_t(i)] = acc;
      prev = fb;
    }
    mass_ = acc;
    if (!(mass_ > 0.0)) throw invalid_profile_error("profile has zero mass");
  }

  BetaKind kind_ = BetaKind::polynomial_bump;
  double scale_ = 1.0;
  double mass_ = 1.0;
  std::vector<std::pair<double, double>> samples_;
  std::vector<double> table_t_;  // tabulated kind: knots in [0,1]
  std::vector<double> table_B_;  // cumulative B at knots (or dense grid)
  double table_last_b_ = 0.0;
};

/// Free-function spellings of the profile operations.
inline double eval_beta(const BetaProfile& p, double t, double eps) {
  return p.beta_eps(t, eps);
}
inline double eval_B(const BetaProfile& p, double s) { return p.B(s); }
inline double mass(const BetaProfile& p) { return p.mass(); }

/// Profile registry used by run configurations: "poly" or "smooth".
inline BetaProfile profile_by_name(const std::string& name, double scale = 1.0) {
  if (name == "poly") return BetaProfile::polynomial(scale);
  if (name == "smooth") return BetaProfile::smooth(scale);
  throw invalid_profile_error("unknown profile name: " + name);
}

}  // namespace fblab
