#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "fblab/field.hpp"
#include "fblab/mollifier.hpp"

namespace fblab {

// ---------------------------------------------------------------------------
// Catenoid spherical profile f(theta) = 2 + cos(theta) log(tan^2(theta/2)).
// f vanishes at theta0 in (0, pi/2), is symmetric about pi/2, and solves
// f'' + cot(theta) f' + 2 f = 0 away from the poles.
// ---------------------------------------------------------------------------

/// f and f' at theta; theta must lie strictly inside (0, pi).
inline std::pair<double, double> catenoid_f(double theta) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw pole_error("catenoid_f: theta at a pole of the log term");
  const double c = std::cos(theta), s = std::sin(theta);
  const double L = std::log(std::tan(0.5 * theta) * std::tan(0.5 * theta));
  return {2.0 + c * L, -s * L + 2.0 * c / s};
}

/// Second derivative, from differentiating the closed form.
inline double catenoid_fpp(double theta) {
  if (!(theta > 0.0) || !(theta < kPi))
    throw pole_error("catenoid_fpp: theta at a pole of the log term");
  const double c = std::cos(theta), s = std::sin(theta);
  const double L = std::log(std::tan(0.5 * theta) * std::tan(0.5 * theta));
  return -c * L - 2.0 - 2.0 / (s * s);
}

/// Unique zero of f in (0, pi/2), by bisection refined to 1e-12.
inline double catenoid_theta0() {
  static const double cached = [] {
    double lo = 0.1, hi = 0.5 * kPi - 0.1;
    double flo = catenoid_f(lo).first;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = catenoid_f(mid).first;
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }();
  return cached;
}

/// Support function of the catenoid y = a cosh(x/a) evaluated at the
/// normal angle alpha = theta + pi/2.
inline double catenoid_support_H(double theta, double a = 2.0) {
  const double alpha = theta + 0.5 * kPi;
  const double sa = std::sin(alpha), ca = std::cos(alpha);
  if (ca == 0.0) throw pole_error("catenoid_support_H: normal angle degenerate");
  const double ratio = (1.0 + sa) / ca;
  return -0.5 * a * sa * std::log(ratio * ratio) + a;
}

/// Max |H(theta + pi/2) - f(theta)| over the grid; zero for a = 2.
inline double catenoid_support_identity(const std::vector<double>& theta_grid, double a = 2.0) {
  double defect = 0.0;
  for (double th : theta_grid) {
    if (!(th > 0.0) || !(th < kPi))
      throw pole_error("catenoid_support_identity: grid touches a pole");
    defect = std::max(defect, std::abs(catenoid_support_H(th, a) - catenoid_f(th).first));
  }
  return defect;
}

// ---------------------------------------------------------------------------
// Closed-form reference solutions
// ---------------------------------------------------------------------------

enum class ExactVariant { half_plane, wedge, two_plane, catenoid, constant };

struct ExactKind {
  ExactVariant variant = ExactVariant::constant;
  double mass = 1.0;   // half_plane(M)
  double alpha = 0.0;  // wedge / two_plane slopes
  double beta = 0.0;
  double c = 0.0;  // constant value

  static ExactKind half_plane(double M) {
    if (!(M > 0.0)) throw invalid_parameter_error("half_plane: M must be positive");
    ExactKind k;
    k.variant = ExactVariant::half_plane;
    k.mass = M;
    k.alpha = std::sqrt(2.0 * M);
    return k;
  }
  static ExactKind wedge(double alpha) {
    if (!(alpha > 0.0)) throw invalid_parameter_error("wedge: alpha must be positive");
    ExactKind k;
    k.variant = ExactVariant::wedge;
    k.alpha = alpha;
    return k;
  }
  static ExactKind two_plane(double alpha, double beta) {
    if (!(alpha > 0.0) || !(beta > 0.0))
      throw invalid_parameter_error("two_plane: alpha, beta must be positive");
    ExactKind k;
    k.variant = ExactVariant::two_plane;
    k.alpha = alpha;
    k.beta = beta;
    k.mass = 0.5 * (alpha * alpha - beta * beta);
    return k;
  }
  static ExactKind catenoid() {
    ExactKind k;
    k.variant = ExactVariant::catenoid;
    k.mass = 0.5;  // unit boundary gradient: sqrt(2M) = 1
    return k;
  }
  static ExactKind constant(double c) {
    ExactKind k;
    k.variant = ExactVariant::constant;
    k.c = c;
    return k;
  }
};

namespace detail {
constexpr double kPoleGuard = 1e-8;
}

/// Pointwise value of the reference solution.
inline double exact_value(const ExactKind& kind, const Vec& x, int dim) {
  switch (kind.variant) {
    case ExactVariant::half_plane:
      return kind.alpha * std::max(x[0], 0.0);
    case ExactVariant::wedge:
      return kind.alpha * std::abs(x[0]);
    case ExactVariant::two_plane:
      return kind.alpha * std::max(x[0], 0.0) - kind.beta * std::max(-x[0], 0.0);
    case ExactVariant::constant:
      return kind.c;
    case ExactVariant::catenoid: {
      if (dim != 3) throw invalid_parameter_error("catenoid field requires dim 3");
      const double r = norm(x);
      if (r == 0.0) return 0.0;
      double theta = std::acos(std::max(-1.0, std::min(1.0, x[2] / r)));
      theta = std::max(detail::kPoleGuard, std::min(kPi - detail::kPoleGuard, theta));
      const double g = catenoid_f(theta).first / catenoid_f(catenoid_theta0()).second;
      return r * std::max(g, 0.0);
    }
  }
  return 0.0;
}

/// Pointwise gradient; zero on closures of zero sets.
inline Vec exact_gradient(const ExactKind& kind, const Vec& x, int dim) {
  switch (kind.variant) {
    case ExactVariant::half_plane:
      return x[0] > 0.0 ? vec3(kind.alpha, 0.0, 0.0) : Vec{0.0, 0.0, 0.0};
    case ExactVariant::wedge:
      return x[0] == 0.0 ? Vec{0.0, 0.0, 0.0}
                         : vec3(x[0] > 0.0 ? kind.alpha : -kind.alpha, 0.0, 0.0);
    case ExactVariant::two_plane:
      return x[0] == 0.0 ? Vec{0.0, 0.0, 0.0}
                         : vec3(x[0] > 0.0 ? kind.alpha : kind.beta, 0.0, 0.0);
    case ExactVariant::constant:
      return {0.0, 0.0, 0.0};
    case ExactVariant::catenoid: {
      if (dim != 3) throw invalid_parameter_error("catenoid field requires dim 3");
      const double r = norm(x);
      if (r == 0.0) return {0.0, 0.0, 0.0};
      double theta = std::acos(std::max(-1.0, std::min(1.0, x[2] / r)));
      theta = std::max(detail::kPoleGuard, std::min(kPi - detail::kPoleGuard, theta));
      const auto [f, fp] = catenoid_f(theta);
      const double fp0 = catenoid_f(catenoid_theta0()).second;
      if (f <= 0.0) return {0.0, 0.0, 0.0};
      const double g = f / fp0, gp = fp / fp0;
      const double phi = std::atan2(x[1], x[0]);
      const double st = std::sin(theta), ct = std::cos(theta);
      const Vec n{st * std::cos(phi), st * std::sin(phi), ct};
      const Vec etheta{ct * std::cos(phi), ct * std::sin(phi), -st};
      return g * n + gp * etheta;  // degree-zero homogeneous
    }
  }
  return {0.0, 0.0, 0.0};
}

/// Sampler over a closed-form solution (no grid, no interpolation error).
class ExactSampler final : public FieldSampler {
 public:
  ExactSampler(ExactKind kind, int dim) : kind_(kind), dim_(dim) {
    if (dim < 1 || dim > 3) throw invalid_parameter_error("sampler dim must be 1..3");
    if (kind.variant == ExactVariant::catenoid && dim != 3)
      throw invalid_parameter_error("catenoid field requires dim 3");
  }
  int dim() const override { return dim_; }
  double value(const Vec& x) const override { return exact_value(kind_, x, dim_); }
  Vec gradient(const Vec& x) const override { return exact_gradient(kind_, x, dim_); }

 private:
  ExactKind kind_;
  int dim_;
};

/// Nodewise evaluation onto a prepared grid (mask/shape taken from proto).
inline ScalarField make_exact_field(const ExactKind& kind, const ScalarField& proto) {
  ScalarField f = proto;
  fill_field(f, [&](const Vec& p) { return exact_value(kind, p, f.dim); });
  switch (kind.variant) {
    case ExactVariant::half_plane:
    case ExactVariant::two_plane:
    case ExactVariant::catenoid:
      f.profile_mass = kind.mass;
      break;
    default:
      break;
  }
  return f;
}

/// Nodewise evaluation onto a centered box [-half, half]^dim.
inline ScalarField make_exact_field(const ExactKind& kind, int dim, double half_width,
                                    double spacing) {
  return make_exact_field(kind, make_centered_box_field(dim, half_width, spacing));
}

// ---------------------------------------------------------------------------
// Exact 1D profile of the eps-problem: u'' = beta_eps(u), u(0) ~ 0 with the
// degenerate start regularized by launching from u = delta * eps.  The first
// integral u' = sqrt(2 B(u/eps)) is integrated as x(u) = int du/sqrt(2B(u/eps))
// in log coordinates; past u = eps the profile continues linearly with slope
// sqrt(2M).
// ---------------------------------------------------------------------------

class OneDProfile {
 public:
  OneDProfile(const BetaProfile& profile, double eps, double delta = 1e-6)
      : profile_(profile), eps_(eps), delta_(delta) {
    if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw invalid_parameter_error("bad launch delta");
    if (!(profile.B(delta) > 1e-300))
      throw invalid_parameter_error("profile too degenerate near 0 for the 1D layer start");
    build();
  }

  double eps() const { return eps_; }
  double mass() const { return profile_.mass(); }

  /// Position where the profile reaches u = eps (top of the layer).
  double x_top() const { return x_.back(); }

  /// u(x) for x >= 0.
  double value(double x) const {
    if (x < 0.0) throw invalid_parameter_error("profile_1d: x must be >= 0");
    if (x >= x_.back())
      return eps_ + std::sqrt(2.0 * profile_.mass()) * (x - x_.back());
    // monotone bracket + cubic Hermite with the exact end slopes
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    const double x0 = x_[lo], x1 = x_[lo + 1];
    const double u0 = u_[lo], u1 = u_[lo + 1];
    const double d0 = slope_of(u0), d1 = slope_of(u1);
    const double hseg = x1 - x0;
    if (hseg <= 0.0) return u0;
    const double t = (x - x0) / hseg;
    const double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    const double h10 = t * (1 - t) * (1 - t);
    const double h01 = t * t * (3 - 2 * t);
    const double h11 = t * t * (t - 1);
    return h00 * u0 + h10 * hseg * d0 + h01 * u1 + h11 * hseg * d1;
  }

  /// u'(x) = sqrt(2 B(u/eps)); equals sqrt(2M) once u >= eps.
  double slope(double x) const { return slope_of(value(x)); }

 private:
  double slope_of(double u) const { return std::sqrt(2.0 * profile_.B(u / eps_)); }

  void build() {
    // x(u): substitute u = eps * e^tau; integrand eps e^tau / sqrt(2B(e^tau))
    // is smooth and flat near tau -> -inf; refine until converged
    const double tau0 = std::log(delta_), tau1 = 0.0;
    auto integrand = [&](double tau) {
      const double s = std::exp(tau);
      return eps_ * s / std::sqrt(2.0 * profile_.B(s));
    };
    int n = 2048;
    double last_top = -1.0;
    for (int pass = 0; pass < 6; ++pass, n *= 2) {
      const double dtau = (tau1 - tau0) / n;
      u_.assign(std::size_t(n) + 1, 0.0);
      x_.assign(std::size_t(n) + 1, 0.0);
      u_[0] = eps_ * delta_;
      double acc = 0.0;
      double prev = integrand(tau0);
      for (int i = 1; i <= n; ++i) {
        const double ta = tau0 + (i - 1) * dtau, tb = tau0 + i * dtau;
        const double mid = integrand(0.5 * (ta + tb));
        const double fb = integrand(tb);
        acc += (dtau / 6.0) * (prev + 4.0 * mid + fb);
        prev = fb;
        u_[std::size_t(i)] = eps_ * std::exp(tb);
        x_[std::size_t(i)] = acc;
      }
      if (last_top >= 0.0 && std::abs(acc - last_top) < 1e-13 * std::max(1.0, acc)) break;
      last_top = acc;
    }
  }

  BetaProfile profile_;
  double eps_;
  double delta_;
  std::vector<double> u_;  // ascending knot values, delta*eps .. eps
  std::vector<double> x_;  // positions of the knots, 0 .. x_top
};

/// Free-function spelling: u(x) of the exact 1D profile.
inline double profile_1d(const BetaProfile& profile, double eps, double x) {
  return OneDProfile(profile, eps).value(x);
}

/// Planar composite of the 1D layer profile aligned with the limit
/// solution sqrt(2M) x1+: far field matches the half plane, the reaction
/// band sits where the eps-solution wants it.  Good relaxation seed for
/// half-plane boundary data; Dirichlet data itself stays exact.
class LayerProfileGuess {
 public:
  LayerProfileGuess(const BetaProfile& profile, double eps)
      : profile_(profile, eps),
        shift_(profile_.x_top() - eps / std::sqrt(2.0 * profile.mass())) {}

  double operator()(const Vec& x) const {
    const double arg = x[0] + shift_;
    return arg <= 0.0 ? 0.0 : profile_.value(arg);
  }

 private:
  OneDProfile profile_;
  double shift_;
};

}  // namespace fblab
