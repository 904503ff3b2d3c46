#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "fblab/field.hpp"
#include "fblab/integrate.hpp"
#include "fblab/quadrature.hpp"

namespace fblab {

// ---------------------------------------------------------------------------
// Rescaling u_rho(x) = u(x0 + rho x) / rho
// ---------------------------------------------------------------------------

/// Resample the blow-up rescaling onto a fresh centered box grid with the
/// same spacing as the source.  The physical window rho * [out box] around
/// `center` must lie inside the source domain.
inline ScalarField rescale(const ScalarField& field, const Vec& center, double rho,
                           std::array<int, 3> out_shape) {
  if (!(rho > 0.0)) throw invalid_parameter_error("rescale: rho must be positive");
  ScalarField out = make_box_field(field.dim, out_shape, field.spacing,
                                   {-0.5 * field.spacing * (out_shape[0] - 1),
                                    field.dim >= 2 ? -0.5 * field.spacing * (out_shape[1] - 1) : 0.0,
                                    field.dim >= 3 ? -0.5 * field.spacing * (out_shape[2] - 1) : 0.0});
  GridSampler s(field);
  fill_field(out, [&](const Vec& x) { return s.value(center + rho * x) / rho; });
  if (field.eps > 0.0) out.eps = field.eps / rho;  // rescaled solution solves the eps/rho problem
  out.profile_name = field.profile_name;
  out.profile_mass = field.profile_mass;
  return out;
}

// ---------------------------------------------------------------------------
// Deviation from degree-one homogeneity
// ---------------------------------------------------------------------------

/// D = int_{r1}^{r2} int_{S^{N-1}} (d_r u - u/r)^2 dsigma dr/r, shell
/// quadrature in sigma, trapezoid in t = log r.
inline double homogeneity_deviation(const FieldSampler& u, const Vec& center, double r1,
                                    double r2, const ShellQuadrature& quad, int n_r = 129) {
  if (!(r1 > 0.0 && r1 < r2)) throw invalid_parameter_error("need 0 < r1 < r2");
  if (quad.dim != u.dim()) throw invalid_parameter_error("quadrature dimension mismatch");
  if (n_r < 2) throw invalid_parameter_error("n_r must be >= 2");
  const double t1 = std::log(r1), t2 = std::log(r2);
  const double dt = (t2 - t1) / (n_r - 1);
  double acc = 0.0;
  for (int m = 0; m < n_r; ++m) {
    const double r = std::exp(t1 + m * dt);
    double shell = 0.0;
    for (std::size_t q = 0; q < quad.dirs.size(); ++q) {
      const Vec x = center + r * quad.dirs[q];
      const double radial = dot(u.gradient(x), quad.dirs[q]);
      const double d = radial - u.value(x) / r;
      shell += quad.weights[q] * d * d;
    }
    acc += (m == 0 || m == n_r - 1 ? 0.5 : 1.0) * dt * shell;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Free boundary extraction and density labels
// ---------------------------------------------------------------------------

enum class DensityLabel : std::uint8_t { unknown, half_density, full_density, degenerate };

struct FreeBoundarySet {
  std::vector<Vec> points;
  std::vector<DensityLabel> labels;
  std::vector<double> densities;                  // extrapolated Theta (NaN until labeled)
  std::vector<std::vector<double>> density_ladders;  // raw Theta(r) ladders
};

/// Zero transitions of u along grid edges with linear sub-cell
/// interpolation (marching squares / marching cubes edges).  Values with
/// |u| <= level_tol count as zero.  Labels start unknown.
inline FreeBoundarySet extract_free_boundary(const ScalarField& f, double level_tol = 0.0) {
  if (level_tol < 0.0) throw invalid_parameter_error("level_tol must be nonnegative");
  FreeBoundarySet fb;
  std::set<std::array<double, 3>> seen;
  auto positive = [&](double v) { return v > level_tol; };
  auto visit_edge = [&](int i, int j, int k, int a) {
    const int i2 = i + (a == 0), j2 = j + (a == 1), k2 = k + (a == 2);
    if (!f.in_grid(i2, j2, k2)) return;
    if (f.mask_at(i, j, k) == ScalarField::kExterior ||
        f.mask_at(i2, j2, k2) == ScalarField::kExterior)
      return;
    const double va = f.at(i, j, k), vb = f.at(i2, j2, k2);
    if (positive(va) == positive(vb)) return;
    double t = 0.5;
    if (vb != va) t = std::clamp((level_tol - va) / (vb - va), 0.0, 1.0);
    Vec p = f.point(i, j, k);
    p[a] += t * f.spacing;
    if (seen.insert({p[0], p[1], p[2]}).second) fb.points.push_back(p);
  };
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k)
        for (int a = 0; a < f.dim; ++a) visit_edge(i, j, k, a);
  fb.labels.assign(fb.points.size(), DensityLabel::unknown);
  fb.densities.assign(fb.points.size(), std::numeric_limits<double>::quiet_NaN());
  fb.density_ladders.resize(fb.points.size());
  return fb;
}

struct DensityEstimate {
  double theta = 0.0;            // Richardson-extrapolated density
  std::vector<double> ladder;    // raw |{u>0} n B_r| / |B_r| per radius
};

/// Lebesgue density of {u > 0} at a point over a descending radius ladder,
/// extrapolated with the two-point Richardson model Theta(r) = Theta + c r.
inline DensityEstimate lebesgue_density(const FieldSampler& u, const Vec& point,
                                        const std::vector<double>& radii, int n_sub = 0) {
  if (radii.size() < 2) throw invalid_parameter_error("density ladder needs >= 2 radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > radii[i + 1]))
      throw invalid_parameter_error("density radii must be strictly descending");
  DensityEstimate est;
  for (double r : radii) {
    const BallStats s = ball_stats(u, point, r, n_sub);
    est.ladder.push_back(s.volume > 0.0 ? s.positive_volume / s.volume : 0.0);
  }
  const double t_min = est.ladder.back();
  const double t_prev = est.ladder[est.ladder.size() - 2];
  const double r_min = radii.back();
  const double r_prev = radii[radii.size() - 2];
  est.theta = t_min + (t_min - t_prev) * r_min / (r_prev - r_min);
  return est;
}

/// min over the ladder of (1/r) * average of u^+ over B_r(point); small
/// values flag a degenerate point (vanishing blow-up).
inline double nondegeneracy_indicator(const FieldSampler& u, const Vec& point,
                                      const std::vector<double>& radii, int n_sub = 0) {
  if (radii.empty()) throw invalid_parameter_error("indicator needs at least one radius");
  double worst = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    const BallStats s = ball_stats(u, point, r, n_sub);
    const double avg = s.volume > 0.0 ? s.plus_integral / s.volume : 0.0;
    worst = std::min(worst, avg / r);
  }
  return worst;
}

/// Assign half/full density or degenerate labels from the estimated Theta
/// and the non-degeneracy indicator.  The degeneracy cut is
/// 0.05 sqrt(2M) measured on the finest two radii of the ladder.
inline FreeBoundarySet label_density_sets(FreeBoundarySet fb, const FieldSampler& u,
                                          const std::vector<double>& radii, double half_tol,
                                          double mass, int n_sub = 0) {
  if (!(mass > 0.0)) throw invalid_parameter_error("mass must be positive");
  const double degenerate_cut = 0.05 * std::sqrt(2.0 * mass);
  std::vector<double> finest(radii.end() - std::min<std::size_t>(2, radii.size()),
                             radii.end());
  for (std::size_t p = 0; p < fb.points.size(); ++p) {
    const double ind = nondegeneracy_indicator(u, fb.points[p], finest, n_sub);
    const DensityEstimate est = lebesgue_density(u, fb.points[p], radii, n_sub);
    fb.densities[p] = est.theta;
    fb.density_ladders[p] = est.ladder;
    if (ind < degenerate_cut)
      fb.labels[p] = DensityLabel::degenerate;
    else if (std::abs(est.theta - 0.5) <= half_tol)
      fb.labels[p] = DensityLabel::half_density;
    else if (est.theta >= 1.0 - half_tol)
      fb.labels[p] = DensityLabel::full_density;
    else
      fb.labels[p] = DensityLabel::unknown;
  }
  return fb;
}

// ---------------------------------------------------------------------------
// Two-dimensional blow-up classification
// ---------------------------------------------------------------------------

enum class BlowupVariant { zero, half_plane, wedge, two_plane, unclassified };

struct BlowupClass {
  BlowupVariant variant = BlowupVariant::unclassified;
  double alpha = 0.0;
  double beta = 0.0;
  double fit_residual = 0.0;
  Vec normal{0.0, 0.0, 0.0};
};

namespace detail {

struct Arc {
  double amplitude = 0.0;   // fitted A of A sin(theta + phase)
  double peak_angle = 0.0;  // angle of the fitted maximum
  double length = 0.0;      // angular length of the detected run
  double rms = 0.0;         // fit residual over the run
};

/// Circular runs of `flag`, fitting a * sin + b * cos over each run.
inline std::vector<Arc> detect_arcs(const std::vector<double>& g, double theta_offset,
                                    const std::vector<char>& flag, double sign) {
  const int n = int(g.size());
  const double dth = 2.0 * kPi / n;
  std::vector<Arc> arcs;
  std::vector<int> starts;
  bool all = true;
  for (int i = 0; i < n; ++i) {
    if (!flag[std::size_t(i)]) all = false;
    if (flag[std::size_t(i)] && !flag[std::size_t((i + n - 1) % n)]) starts.push_back(i);
  }
  if (all) starts.assign(1, 0);
  for (int s : starts) {
    int len = 0;
    while (len < n && flag[std::size_t((s + len) % n)]) ++len;
    double saa = 0.0, sab = 0.0, sbb = 0.0, sga = 0.0, sgb = 0.0;
    for (int m = 0; m < len; ++m) {
      const int i = (s + m) % n;
      const double th = theta_offset + i * dth;
      const double sa = std::sin(th), sb = std::cos(th);
      const double gv = sign * g[std::size_t(i)];
      saa += sa * sa;
      sab += sa * sb;
      sbb += sb * sb;
      sga += gv * sa;
      sgb += gv * sb;
    }
    const double det = saa * sbb - sab * sab;
    double a = 0.0, b = 0.0;
    if (std::abs(det) > 1e-30) {
      a = (sga * sbb - sgb * sab) / det;
      b = (saa * sgb - sab * sga) / det;
    }
    Arc arc;
    arc.amplitude = std::hypot(a, b);
    arc.peak_angle = std::atan2(b, a);  // sin(th + phase) peaks at th = pi/2 - phase
    arc.peak_angle = 0.5 * kPi - arc.peak_angle;
    arc.length = len * dth;
    double ss = 0.0;
    for (int m = 0; m < len; ++m) {
      const int i = (s + m) % n;
      const double th = theta_offset + i * dth;
      const double d = sign * g[std::size_t(i)] - (a * std::sin(th) + b * std::cos(th));
      ss += d * d;
    }
    arc.rms = len > 0 ? std::sqrt(ss / len) : 0.0;
    arcs.push_back(arc);
  }
  return arcs;
}

inline double angle_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

}  // namespace detail

/// Classify the unit-circle trace of a candidate 2D blow-up against the
/// degree-one catalogue: half plane sqrt(2M) x1+, wedge alpha |x1| with
/// 0 < alpha <= sqrt(2M), two-plane alpha x1+ - beta x1- with
/// alpha^2 - beta^2 = 2M.  Samples live at theta_offset + i 2pi/n.
/// An arc whose angular length differs from pi beyond tolerance makes the
/// result unclassified rather than an error.
inline BlowupClass classify_blowup_2d(const std::vector<double>& g, double mass, double tol,
                                      double theta_offset = 0.0, double arc_tol = 0.0) {
  if (g.size() < 16) throw invalid_parameter_error("classifier needs >= 16 samples");
  if (!(mass > 0.0)) throw invalid_parameter_error("mass must be positive");
  if (!(tol > 0.0)) throw invalid_parameter_error("tol must be positive");
  const int n = int(g.size());
  const double dth = 2.0 * kPi / n;
  if (arc_tol <= 0.0) arc_tol = 0.1 + 6.0 * dth;
  const double root2m = std::sqrt(2.0 * mass);
  const double dead_band = tol * root2m;  // suppresses endpoint noise

  std::vector<char> pos(g.size()), neg(g.size());
  bool any = false;
  for (std::size_t i = 0; i < g.size(); ++i) {
    pos[i] = g[i] > dead_band;
    neg[i] = g[i] < -dead_band;
    any = any || pos[i] || neg[i];
  }
  BlowupClass out;
  if (!any) {
    out.variant = BlowupVariant::zero;
    return out;
  }
  const auto pos_arcs = detail::detect_arcs(g, theta_offset, pos, +1.0);
  const auto neg_arcs = detail::detect_arcs(g, theta_offset, neg, -1.0);
  double rms = 0.0;
  for (const auto& a : pos_arcs) rms = std::max(rms, a.rms);
  for (const auto& a : neg_arcs) rms = std::max(rms, a.rms);
  out.fit_residual = rms;

  auto arc_is_halfturn = [&](const detail::Arc& a) {
    return std::abs(a.length - kPi) <= arc_tol;
  };
  auto normal_of = [&](double peak) { return vec2(std::cos(peak), std::sin(peak)); };

  if (pos_arcs.size() == 1 && neg_arcs.empty()) {
    const auto& a = pos_arcs[0];
    out.alpha = a.amplitude;
    out.normal = normal_of(a.peak_angle);
    if (arc_is_halfturn(a) && std::abs(a.amplitude - root2m) <= tol)
      out.variant = BlowupVariant::half_plane;
    return out;
  }
  if (pos_arcs.size() == 2 && neg_arcs.empty()) {
    const auto &a = pos_arcs[0], &b = pos_arcs[1];
    out.alpha = 0.5 * (a.amplitude + b.amplitude);
    out.normal = normal_of(a.peak_angle);
    const bool antipodal = detail::angle_diff(a.peak_angle, b.peak_angle + kPi) <= arc_tol;
    const bool equal_amp = std::abs(a.amplitude - b.amplitude) <= tol * std::max(1.0, out.alpha);
    if (arc_is_halfturn(a) && arc_is_halfturn(b) && antipodal && equal_amp &&
        out.alpha <= root2m + tol)
      out.variant = BlowupVariant::wedge;
    return out;
  }
  if (pos_arcs.size() == 1 && neg_arcs.size() == 1) {
    const auto &p = pos_arcs[0], &q = neg_arcs[0];
    out.alpha = p.amplitude;
    out.beta = q.amplitude;
    out.normal = normal_of(p.peak_angle);
    const bool antipodal = detail::angle_diff(p.peak_angle, q.peak_angle + kPi) <= arc_tol;
    const bool slope_identity =
        std::abs(p.amplitude * p.amplitude - q.amplitude * q.amplitude - 2.0 * mass) <= tol;
    if (arc_is_halfturn(p) && arc_is_halfturn(q) && antipodal && slope_identity)
      out.variant = BlowupVariant::two_plane;
    return out;
  }
  return out;  // anything else stays unclassified with the residual reported
}

/// Unit-circle trace g(theta) = u(center + r sigma)/r used to feed the
/// classifier from a field.
inline std::vector<double> circle_trace(const FieldSampler& u, const Vec& center, double r,
                                        int n, double theta_offset = 0.0) {
  if (!(r > 0.0)) throw invalid_parameter_error("trace radius must be positive");
  if (n < 16) throw invalid_parameter_error("trace needs >= 16 samples");
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double th = theta_offset + 2.0 * kPi * i / n;
    g[std::size_t(i)] = u.value(center + r * vec2(std::cos(th), std::sin(th))) / r;
  }
  return g;
}

}  // namespace fblab
