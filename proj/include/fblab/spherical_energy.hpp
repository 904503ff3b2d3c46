#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fblab/field.hpp"
#include "fblab/integrate.hpp"
#include "fblab/mollifier.hpp"
#include "fblab/quadrature.hpp"

namespace fblab {

// Radius-indexed shell energies: the eps-form
//   S_eps(r) = int_{S^{N-1}} 2B(u/eps) + |grad_sigma u|^2/r^2
//              - (N-1) u^2/r^2 - (d_r u - u/r)^2 dsigma
// and its sharp-interface form with 2M chi_{u>0} in place of 2B(u/eps).
// Both are nondecreasing in r along solutions and constant exactly on
// degree-one homogeneous fields.

namespace detail {

template <class Reaction>
inline double spruck_shell(const FieldSampler& u, const Vec& center, double r,
                           const ShellQuadrature& quad, Reaction&& reaction) {
  if (!(r > 0.0)) throw invalid_parameter_error("shell radius must be positive");
  if (quad.dim != u.dim())
    throw invalid_parameter_error("shell quadrature dimension mismatch");
  const int N = u.dim();
  double acc = 0.0;
  for (std::size_t q = 0; q < quad.dirs.size(); ++q) {
    const Vec& sigma = quad.dirs[q];
    const Vec x = center + r * sigma;
    const double val = u.value(x);
    const Vec g = u.gradient(x);
    const double radial = dot(g, sigma);
    const double tang2 = std::max(0.0, dot(g, g) - radial * radial);
    const double a = val / r;
    const double integrand =
        reaction(val) + tang2 - (N - 1) * a * a - (radial - a) * (radial - a);
    acc += quad.weights[q] * integrand;
  }
  return acc;
}

}  // namespace detail

inline double spruck_S_eps(const FieldSampler& u, const Vec& center, double r,
                           const BetaProfile& profile, double eps,
                           const ShellQuadrature& quad) {
  if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
  return detail::spruck_shell(u, center, r, quad,
                              [&](double v) { return 2.0 * profile.B(v / eps); });
}

inline double spruck_S_limit(const FieldSampler& u, const Vec& center, double r, double mass,
                             const ShellQuadrature& quad) {
  return detail::spruck_shell(u, center, r, quad,
                              [&](double v) { return v > 0.0 ? 2.0 * mass : 0.0; });
}

enum class SpruckMode { eps, limit };

struct EnergyProfile {
  Vec center{0.0, 0.0, 0.0};
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> defects;  // successive differences values[i+1]-values[i]

  double min_defect() const {
    double m = std::numeric_limits<double>::infinity();
    for (double d : defects) m = std::min(m, d);
    return m;
  }
};

/// Tabulate S over an ascending radius list.  mode eps needs the profile
/// and eps; mode limit needs the mass.
inline EnergyProfile monotonicity_profile(const FieldSampler& u, const Vec& center,
                                          const std::vector<double>& radii, SpruckMode mode,
                                          const ShellQuadrature& quad,
                                          const BetaProfile* profile = nullptr,
                                          double eps = 0.0, double mass = 0.0) {
  if (radii.size() < 2)
    throw invalid_parameter_error("monotonicity profile needs at least 2 radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] < radii[i + 1]))
      throw invalid_parameter_error("radii must be strictly increasing");
  if (mode == SpruckMode::eps && profile == nullptr)
    throw invalid_parameter_error("eps mode requires a profile");
  EnergyProfile out;
  out.center = center;
  out.radii = radii;
  out.values.reserve(radii.size());
  for (double r : radii)
    out.values.push_back(mode == SpruckMode::eps
                             ? spruck_S_eps(u, center, r, *profile, eps, quad)
                             : spruck_S_limit(u, center, r, mass, quad));
  for (std::size_t i = 0; i + 1 < out.values.size(); ++i)
    out.defects.push_back(out.values[i + 1] - out.values[i]);
  return out;
}

/// Alt-Caffarelli-Friedman two-phase product
///   Phi(r) = r^-4 int_{B_r} |grad u|^2 / |x|^{N-2} * int_{B_r} |grad v|^2 / |x|^{N-2}
/// on a shared grid; the kernel singularity at the center cell is replaced
/// by the cell-averaged kernel value.
inline double acf_phi(const ScalarField& u, const ScalarField& v, const Vec& center,
                      double r) {
  if (u.dim != v.dim || u.shape != v.shape || u.spacing != v.spacing || u.origin != v.origin)
    throw invalid_pair_error("acf_phi: fields must share grid metadata");
  if (u.dim != 2 && u.dim != 3)
    throw invalid_parameter_error("acf_phi: dimension must be 2 or 3");
  if (!(r > 0.0)) throw invalid_parameter_error("acf_phi: radius must be positive");
  const double h = u.spacing;

  auto kernel = [&](const Vec& x, bool center_cell) -> double {
    if (u.dim == 2) return 1.0;
    if (!center_cell) return 1.0 / std::max(norm(x - center), 1e-300);
    // average 1/|y - center| over the cell by midpoint subsampling
    Vec lo = x;
    for (int a = 0; a < u.dim; ++a) lo[a] -= 0.5 * h;
    const int s = 16;
    double acc = 0.0;
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b)
        for (int g = 0; g < s; ++g) {
          const Vec p{lo[0] + (a + 0.5) * h / s, lo[1] + (b + 0.5) * h / s,
                      lo[2] + (g + 0.5) * h / s};
          acc += 1.0 / std::max(norm(p - center), 1e-300);
        }
    return acc / double(s * s * s);
  };

  auto factor = [&](const ScalarField& w) {
    double acc = 0.0;
    const double vol = std::pow(h, w.dim);
    // index window of cells meeting the ball
    int lo_idx[3] = {0, 0, 0}, hi_idx[3] = {w.shape[0] - 1, 1, 1};
    for (int a = 0; a < w.dim; ++a) {
      lo_idx[a] = std::max(0, int(std::floor((center[a] - r - w.origin[a]) / h)) - 1);
      hi_idx[a] = std::min(w.shape[a] - 1, int(std::ceil((center[a] + r - w.origin[a]) / h)) + 1);
    }
    if (w.dim < 2) hi_idx[1] = 1;
    if (w.dim < 3) hi_idx[2] = 1;
    for (int i = lo_idx[0]; i < hi_idx[0]; ++i)
      for (int j = lo_idx[1]; j < (w.dim >= 2 ? hi_idx[1] : 1); ++j)
        for (int k = lo_idx[2]; k < (w.dim >= 3 ? hi_idx[2] : 1); ++k) {
          bool ok = true;
          for (int b = 0; b < (1 << w.dim) && ok; ++b)
            ok = w.mask_at(i + (b & 1), w.dim >= 2 ? j + ((b >> 1) & 1) : 0,
                           w.dim >= 3 ? k + ((b >> 2) & 1) : 0) != ScalarField::kExterior;
          if (!ok) continue;
          const double frac = detail::cell_ball_fraction(w, i, j, k, center, r);
          if (frac == 0.0) continue;
          const CellData c = cell_data(w, i, j, k);
          bool center_cell = true;
          for (int a = 0; a < w.dim; ++a)
            center_cell = center_cell && std::abs(c.center[a] - center[a]) <= 0.5 * h + 1e-12;
          acc += vol * frac * dot(c.grad, c.grad) * kernel(c.center, center_cell);
        }
    return acc;
  };

  return factor(u) * factor(v) / (r * r * r * r);
}

}  // namespace fblab
