#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/exact.hpp"
#include "fblab/field.hpp"
#include "fblab/mollifier.hpp"
#include "fblab/solver.hpp"
#include "fblab/spherical_energy.hpp"
#include "fblab/surface.hpp"

namespace fblab::checks {

// Reproducible invariant suite behind the `check` subcommand.  Each entry
// asserts one module-level property at desk scale and reports a one-line
// detail string; failures name the invariant verbatim.

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  std::string name;
  bool fast = false;
  std::function<std::pair<bool, std::string>(int threads)> run;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace detail

/// Solve the half-plane-data problem on the unit ball, seeded with the 1D
/// layer composite; optionally warm-started from a half-resolution solve.
inline ScalarField seeded_half_plane_solve(const BetaProfile& profile, double mass,
                                           double eps, double h, int threads,
                                           bool two_grid = true) {
  const double root2m = std::sqrt(2.0 * mass);
  auto data = [root2m](const Vec& p) { return root2m * std::max(p[0], 0.0); };
  SolverConfig cfg;
  cfg.threads = threads;

  ScalarField coarse;
  if (two_grid && h < 1.0 / 48.0) {
    ScalarField dom = make_ball_field(2, 1.0, 2.0 * h);
    const LayerProfileGuess guess(profile, eps);
    fill_field(dom, guess);
    apply_dirichlet(dom, data);
    coarse = solve_peps(dom, profile, eps, cfg);
  }

  ScalarField dom = make_ball_field(2, 1.0, h);
  if (coarse.size() > 0) {
    const GridSampler cs(coarse);
    fill_field(dom, [&](const Vec& p) { return cs.value(p); });
  } else {
    const LayerProfileGuess guess(profile, eps);
    fill_field(dom, guess);
  }
  apply_dirichlet(dom, data);
  return solve_peps(dom, profile, eps, cfg);
}

/// Max |grad_h u| over interior nodes of the half-radius subdomain.
inline double half_radius_gradient_max(const ScalarField& u) {
  double mx = 0.0;
  for (int i = 0; i < u.shape[0]; ++i)
    for (int j = 0; j < u.shape[1]; ++j) {
      if (u.mask_at(i, j) != ScalarField::kInterior) continue;
      if (norm(u.point(i, j)) > 0.5) continue;
      mx = std::max(mx, norm(node_gradient(u, i, j)));
    }
  return mx;
}

/// Max |grad_h u| over interior nodes in the transition band 0 < u < eps.
inline double band_gradient_max(const ScalarField& u, double eps) {
  double mx = 0.0;
  for (int i = 0; i < u.shape[0]; ++i)
    for (int j = 0; j < u.shape[1]; ++j) {
      if (u.mask_at(i, j) != ScalarField::kInterior) continue;
      const double v = u.at(i, j);
      if (v <= 0.0 || v >= eps) continue;
      mx = std::max(mx, norm(node_gradient(u, i, j)));
    }
  return mx;
}

inline std::vector<Check> build_registry() {
  std::vector<Check> reg;
  auto add = [&](std::string name, bool fast,
                 std::function<std::pair<bool, std::string>(int)> fn) {
    reg.push_back({std::move(name), fast, std::move(fn)});
  };

  // ------------------------------------------------------------ mollifier
  add("mollifier: eval_B stays within [0, mass] and is nondecreasing", true,
      [](int) -> std::pair<bool, std::string> {
        const BetaProfile ps[] = {BetaProfile::polynomial(), BetaProfile::smooth(1.3),
                                  BetaProfile::tabulated({{0.0, 0.0}, {0.4, 2.0}, {1.0, 0.0}})};
        double worst = 0.0;
        for (const auto& p : ps) {
          double prev = 0.0;
          for (int i = 0; i <= 5000; ++i) {
            const double s = -0.5 + 2.0 * i / 5000.0;
            const double b = p.B(s);
            worst = std::max({worst, prev - b, -b, b - p.mass()});
            prev = b;
          }
        }
        return {worst <= 1e-14, "max violation " + detail::fmt(worst)};
      });

  add("mollifier: beta_eps mass is eps-invariant", true,
      [](int) -> std::pair<bool, std::string> {
        const BetaProfile p = BetaProfile::polynomial();
        double worst = 0.0;
        for (double eps : {1.0, 0.1, 0.01}) {
          double acc = 0.0;
          const int n = 40000;
          const double a = -0.1 * eps, b = 1.1 * eps, h = (b - a) / n;
          for (int i = 0; i < n; ++i) acc += h * p.beta_eps(a + (i + 0.5) * h, eps);
          worst = std::max(worst, std::abs(acc - p.mass()));
        }
        return {worst <= 1e-8, "max mass defect " + detail::fmt(worst)};
      });

  add("mollifier: beta_eps is nonnegative", true,
      [](int) -> std::pair<bool, std::string> {
        const BetaProfile ps[] = {BetaProfile::polynomial(), BetaProfile::smooth()};
        double mn = 0.0;
        for (const auto& p : ps)
          for (int i = -200; i <= 600; ++i) mn = std::min(mn, p.beta_eps(i / 400.0, 0.7));
        return {mn >= 0.0, "min value " + detail::fmt(mn)};
      });

  // ----------------------------------------------------------- grid_solver
  add("grid_solver: solved fields obey the maximum principle", false,
      [](int threads) -> std::pair<bool, std::string> {
        const BetaProfile poly = BetaProfile::polynomial();
        ScalarField dom = make_ball_field(2, 1.0, 1.0 / 48.0);
        fill_field(dom, [](const Vec& p) {
          return std::sqrt(2.0) * std::max(p[0], 0.0) - 0.2;
        });
        SolverConfig cfg;
        cfg.threads = threads;
        const ScalarField u = solve_peps(dom, poly, 0.08, cfg);
        double bmin = 1e300, bmax = -1e300, vmin = 1e300, vmax = -1e300;
        for (std::size_t n = 0; n < u.size(); ++n) {
          if (u.mask[n] == ScalarField::kDirichlet) {
            bmin = std::min(bmin, u.values[n]);
            bmax = std::max(bmax, u.values[n]);
          } else if (u.mask[n] == ScalarField::kInterior) {
            vmin = std::min(vmin, u.values[n]);
            vmax = std::max(vmax, u.values[n]);
          }
        }
        const bool ok = vmin >= std::min(0.0, bmin) - 1e-7 && vmax <= bmax + 1e-7;
        return {ok, "interior range [" + detail::fmt(vmin) + ", " + detail::fmt(vmax) +
                        "], boundary [" + detail::fmt(bmin) + ", " + detail::fmt(bmax) + "]"};
      });

  add("grid_solver: uniform interior Lipschitz across the eps ladder", false,
      [](int threads) -> std::pair<bool, std::string> {
        const BetaProfile poly = BetaProfile::polynomial();
        double lo = 1e300, hi = 0.0;
        for (double eps : {0.2, 0.1, 0.05, 0.025}) {
          const ScalarField u = seeded_half_plane_solve(poly, 1.0, eps, 1.0 / 64.0, threads);
          const double g = half_radius_gradient_max(u);
          lo = std::min(lo, g);
          hi = std::max(hi, g);
        }
        const double spread = hi / lo - 1.0;
        return {spread < 0.20, "gradient spread " + detail::fmt(100.0 * spread) + "%"};
      });

  add("grid_solver: transition-band gradient cap shrinks toward sqrt(2M)", false,
      [](int threads) -> std::pair<bool, std::string> {
        const BetaProfile poly = BetaProfile::polynomial();
        std::vector<double> margins;
        for (double eps : {0.2, 0.1, 0.05}) {
          const ScalarField u = seeded_half_plane_solve(poly, 1.0, eps, 1.0 / 128.0, threads);
          margins.push_back(band_gradient_max(u, eps) - std::sqrt(2.0));
        }
        const bool ok = margins[0] > margins[1] && margins[1] > margins[2];
        return {ok, "margins " + detail::fmt(margins[0]) + " > " + detail::fmt(margins[1]) +
                        " > " + detail::fmt(margins[2])};
      });

  add("grid_solver: lexicographic sweeps are bit deterministic", false,
      [](int) -> std::pair<bool, std::string> {
        const BetaProfile poly = BetaProfile::polynomial();
        ScalarField dom = make_ball_field(2, 1.0, 1.0 / 24.0);
        fill_field(dom, [](const Vec& p) { return std::max(p[0], 0.0); });
        SolverConfig cfg;
        cfg.sweep = SweepOrder::lexicographic;
        const ScalarField a = solve_peps(dom, poly, 0.1, cfg);
        const ScalarField b = solve_peps(dom, poly, 0.1, cfg);
        for (std::size_t n = 0; n < a.size(); ++n)
          if (a.mask[n] != ScalarField::kExterior && a.values[n] != b.values[n])
            return {false, "values differ at node " + std::to_string(n)};
        return {true, "fields identical"};
      });

  // ------------------------------------------------------ spherical_energy
  add("spherical_energy: closed forms of the sharp-interface functional", true,
      [](int) -> std::pair<bool, std::string> {
        const ShellQuadrature q2 = make_shell_quadrature(2, 256);
        const ShellQuadrature q3 = make_shell_quadrature(3, 64, 128);
        const ExactSampler hp2(ExactKind::half_plane(1.0), 2);
        const ExactSampler hp3(ExactKind::half_plane(1.0), 3);
        const double e2 =
            std::abs(spruck_S_limit(hp2, {0, 0, 0}, 0.7, 1.0, q2) - 2.0 * kPi);
        const double e3 =
            std::abs(spruck_S_limit(hp3, {0, 0, 0}, 0.7, 1.0, q3) - 4.0 * kPi);
        return {e2 <= 0.01 * 2.0 * kPi && e3 <= 0.01 * 4.0 * kPi,
                "defects " + detail::fmt(e2) + " (2D), " + detail::fmt(e3) + " (3D)"};
      });

  add("spherical_energy: scaling covariance on degree-one fields", true,
      [](int) -> std::pair<bool, std::string> {
        const ShellQuadrature q2 = make_shell_quadrature(2, 256);
        const ExactSampler hp(ExactKind::half_plane(1.0), 2);
        const double a = spruck_S_limit(hp, {0, 0, 0}, 0.4, 1.0, q2);
        const double b = spruck_S_limit(hp, {0, 0, 0}, 0.8, 1.0, q2);
        return {std::abs(a - b) <= 1e-10, "S(r) - S(2r) = " + detail::fmt(a - b)};
      });

  add("spherical_energy: monotonicity defect on a solved field", false,
      [](int threads) -> std::pair<bool, std::string> {
        const BetaProfile poly = BetaProfile::polynomial();
        const double eps = 0.1;
        const ScalarField u = seeded_half_plane_solve(poly, 1.0, eps, 1.0 / 64.0, threads);
        const GridSampler s(u);
        std::vector<double> radii;
        for (int i = 0; i < 12; ++i) radii.push_back(0.12 + 0.33 * i / 11.0);
        const ShellQuadrature q2 = make_shell_quadrature(2, 256);
        const EnergyProfile prof =
            monotonicity_profile(s, {0, 0, 0}, radii, SpruckMode::eps, q2, &poly, eps, 0.0);
        return {prof.min_defect() >= -5e-3, "min defect " + detail::fmt(prof.min_defect())};
      });

  add("spherical_energy: ACF product is symmetric and near pi^2/4", false,
      [](int) -> std::pair<bool, std::string> {
        const ScalarField u =
            make_exact_field(ExactKind::half_plane(0.5), 2, 1.0, 1.0 / 128.0);
        ScalarField v = u;
        fill_field(v, [](const Vec& p) { return std::max(-p[0], 0.0); });
        const double a = acf_phi(u, v, {0, 0, 0}, 0.4);
        const double b = acf_phi(v, u, {0, 0, 0}, 0.4);
        const double target = kPi * kPi / 4.0;
        const bool ok = a == b && std::abs(a - target) <= 0.005 * target;
        return {ok, "phi = " + detail::fmt(a) + " vs pi^2/4 = " + detail::fmt(target)};
      });

  // ------------------------------------------------------------ blowup_lab
  add("blowup_lab: rescale composition within the interpolation budget", true,
      [](int) -> std::pair<bool, std::string> {
        ScalarField f = make_centered_box_field(2, 1.0, 1.0 / 64.0);
        fill_field(f, [](const Vec& p) {
          return std::sqrt(2.0) * std::max(p[0], 0.0) + 0.2 * p[1];
        });
        const std::array<int, 3> shape{41, 41, 1};
        const ScalarField once = rescale(f, {0, 0, 0}, 0.25, shape);
        const ScalarField twice =
            rescale(rescale(f, {0, 0, 0}, 0.5, {81, 81, 1}), {0, 0, 0}, 0.5, shape);
        double worst = 0.0;
        for (std::size_t n = 0; n < once.size(); ++n)
          worst = std::max(worst, std::abs(once.values[n] - twice.values[n]));
        const double budget = 4.0 * (std::sqrt(2.0) + 0.2) * f.spacing;
        return {worst <= budget,
                "max gap " + detail::fmt(worst) + " budget " + detail::fmt(budget)};
      });

  add("blowup_lab: homogeneity deviation scales quadratically", true,
      [](int) -> std::pair<bool, std::string> {
        struct Quad final : FieldSampler {
          double c;
          explicit Quad(double s) : c(s) {}
          int dim() const override { return 2; }
          double value(const Vec& x) const override { return c * dot(x, x); }
          Vec gradient(const Vec& x) const override { return (2.0 * c) * x; }
        };
        const ShellQuadrature q2 = make_shell_quadrature(2, 128);
        const double base = homogeneity_deviation(Quad(1.0), {0, 0, 0}, 1.0, 2.0, q2, 256);
        const double nine = homogeneity_deviation(Quad(3.0), {0, 0, 0}, 1.0, 2.0, q2, 256);
        const double rel = std::abs(nine - 9.0 * base) / (9.0 * base);
        return {rel <= 1e-10, "relative defect " + detail::fmt(rel)};
      });

  add("blowup_lab: classifier is rotation invariant", true,
      [](int) -> std::pair<bool, std::string> {
        const int n = 512;
        for (int trial = 0; trial < 6; ++trial) {
          const double phi0 = 2.0 * kPi * (trial + 0.371) / 6.0;
          std::vector<double> g(static_cast<std::size_t>(n));
          for (int i = 0; i < n; ++i) {
            const double th = 2.0 * kPi * i / n - phi0;
            g[std::size_t(i)] = std::sqrt(3.0) * std::max(std::cos(th), 0.0) -
                                std::max(-std::cos(th), 0.0);
          }
          const BlowupClass c = classify_blowup_2d(g, 1.0, 1e-3);
          if (c.variant != BlowupVariant::two_plane ||
              std::abs(c.alpha - std::sqrt(3.0)) > 2e-3 || std::abs(c.beta - 1.0) > 2e-3)
            return {false, "failed at rotation " + detail::fmt(phi0)};
        }
        return {true, "6 rotations classified identically"};
      });

  add("blowup_lab: density labels are mutually exclusive", false,
      [](int) -> std::pair<bool, std::string> {
        const ScalarField hp =
            make_exact_field(ExactKind::half_plane(1.0), 2, 1.0, 1.0 / 48.0);
        FreeBoundarySet fb = extract_free_boundary(hp);
        FreeBoundarySet inner;
        for (const Vec& p : fb.points)
          if (std::abs(p[1]) < 0.4) inner.points.push_back(p);
        inner.labels.assign(inner.points.size(), DensityLabel::unknown);
        inner.densities.assign(inner.points.size(), 0.0);
        inner.density_ladders.resize(inner.points.size());
        const GridSampler s(hp);
        const FreeBoundarySet out =
            label_density_sets(inner, s, {0.3, 0.2, 0.1}, 0.05, 1.0, 96);
        for (std::size_t i = 0; i < out.points.size(); ++i)
          if (out.labels[i] != DensityLabel::half_density)
            return {false, "expected half_density everywhere on the half plane"};
        return {true, std::to_string(out.points.size()) + " points labeled half_density"};
      });

  add("blowup_lab: catenoid sphere-average non-degeneracy bound", false,
      [](int) -> std::pair<bool, std::string> {
        // (1/r^2) * surface integral of u over dB_r(x) >= sqrt(2M) pi r on a
        // cone point of the catenoid (M = 1/2), plus the sup-bound
        // sup_{B_r} u >= sqrt(2M) r / 4 it implies
        const ExactSampler cat(ExactKind::catenoid(), 3);
        const double th0 = catenoid_theta0();
        const Vec x0 = vec3(std::sin(th0), 0.0, std::cos(th0));
        const ShellQuadrature q3 = make_shell_quadrature(3, 64, 128);
        double worst_ratio = 1e300;
        for (double r : {0.1, 0.2, 0.3}) {
          double shell = 0.0;
          for (std::size_t i = 0; i < q3.dirs.size(); ++i)
            shell += q3.weights[i] * cat.value(x0 + r * q3.dirs[i]);
          worst_ratio = std::min(worst_ratio, shell / (kPi * r));  // sqrt(2M) = 1
          double sup = 0.0;
          const int m = 48;
          for (int a = 0; a <= m; ++a)
            for (int b = 0; b <= m; ++b)
              for (int c = 0; c <= m; ++c) {
                const Vec p = x0 + vec3(r * (2.0 * a / m - 1.0), r * (2.0 * b / m - 1.0),
                                        r * (2.0 * c / m - 1.0));
                if (norm(p - x0) <= r) sup = std::max(sup, cat.value(p));
              }
          if (sup < 0.25 * r)
            return {false, "sup bound failed at r = " + detail::fmt(r)};
        }
        return {worst_ratio >= 1.0 - 0.02,
                "min shell ratio vs sqrt(2M) pi r: " + detail::fmt(worst_ratio)};
      });

  // ---------------------------------------------------------- exact_library
  add("exact_library: reference fields are degree-one homogeneous", true,
      [](int) -> std::pair<bool, std::string> {
        const ShellQuadrature q2 = make_shell_quadrature(2, 128);
        const ShellQuadrature q3 = make_shell_quadrature(3, 32, 64);
        double worst = 0.0;
        worst = std::max(worst, homogeneity_deviation(
                                    ExactSampler(ExactKind::half_plane(1.0), 2),
                                    {0, 0, 0}, 0.5, 2.0, q2));
        worst = std::max(worst, homogeneity_deviation(
                                    ExactSampler(ExactKind::wedge(0.5), 2), {0, 0, 0},
                                    0.5, 2.0, q2));
        worst = std::max(worst, homogeneity_deviation(
                                    ExactSampler(ExactKind::two_plane(2.0, 1.0), 2),
                                    {0, 0, 0}, 0.5, 2.0, q2));
        worst = std::max(worst, homogeneity_deviation(
                                    ExactSampler(ExactKind::catenoid(), 3), {0, 0, 0},
                                    0.5, 2.0, q3));
        return {worst <= 1e-10, "max deviation " + detail::fmt(worst)};
      });

  add("exact_library: catenoid solves the spherical ODE", true,
      [](int) -> std::pair<bool, std::string> {
        const double th0 = catenoid_theta0();
        double worst = 0.0;
        for (int i = 0; i <= 10000; ++i) {
          const double th = 0.5 * th0 + (kPi - th0) * i / 10000.0;
          const auto [f, fp] = catenoid_f(th);
          worst = std::max(worst,
                           std::abs(catenoid_fpp(th) + std::cos(th) / std::sin(th) * fp +
                                    2.0 * f));
        }
        return {worst <= 1e-9, "max ODE residual " + detail::fmt(worst)};
      });

  add("exact_library: catenoid support identity needs a = 2", true,
      [](int) -> std::pair<bool, std::string> {
        std::vector<double> grid;
        for (int i = 0; i <= 4000; ++i) grid.push_back(0.1 + (kPi - 0.2) * i / 4000.0);
        const double good = catenoid_support_identity(grid, 2.0);
        const double bad = catenoid_support_identity(grid, 1.0);
        return {good <= 1e-12 && bad >= 0.5,
                "defect " + detail::fmt(good) + " with a=2, " + detail::fmt(bad) + " with a=1"};
      });

  add("exact_library: catenoid boundary slope gives mass one half", true,
      [](int) -> std::pair<bool, std::string> {
        const ExactKind cat = ExactKind::catenoid();
        const double th = catenoid_theta0() + 1e-7;
        const Vec p = vec3(std::sin(th), 0.0, std::cos(th));
        const double slope = norm(exact_gradient(cat, p, 3));
        return {std::abs(slope - 1.0) <= 1e-5,
                "|grad u| on the cone = " + detail::fmt(slope) + ", sqrt(2M) = 1"};
      });

  add("exact_library: 1D profile satisfies its first integral", true,
      [](int) -> std::pair<bool, std::string> {
        const BetaProfile poly = BetaProfile::polynomial();
        const double eps = 0.05;
        const OneDProfile prof(poly, eps);
        double worst = 0.0;
        for (double x : {0.02, 0.08, 0.15, 0.25}) {
          const double d = 1e-4;
          const double up = (-prof.value(x + 2 * d) + 8 * prof.value(x + d) -
                             8 * prof.value(x - d) + prof.value(x - 2 * d)) /
                            (12 * d);
          worst = std::max(worst, std::abs(up * up - 2.0 * poly.B(prof.value(x) / eps)));
        }
        return {worst <= 1e-8, "max first-integral defect " + detail::fmt(worst)};
      });

  // ------------------------------------------------------ support_geometry
  add("support_geometry: principal radii sum to the mean residual", true,
      [](int) -> std::pair<bool, std::string> {
        const double fp0 = catenoid_f(catenoid_theta0()).second;
        const SphericalFunction g = make_spherical_function(
            96, 192, [&](double th, double) { return catenoid_f(th).first / fp0; });
        double worst = 0.0;
        for (int j = 2; j < g.n_theta - 2; j += 3)
          for (int k = 0; k < g.n_phi; k += 17) {
            const SurfaceSample s = curvature_report(g, j, k);
            worst = std::max(worst, std::abs(s.radius1 + s.radius2 - s.mean_residual));
          }
        return {worst <= 1e-12, "max trace gap " + detail::fmt(worst)};
      });

  add("support_geometry: immersion equals the blow-up gradient", true,
      [](int) -> std::pair<bool, std::string> {
        const double fp0 = catenoid_f(catenoid_theta0()).second;
        const SphericalFunction g = make_spherical_function(
            256, 256, [&](double th, double) { return catenoid_f(th).first / fp0; });
        const ExactKind cat = ExactKind::catenoid();
        double worst = 0.0;
        for (int j = 4; j < g.n_theta - 4; j += 5)
          for (int k = 0; k < g.n_phi; k += 31) {
            if (!g.in_support(j, k)) continue;
            worst = std::max(
                worst, norm(immersion_X(g, j, k) - exact_gradient(cat, g.direction(j, k), 3)));
          }
        return {worst <= 1e-3, "max |X - grad u| = " + detail::fmt(worst)};
      });

  add("support_geometry: blow-up gradients are homogeneous of degree zero", true,
      [](int) -> std::pair<bool, std::string> {
        const ExactKind cat = ExactKind::catenoid();
        double worst = 0.0;
        for (double th : {0.8, 1.2, 1.9})
          for (double ph : {0.3, 2.2, 4.4})
            for (double r : {0.5, 1.0, 2.0}) {
              const Vec n = vec3(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                                 std::cos(th));
              worst = std::max(
                  worst, norm(exact_gradient(cat, r * n, 3) - exact_gradient(cat, n, 3)));
            }
        return {worst <= 1e-10, "max gradient drift " + detail::fmt(worst)};
      });

  add("support_geometry: catenoid surface stays inside sqrt(2M)", true,
      [](int) -> std::pair<bool, std::string> {
        const double fp0 = catenoid_f(catenoid_theta0()).second;
        const SphericalFunction g = make_spherical_function(
            128, 256, [&](double th, double) { return catenoid_f(th).first / fp0; });
        double worst = 0.0;
        for (int j = 1; j < g.n_theta - 1; ++j)
          for (int k = 0; k < g.n_phi; k += 13)
            if (g.in_support(j, k)) worst = std::max(worst, norm(immersion_X(g, j, k)));
        return {worst <= 1.0 + 1e-3, "max |X| = " + detail::fmt(worst) + ", sqrt(2M) = 1"};
      });

  add("support_geometry: curvature stencils converge at order >= 1.8", false,
      [](int) -> std::pair<bool, std::string> {
        const double fp0 = catenoid_f(catenoid_theta0()).second;
        std::vector<double> mean_errs, defect_errs;
        for (int n : {64, 128, 256}) {
          const SphericalFunction g = make_spherical_function(
              n, 2 * n, [&](double th, double) { return catenoid_f(th).first / fp0; });
          double mm = 0.0, dd = 0.0;
          for (int j = 2; j < g.n_theta - 2; ++j) {
            if (catenoid_f(g.theta(j)).first <= 0.0) continue;
            for (int k = 0; k < g.n_phi; k += 7) {
              const SurfaceSample s = curvature_report(g, j, k);
              mm = std::max(mm, std::abs(s.mean_residual));
              dd = std::max(dd, s.conformality_defect);
            }
          }
          mean_errs.push_back(mm);
          defect_errs.push_back(dd);
        }
        const double r1 = std::log2(mean_errs[0] / mean_errs[1]);
        const double r2 = std::log2(mean_errs[1] / mean_errs[2]);
        const double r3 = std::log2(defect_errs[0] / defect_errs[1]);
        const double r4 = std::log2(defect_errs[1] / defect_errs[2]);
        const double worst = std::min({r1, r2, r3, r4});
        return {worst >= 1.8, "min observed order " + detail::fmt(worst)};
      });

  // ----------------------------------------------------------- cli_harness
  add("cli_harness: FLD round trip is bit exact", true,
      [](int) -> std::pair<bool, std::string> {
        ScalarField f = make_ball_field(2, 0.7, 0.05);
        f.eps = 0.04;
        f.profile_name = "poly";
        f.profile_mass = 1.0;
        fill_field(f, [](const Vec& p) { return std::cos(5.0 * p[0]) * p[1]; });
        const std::string path =
            (std::filesystem::temp_directory_path() / "fblab_check_roundtrip.fld").string();
        write_fld(f, path);
        const ScalarField g = read_fld(path);
        std::filesystem::remove(path);
        std::filesystem::remove(path + ".raw");
        if (g.shape != f.shape || g.mask != f.mask) return {false, "metadata mismatch"};
        for (std::size_t n = 0; n < f.values.size(); ++n) {
          const bool both_nan = std::isnan(f.values[n]) && std::isnan(g.values[n]);
          if (!both_nan && f.values[n] != g.values[n])
            return {false, "raw value mismatch at node " + std::to_string(n)};
        }
        return {true, "meta, mask and raw words identical"};
      });

  return reg;
}

inline const std::vector<Check>& registry() {
  static const std::vector<Check> reg = build_registry();
  return reg;
}

inline std::vector<CheckResult> run_suite(bool fast_only, int threads,
                                          std::ostream* progress = nullptr) {
  std::vector<CheckResult> results;
  for (const Check& c : registry()) {
    if (fast_only && !c.fast) continue;
    CheckResult r;
    r.name = c.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [pass, detail] = c.run(threads);
      r.pass = pass;
      r.detail = detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress)
      (*progress) << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " -- " << r.detail
                  << " (" << detail::fmt(r.seconds) << "s)\n";
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace fblab::checks
