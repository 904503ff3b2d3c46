// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Tolerances and runtime budgets are pinned in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fblab/blowup.hpp"
#include "fblab/exact.hpp"
#include "fblab/invariants.hpp"
#include "fblab/mollifier.hpp"
#include "fblab/solver.hpp"
#include "fblab/spherical_energy.hpp"
#include "fblab/surface.hpp"

using namespace fblab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string label;
  double time_budget_s;  // 0: no budget stated
  std::function<Outcome()> run;
};

const int kThreads = 2;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// |x|^2 with exact gradient, oracle input for the homogeneity functional
struct QuadraticSampler final : FieldSampler {
  int dim() const override { return 2; }
  double value(const Vec& x) const override { return dot(x, x); }
  Vec gradient(const Vec& x) const override { return 2.0 * x; }
};

Outcome catenoid_ode_check() {
  const double th0 = catenoid_theta0();
  double worst = 0.0;
  const int n = 10000;
  for (int i = 0; i <= n; ++i) {
    const double th = 0.5 * th0 + (kPi - th0) * i / n;
    const auto [f, fp] = catenoid_f(th);
    worst = std::max(worst,
                     std::abs(catenoid_fpp(th) + std::cos(th) / std::sin(th) * fp + 2.0 * f));
  }
  return {worst <= 1e-9, "max |f'' + cot f' + 2f| = " + fmt(worst) + " (<= 1e-9)"};
}

Outcome support_identity_check() {
  std::vector<double> grid;
  const int n = 10000;
  for (int i = 0; i <= n; ++i) grid.push_back(0.1 + (kPi - 0.2) * i / n);
  const double defect = catenoid_support_identity(grid, 2.0);
  return {defect <= 1e-12, "max |H - f| = " + fmt(defect) + " (<= 1e-12)"};
}

Outcome theta0_check() {
  const double th0 = catenoid_theta0();
  const double res = std::abs(catenoid_f(th0).first);
  const bool bracket = catenoid_f(th0 - 1e-3).first < 0.0 && catenoid_f(th0 + 1e-3).first > 0.0;
  const bool range = th0 > 0.0 && th0 < 0.5 * kPi;
  return {res <= 1e-12 && bracket && range,
          "theta0 = " + fmt(th0) + ", |f(theta0)| = " + fmt(res) +
              (bracket ? ", sign change bracketed" : ", bracket FAILED")};
}

Outcome spruck_closed_forms() {
  const ScalarField f2 = make_exact_field(ExactKind::half_plane(1.0), 2, 1.0, 1.0 / 128.0);
  const GridSampler s2(f2);
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const double v2 = spruck_S_limit(s2, {0, 0, 0}, 0.5, 1.0, q2);
  const double e2 = std::abs(v2 - 2.0 * kPi) / (2.0 * kPi);

  const ScalarField f3 = make_exact_field(ExactKind::half_plane(1.0), 3, 1.0, 1.0 / 128.0);
  const GridSampler s3(f3);
  const ShellQuadrature q3 = make_shell_quadrature(3, 256, 512);
  const double v3 = spruck_S_limit(s3, {0, 0, 0}, 0.5, 1.0, q3);
  const double e3 = std::abs(v3 - 4.0 * kPi) / (4.0 * kPi);

  return {e2 <= 0.01 && e3 <= 0.01,
          "2D: " + fmt(v2) + " vs 2pi (" + fmt(100 * e2) + "%), 3D: " + fmt(v3) +
              " vs 4pi (" + fmt(100 * e3) + "%), tolerance 1%"};
}

Outcome eps_monotonicity() {
  const BetaProfile poly = BetaProfile::polynomial();
  const double eps = 0.05;
  const ScalarField u =
      checks::seeded_half_plane_solve(poly, 1.0, eps, 1.0 / 256.0, kThreads);
  const GridSampler s(u);
  std::vector<double> radii;
  for (int i = 0; i < 20; ++i) radii.push_back(0.1 + 0.35 * i / 19.0);
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const EnergyProfile prof =
      monotonicity_profile(s, {0, 0, 0}, radii, SpruckMode::eps, q2, &poly, eps, 0.0);
  return {prof.min_defect() >= -5e-3,
          "min S_eps defect over 20 radii = " + fmt(prof.min_defect()) + " (>= -5e-3)"};
}

Outcome homogeneity_checks() {
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const ShellQuadrature q3 = make_shell_quadrature(3, 48, 96);
  double worst_cone = 0.0;
  worst_cone = std::max(worst_cone,
                        homogeneity_deviation(ExactSampler(ExactKind::half_plane(1.0), 2),
                                              {0, 0, 0}, 0.5, 2.0, q2));
  worst_cone = std::max(worst_cone,
                        homogeneity_deviation(ExactSampler(ExactKind::wedge(0.5), 2),
                                              {0, 0, 0}, 0.5, 2.0, q2));
  worst_cone = std::max(
      worst_cone, homogeneity_deviation(ExactSampler(ExactKind::two_plane(std::sqrt(3.0), 1.0), 2),
                                        {0, 0, 0}, 0.5, 2.0, q2));
  worst_cone = std::max(worst_cone,
                        homogeneity_deviation(ExactSampler(ExactKind::catenoid(), 3),
                                              {0, 0, 0}, 0.5, 2.0, q3));
  const double quad_dev =
      homogeneity_deviation(QuadraticSampler(), {0, 0, 0}, 1.0, 2.0, q2, 2048);
  const double quad_err = std::abs(quad_dev - 3.0 * kPi);
  return {worst_cone <= 1e-10 && quad_err <= 1e-6,
          "cones: " + fmt(worst_cone) + " (<= 1e-10); |x|^2 shell [1,2]: " + fmt(quad_dev) +
              " vs 3pi, err " + fmt(quad_err) + " (<= 1e-6)"};
}

Outcome classifier_cases() {
  const int n = 512;
  const double tol = 1e-3;
  auto sample = [&](const std::function<double(double)>& g) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[std::size_t(i)] = g(2.0 * kPi * i / n);
    return v;
  };
  const auto half =
      sample([](double th) { return std::sqrt(2.0) * std::max(std::cos(th), 0.0); });
  const auto wedge = sample([](double th) { return 0.5 * std::abs(std::cos(th)); });
  const auto two = sample([](double th) {
    return std::sqrt(3.0) * std::max(std::cos(th), 0.0) - std::max(-std::cos(th), 0.0);
  });
  const BlowupClass c1 = classify_blowup_2d(half, 1.0, tol);
  const BlowupClass c2 = classify_blowup_2d(wedge, 1.0, tol);
  const BlowupClass c3 = classify_blowup_2d(two, 1.0, tol);
  const BlowupClass c4 = classify_blowup_2d(two, 1.5, tol);  // slope identity must fail
  const bool ok1 = c1.variant == BlowupVariant::half_plane &&
                   std::abs(c1.alpha - std::sqrt(2.0)) <= tol;
  const bool ok2 = c2.variant == BlowupVariant::wedge && std::abs(c2.alpha - 0.5) <= tol;
  const bool ok3 = c3.variant == BlowupVariant::two_plane &&
                   std::abs(c3.alpha * c3.alpha - c3.beta * c3.beta - 2.0) <= 2 * tol;
  const bool ok4 = c4.variant == BlowupVariant::unclassified;
  return {ok1 && ok2 && ok3 && ok4,
          std::string("half_plane ") + (ok1 ? "ok" : "FAIL") + ", wedge " +
              (ok2 ? "ok" : "FAIL") + ", two_plane " + (ok3 ? "ok" : "FAIL") +
              ", rejection " + (ok4 ? "ok" : "FAIL")};
}

Outcome acf_constancy() {
  const ScalarField u = make_exact_field(ExactKind::half_plane(0.5), 2, 1.0, 1.0 / 256.0);
  ScalarField v = u;
  fill_field(v, [](const Vec& p) { return std::max(-p[0], 0.0); });
  const double target = kPi * kPi / 4.0;
  std::vector<double> table;
  double worst_rel = 0.0;
  for (double r : {0.2, 0.4, 0.8}) {
    const double phi = acf_phi(u, v, {0, 0, 0}, r);
    table.push_back(phi);
    worst_rel = std::max(worst_rel, std::abs(phi - target) / target);
  }
  double min_defect = 0.0;
  for (std::size_t i = 0; i + 1 < table.size(); ++i)
    min_defect = std::min(min_defect, table[i + 1] - table[i]);
  const bool monotone = min_defect >= -0.005 * target;
  return {worst_rel <= 0.005 && monotone,
          "max |Phi - pi^2/4| / (pi^2/4) = " + fmt(100 * worst_rel) +
              "% (<= 0.5%), min defect " + fmt(min_defect)};
}

Outcome immersion_checks() {
  const double fp0 = catenoid_f(catenoid_theta0()).second;
  const SphericalFunction g = make_spherical_function(
      128, 256, [&](double th, double) { return catenoid_f(th).first / fp0; });

  double max_mean = 0.0, max_defect = 0.0;
  for (int j = 1; j < g.n_theta - 1; ++j)
    for (int k = 0; k < g.n_phi; ++k) {
      if (!g.in_support(j, k)) continue;
      const SurfaceSample s = curvature_report(g, j, k);
      max_mean = std::max(max_mean, std::abs(s.mean_residual));
      if (j >= 2 && j <= g.n_theta - 3)
        max_defect = std::max(max_defect, s.conformality_defect);
    }

  const auto boundary = support_boundary(g);
  double x_err = 0.0, ang_err = 0.0;
  for (const auto& p : boundary) {
    x_err = std::max(x_err, std::abs(boundary_X_norm(g, p) - 1.0));
  }
  const auto angles = contact_angle(g, boundary, 0.5);
  for (const auto& e : angles) ang_err = std::max(ang_err, std::abs(e.angle - 0.5 * kPi));

  const SurfaceMesh mesh = export_mesh(g);
  const int chi = mesh.euler_characteristic();
  const int loops = mesh.boundary_loop_count();

  const bool ok = max_defect <= 2e-2 && max_mean <= 2e-2 && x_err <= 1e-3 &&
                  ang_err <= 1e-2 && chi == 0 && loops == 2;
  return {ok, "conformality " + fmt(max_defect) + " (<= 2e-2), mean residual " +
                  fmt(max_mean) + " (<= 2e-2), boundary |X|-1: " + fmt(x_err) +
                  " (<= 1e-3), angle-pi/2: " + fmt(ang_err) + " (<= 1e-2), chi = " +
                  std::to_string(chi) + ", loops = " + std::to_string(loops)};
}

double one_d_solve_error(double h, double eps, double* dom_var_out) {
  const BetaProfile poly = BetaProfile::polynomial();
  const OneDProfile exact(poly, eps);
  ScalarField dom = make_box_field(1, {int(std::lround(2.0 / h)) + 1, 1, 1}, h,
                                   {-1.0, 0.0, 0.0});
  fill_field(dom, [&](const Vec& p) { return exact.value(p[0] + 1.0); });
  SolverConfig cfg;
  cfg.threads = 1;
  const ScalarField u = solve_peps(dom, poly, eps, cfg);
  double err = 0.0;
  for (int i = 0; i < u.shape[0]; ++i)
    err = std::max(err, std::abs(u.at(i) - exact.value(u.point(i)[0] + 1.0)));
  if (dom_var_out) {
    ScalarField phi = dom;
    fill_field(phi, [](const Vec& p) {
      const double r2 = p[0] * p[0];
      return r2 < 0.25 ? std::pow(0.25 - r2, 3) : 0.0;
    });
    *dom_var_out = std::abs(domain_variation_residual(u, poly, eps, phi));
  }
  return err;
}

Outcome solver_oracle_1d() {
  const double eps = 0.02;
  const double h = 1.0 / 512.0;
  double dv_h = 0.0, dv_h2 = 0.0;
  const double err = one_d_solve_error(h, eps, &dv_h);
  const double err2 = one_d_solve_error(0.5 * h, eps, &dv_h2);
  (void)err2;
  const double budget = 5.0 * (h * h + eps);
  const bool ok = err <= budget && dv_h <= 5.0 * h && dv_h2 <= 5.0 * (0.5 * h);
  return {ok, "max node error " + fmt(err) + " (<= " + fmt(budget) +
                  "), domain-variation residual " + fmt(dv_h) + " (<= " + fmt(5.0 * h) +
                  ") and " + fmt(dv_h2) + " at h/2 (<= " + fmt(2.5 * h) + ")"};
}

Outcome gradient_caps() {
  const BetaProfile poly = BetaProfile::polynomial();
  std::vector<double> margins;
  for (double eps : {0.2, 0.1, 0.05}) {
    const ScalarField u =
        checks::seeded_half_plane_solve(poly, 1.0, eps, 1.0 / 128.0, kThreads);
    margins.push_back(checks::band_gradient_max(u, eps) - std::sqrt(2.0));
  }
  const bool shrinking = margins[0] > margins[1] && margins[1] > margins[2];
  const bool above = margins[2] > 0.0;
  return {shrinking && above,
          "band margins over sqrt(2M): " + fmt(margins[0]) + " > " + fmt(margins[1]) +
              " > " + fmt(margins[2]) + (shrinking ? " (monotone)" : " (NOT monotone)")};
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"catenoid spherical ODE residual on 10^4 analytic nodes", 1.0, catenoid_ode_check},
      {"catenoid support-function identity at a = 2", 1.0, support_identity_check},
      {"theta0 bisection root with verified sign change", 0.0, theta0_check},
      {"sharp-interface shell energy closed forms (2D/3D half plane)", 30.0,
       spruck_closed_forms},
      {"S_eps monotonicity on the solved half-plane field (eps = 0.05, h = 1/256)", 120.0,
       eps_monotonicity},
      {"homogeneity deviation: zero on cones, 3pi for |x|^2", 0.0, homogeneity_checks},
      {"two-dimensional blow-up classification catalogue", 0.0, classifier_cases},
      {"ACF product constancy at pi^2/4", 0.0, acf_constancy},
      {"catenoid immersion: conformal, minimal, ring type, right angle", 60.0,
       immersion_checks},
      {"1D solver against the exact layer profile (h = 1/512, eps = 0.02)", 0.0,
       solver_oracle_1d},
      {"transition-band gradient cap shrinks along the eps ladder", 0.0, gradient_caps},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool within_budget = true;
    std::string budget_note;
    if (criteria[i].time_budget_s > 0.0) {
      within_budget = secs < criteria[i].time_budget_s;
      budget_note = ", budget " + fmt(criteria[i].time_budget_s) + "s";
    }
    const bool pass = out.pass && within_budget;
    if (!pass) ++failed;
    std::printf("[%s] criterion %zu: %s -- %s (%.1fs%s)\n", pass ? "PASS" : "FAIL", i + 1,
                criteria[i].label.c_str(), out.detail.c_str(), secs, budget_note.c_str());
    std::fflush(stdout);
  }
  if (failed == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d of %zu criteria FAILED\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
