#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fblab/exact.hpp"
#include "fblab/solver.hpp"
#include "fblab/spherical_energy.hpp"

using namespace fblab;

namespace {
const Vec kOrigin{0.0, 0.0, 0.0};
}

TEST_CASE("shell quadrature weights sum to the sphere area") {
  CHECK(make_shell_quadrature(2, 256).area() == Catch::Approx(2.0 * kPi).margin(1e-12));
  CHECK(make_shell_quadrature(3, 48, 96).area() == Catch::Approx(4.0 * kPi).margin(1e-12));
}

TEST_CASE("limit functional closed forms") {
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const ShellQuadrature q3 = make_shell_quadrature(3, 64, 128);

  // constant negative field: integrand -N c^2 / r^2
  const ExactSampler neg(ExactKind::constant(-1.0), 2);
  CHECK(spruck_S_limit(neg, kOrigin, 1.0, 1.0, q2) == Catch::Approx(-4.0 * kPi).margin(1e-10));

  // half-plane solution sqrt(2) x1+: 2*pi in 2D, 4*pi = M Area(S^2) in 3D.
  // The shifted nodes make the aligned jump set integrate exactly.
  const ExactSampler hp2(ExactKind::half_plane(1.0), 2);
  const ExactSampler hp3(ExactKind::half_plane(1.0), 3);
  for (double r : {0.3, 0.7, 1.9})
    CHECK(spruck_S_limit(hp2, kOrigin, r, 1.0, q2) ==
          Catch::Approx(2.0 * kPi).margin(1e-10));
  CHECK(spruck_S_limit(hp3, kOrigin, 0.8, 1.0, q3) ==
        Catch::Approx(4.0 * kPi).margin(1e-9));

  // zero field
  const ExactSampler zero(ExactKind::constant(0.0), 2);
  CHECK(spruck_S_limit(zero, kOrigin, 1.0, 1.0, q2) == 0.0);
}

TEST_CASE("eps functional agrees with the limit on degree-one fields") {
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const BetaProfile poly = BetaProfile::polynomial();
  const ExactSampler hp(ExactKind::half_plane(1.0), 2);
  const ExactSampler neg(ExactKind::constant(-1.0), 2);
  for (double r : {0.4, 1.0}) {
    const double s_eps = spruck_S_eps(hp, kOrigin, r, poly, 1e-9, q2);
    const double s_lim = spruck_S_limit(hp, kOrigin, r, 1.0, q2);
    CHECK(s_eps == Catch::Approx(s_lim).margin(1e-9));
  }
  CHECK(spruck_S_eps(neg, kOrigin, 1.0, poly, 0.5, q2) ==
        Catch::Approx(-4.0 * kPi).margin(1e-10));
}

TEST_CASE("closed forms survive grid sampling within the stencil error") {
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const ScalarField f =
      make_exact_field(ExactKind::half_plane(1.0), 2, 1.0, 1.0 / 128.0);
  const GridSampler s(f);
  CHECK(spruck_S_limit(s, kOrigin, 0.5, 1.0, q2) ==
        Catch::Approx(2.0 * kPi).epsilon(0.01));
}

TEST_CASE("monotonicity profiles") {
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const ExactSampler hp(ExactKind::half_plane(1.0), 2);
  const std::vector<double> radii{0.2, 0.3, 0.4, 0.6, 0.9};

  // degree-one homogeneous: constant table
  const EnergyProfile flat =
      monotonicity_profile(hp, kOrigin, radii, SpruckMode::limit, q2, nullptr, 0.0, 1.0);
  REQUIRE(flat.values.size() == radii.size());
  for (double d : flat.defects) CHECK(std::abs(d) <= 1e-8);

  // constant negative field: -4 pi / r^2 rises toward zero
  const ExactSampler neg(ExactKind::constant(-1.0), 2);
  const EnergyProfile rising =
      monotonicity_profile(neg, kOrigin, radii, SpruckMode::limit, q2, nullptr, 0.0, 1.0);
  for (std::size_t i = 0; i < radii.size(); ++i)
    CHECK(rising.values[i] ==
          Catch::Approx(-4.0 * kPi / (radii[i] * radii[i])).margin(1e-9));
  CHECK(rising.min_defect() > 0.0);

  CHECK_THROWS_AS(
      monotonicity_profile(hp, kOrigin, {0.5}, SpruckMode::limit, q2, nullptr, 0.0, 1.0),
      invalid_parameter_error);
  CHECK_THROWS_AS(monotonicity_profile(hp, kOrigin, {0.5, 0.2}, SpruckMode::limit, q2,
                                       nullptr, 0.0, 1.0),
                  invalid_parameter_error);
}

TEST_CASE("eps monotonicity on a solved field") {
  // desk-scale version of the acceptance run
  const BetaProfile poly = BetaProfile::polynomial();
  const double eps = 0.1;
  ScalarField dom = make_ball_field(2, 1.0, 1.0 / 64.0);
  fill_field(dom, [](const Vec& p) { return std::sqrt(2.0) * std::max(p[0], 0.0); });
  SolverConfig cfg;
  cfg.threads = 2;
  const ScalarField u = solve_peps(dom, poly, eps, cfg);
  const GridSampler s(u);
  std::vector<double> radii;
  for (int i = 0; i < 10; ++i) radii.push_back(0.15 + 0.3 * i / 9.0);
  const ShellQuadrature q2 = make_shell_quadrature(2, 256);
  const EnergyProfile prof =
      monotonicity_profile(s, kOrigin, radii, SpruckMode::eps, q2, &poly, eps, 0.0);
  CHECK(prof.min_defect() >= -5e-3);
}

TEST_CASE("ACF product for the crossing pair") {
  const ScalarField u =
      make_exact_field(ExactKind::half_plane(0.5), 2, 1.0, 1.0 / 128.0);  // x1+
  ScalarField v = u;
  fill_field(v, [](const Vec& p) { return std::max(-p[0], 0.0); });  // x1-

  std::vector<double> table;
  for (double r : {0.2, 0.4, 0.8}) {
    const double phi = acf_phi(u, v, kOrigin, r);
    table.push_back(phi);
    CHECK(phi == Catch::Approx(kPi * kPi / 4.0).epsilon(0.005));
  }
  // nondecreasing up to the quadrature noise floor
  for (std::size_t i = 0; i + 1 < table.size(); ++i)
    CHECK(table[i + 1] - table[i] >= -1e-3 * table[i]);

  // symmetry of the product
  CHECK(acf_phi(u, v, kOrigin, 0.4) == acf_phi(v, u, kOrigin, 0.4));

  // zero factor kills the product
  ScalarField zero = u;
  fill_field(zero, [](const Vec&) { return 0.0; });
  CHECK(acf_phi(u, zero, kOrigin, 0.4) == 0.0);

  // mismatched grids
  const ScalarField other = make_exact_field(ExactKind::half_plane(0.5), 2, 1.0, 1.0 / 64.0);
  CHECK_THROWS_AS(acf_phi(u, other, kOrigin, 0.4), invalid_pair_error);
}

TEST_CASE("shells that exit the domain raise out-of-domain") {
  const ScalarField f = make_exact_field(ExactKind::half_plane(1.0), 2, 0.5, 1.0 / 32.0);
  const GridSampler s(f);
  const ShellQuadrature q2 = make_shell_quadrature(2, 64);
  CHECK_THROWS_AS(spruck_S_limit(s, kOrigin, 0.8, 1.0, q2), out_of_domain_error);
}
