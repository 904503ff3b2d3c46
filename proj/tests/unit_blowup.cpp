#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fblab/blowup.hpp"
#include "fblab/exact.hpp"

using namespace fblab;

namespace {

const Vec kOrigin{0.0, 0.0, 0.0};

// |x|^2 with its gradient, for the homogeneity-deviation oracle
struct QuadraticSampler final : FieldSampler {
  int d;
  double c;
  QuadraticSampler(int dim, double scale = 1.0) : d(dim), c(scale) {}
  int dim() const override { return d; }
  double value(const Vec& x) const override { return c * dot(x, x); }
  Vec gradient(const Vec& x) const override { return (2.0 * c) * x; }
};

std::vector<double> sample_circle(int n, const std::function<double(double)>& g) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[std::size_t(i)] = g(2.0 * kPi * i / n);
  return v;
}

}  // namespace

TEST_CASE("rescale identities") {
  ScalarField f = make_centered_box_field(2, 1.0, 1.0 / 32.0);
  fill_field(f, [](const Vec& p) { return dot(p, p); });

  // identity scale onto the same grid
  const ScalarField same = rescale(f, kOrigin, 1.0, {33, 33, 1});
  for (int i = 0; i < same.shape[0]; ++i)
    for (int j = 0; j < same.shape[1]; ++j) {
      const Vec p = same.point(i, j);
      CHECK(same.at(i, j) == Catch::Approx(dot(p, p)).margin(1e-12));
    }

  // u = |x|^2 at rho = 0.5 becomes 0.5 |x|^2
  const ScalarField half = rescale(f, kOrigin, 0.5, {33, 33, 1});
  for (int i = 0; i < half.shape[0]; ++i)
    for (int j = 0; j < half.shape[1]; ++j) {
      const Vec p = half.point(i, j);
      CHECK(half.at(i, j) == Catch::Approx(0.5 * dot(p, p)).margin(1e-3));
    }

  // degree-one fields are fixed points (piecewise-linear resampling is exact)
  const ScalarField hp = make_exact_field(ExactKind::half_plane(1.0), 2, 1.0, 1.0 / 32.0);
  const ScalarField hp_scaled = rescale(hp, kOrigin, 0.25, {33, 33, 1});
  for (int i = 0; i < hp_scaled.shape[0]; ++i)
    for (int j = 0; j < hp_scaled.shape[1]; ++j) {
      const Vec p = hp_scaled.point(i, j);
      CHECK(hp_scaled.at(i, j) ==
            Catch::Approx(std::sqrt(2.0) * std::max(p[0], 0.0)).margin(1e-12));
    }

  CHECK_THROWS_AS(rescale(f, kOrigin, 4.0, {33, 33, 1}), out_of_domain_error);
  CHECK_THROWS_AS(rescale(f, kOrigin, -1.0, {33, 33, 1}), invalid_parameter_error);
}

TEST_CASE("rescale composition stays within the double-interpolation budget") {
  ScalarField f = make_centered_box_field(2, 1.0, 1.0 / 64.0);
  fill_field(f, [](const Vec& p) { return std::sqrt(2.0) * std::max(p[0], 0.0) + 0.2 * p[1]; });
  const std::array<int, 3> shape{41, 41, 1};
  const ScalarField once = rescale(f, kOrigin, 0.25, shape);
  const ScalarField twice = rescale(rescale(f, kOrigin, 0.5, {81, 81, 1}), kOrigin, 0.5, shape);
  const double lip = std::sqrt(2.0) + 0.2;
  for (int i = 0; i < shape[0]; ++i)
    for (int j = 0; j < shape[1]; ++j)
      CHECK(std::abs(once.at(i, j) - twice.at(i, j)) <= 4.0 * lip * f.spacing);
}

TEST_CASE("homogeneity deviation on exact fields") {
  const ShellQuadrature q2 = make_shell_quadrature(2, 128);
  const ShellQuadrature q3 = make_shell_quadrature(3, 32, 64);

  const ExactSampler cones2[] = {ExactSampler(ExactKind::half_plane(1.0), 2),
                                 ExactSampler(ExactKind::wedge(0.5), 2),
                                 ExactSampler(ExactKind::two_plane(2.0, 1.0), 2)};
  for (const auto& s : cones2)
    CHECK(homogeneity_deviation(s, kOrigin, 0.5, 2.0, q2) <= 1e-10);
  const ExactSampler cat(ExactKind::catenoid(), 3);
  CHECK(homogeneity_deviation(cat, kOrigin, 0.5, 2.0, q3) <= 1e-10);

  // |x|^2 on the shell [1,2]: integrand r^2, measure 2 pi dr/r -> 3 pi
  const QuadraticSampler quad(2);
  CHECK(homogeneity_deviation(quad, kOrigin, 1.0, 2.0, q2, 2048) ==
        Catch::Approx(3.0 * kPi).margin(1e-6));

  // quadratic scaling in the field amplitude
  const QuadraticSampler scaled(2, 3.0);
  const double base = homogeneity_deviation(quad, kOrigin, 1.0, 2.0, q2, 256);
  const double nine = homogeneity_deviation(scaled, kOrigin, 1.0, 2.0, q2, 256);
  CHECK(nine == Catch::Approx(9.0 * base).epsilon(1e-10));

  CHECK_THROWS_AS(homogeneity_deviation(quad, kOrigin, 2.0, 1.0, q2),
                  invalid_parameter_error);
}

TEST_CASE("free boundary extraction") {
  // half plane: all transition points sit on {x1 = 0}
  const ScalarField hp = make_exact_field(ExactKind::half_plane(1.0), 2, 1.0, 1.0 / 64.0);
  const FreeBoundarySet fb = extract_free_boundary(hp);
  REQUIRE(!fb.points.empty());
  for (const Vec& p : fb.points) CHECK(std::abs(p[0]) <= hp.spacing);
  for (auto label : fb.labels) CHECK(label == DensityLabel::unknown);

  // positive everywhere: empty set
  const ScalarField pos = make_exact_field(ExactKind::constant(2.0), 2, 1.0, 1.0 / 16.0);
  CHECK(extract_free_boundary(pos).points.empty());

  // catenoid: transitions within 2h of the double cone theta = theta0, pi - theta0
  const double h3 = 1.0 / 24.0;
  const ScalarField cat = make_exact_field(ExactKind::catenoid(), 3, 1.0, h3);
  const FreeBoundarySet fbc = extract_free_boundary(cat);
  REQUIRE(!fbc.points.empty());
  const double th0 = catenoid_theta0();
  for (const Vec& p : fbc.points) {
    const double r = norm(p);
    if (r < 4.0 * h3) continue;  // vertex cells carry no angular information
    const double th = std::acos(std::clamp(p[2] / r, -1.0, 1.0));
    const double dist = std::min(std::abs(th - th0), std::abs(th - (kPi - th0))) * r;
    CHECK(dist <= 2.0 * h3);
  }
}

TEST_CASE("lebesgue densities of model positivity sets") {
  const std::vector<double> radii{0.4, 0.2, 0.1};

  const ExactSampler hp(ExactKind::half_plane(1.0), 2);
  CHECK(lebesgue_density(hp, kOrigin, radii).theta == Catch::Approx(0.5).margin(5e-3));

  const ExactSampler wedge(ExactKind::wedge(0.5), 2);
  CHECK(lebesgue_density(wedge, kOrigin, radii).theta == Catch::Approx(1.0).margin(5e-3));

  // catenoid vertex: the positivity cone fills the band fraction cos(theta0)
  const ExactSampler cat(ExactKind::catenoid(), 3);
  const DensityEstimate est = lebesgue_density(cat, kOrigin, radii);
  CHECK(est.theta == Catch::Approx(std::cos(catenoid_theta0())).margin(5e-3));
  CHECK(est.ladder.size() == radii.size());

  CHECK_THROWS_AS(lebesgue_density(hp, kOrigin, {0.1, 0.2}), invalid_parameter_error);
}

TEST_CASE("non-degeneracy indicator") {
  const std::vector<double> radii{0.4, 0.2, 0.1};
  const ExactSampler hp(ExactKind::half_plane(1.0), 2);
  // (1/r) avg of sqrt(2) x1+ over B_r: sqrt(2) * 2/(3 pi), scale free
  const double expected = std::sqrt(2.0) * 2.0 / (3.0 * kPi);
  CHECK(nondegeneracy_indicator(hp, kOrigin, radii) ==
        Catch::Approx(expected).margin(2e-3));

  const ExactSampler zero(ExactKind::constant(0.0), 2);
  CHECK(nondegeneracy_indicator(zero, kOrigin, radii) == 0.0);

  // the stronger sup bound for the half plane: sup_{B_r} u+ = sqrt(2) r
  const BallStats s = ball_stats(hp, kOrigin, 0.3);
  CHECK(s.plus_integral > 0.0);
}

TEST_CASE("density labels") {
  const std::vector<double> radii{0.3, 0.2, 0.1};

  const ScalarField hp = make_exact_field(ExactKind::half_plane(1.0), 2, 1.0, 1.0 / 64.0);
  FreeBoundarySet fb = extract_free_boundary(hp);
  // keep points whose density balls stay inside the grid
  FreeBoundarySet inner;
  for (const Vec& p : fb.points)
    if (std::abs(p[1]) < 0.5) inner.points.push_back(p);
  inner.labels.assign(inner.points.size(), DensityLabel::unknown);
  inner.densities.assign(inner.points.size(), 0.0);
  inner.density_ladders.resize(inner.points.size());
  const GridSampler s(hp);
  const FreeBoundarySet labeled = label_density_sets(inner, s, radii, 0.05, 1.0, 128);
  REQUIRE(!labeled.points.empty());
  for (std::size_t i = 0; i < labeled.points.size(); ++i) {
    CHECK(labeled.labels[i] == DensityLabel::half_density);
    CHECK(labeled.densities[i] == Catch::Approx(0.5).margin(0.05));
    CHECK(labeled.density_ladders[i].size() == radii.size());
  }

  // wedge: full density, nondegenerate
  const ExactSampler wedge(ExactKind::wedge(0.5), 2);
  FreeBoundarySet origin_only;
  origin_only.points.push_back(kOrigin);
  origin_only.labels.assign(1, DensityLabel::unknown);
  origin_only.densities.assign(1, 0.0);
  origin_only.density_ladders.resize(1);
  const FreeBoundarySet wl = label_density_sets(origin_only, wedge, radii, 0.05, 1.0, 192);
  CHECK(wl.labels[0] == DensityLabel::full_density);

  // catenoid point away from the vertex: smooth one-phase boundary
  const ExactSampler cat(ExactKind::catenoid(), 3);
  const double th0 = catenoid_theta0();
  FreeBoundarySet cone_pt;
  cone_pt.points.push_back(vec3(std::sin(th0), 0.0, std::cos(th0)));
  cone_pt.labels.assign(1, DensityLabel::unknown);
  cone_pt.densities.assign(1, 0.0);
  cone_pt.density_ladders.resize(1);
  const FreeBoundarySet cl =
      label_density_sets(cone_pt, cat, {0.2, 0.1, 0.05}, 0.05, 0.5, 64);
  CHECK(cl.labels[0] == DensityLabel::half_density);

  // degenerate: the zero field never clears the indicator cut
  const ExactSampler zero(ExactKind::constant(0.0), 2);
  const FreeBoundarySet zl = label_density_sets(origin_only, zero, radii, 0.05, 1.0, 64);
  CHECK(zl.labels[0] == DensityLabel::degenerate);
}

TEST_CASE("2D classifier on the three model traces") {
  const int n = 512;
  const double tol = 1e-3;

  const auto half = sample_circle(
      n, [](double th) { return std::sqrt(2.0) * std::max(std::cos(th), 0.0); });
  const BlowupClass c1 = classify_blowup_2d(half, 1.0, tol);
  CHECK(c1.variant == BlowupVariant::half_plane);
  CHECK(c1.alpha == Catch::Approx(std::sqrt(2.0)).margin(1e-3));
  CHECK(c1.normal[0] == Catch::Approx(1.0).margin(1e-6));

  const auto wedge =
      sample_circle(n, [](double th) { return 0.5 * std::abs(std::cos(th)); });
  const BlowupClass c2 = classify_blowup_2d(wedge, 1.0, tol);
  CHECK(c2.variant == BlowupVariant::wedge);
  CHECK(c2.alpha == Catch::Approx(0.5).margin(1e-3));

  const auto two = sample_circle(n, [](double th) {
    return std::sqrt(3.0) * std::max(std::cos(th), 0.0) - std::max(-std::cos(th), 0.0);
  });
  const BlowupClass c3 = classify_blowup_2d(two, 1.0, tol);
  CHECK(c3.variant == BlowupVariant::two_plane);
  CHECK(c3.alpha == Catch::Approx(std::sqrt(3.0)).margin(2e-3));
  CHECK(c3.beta == Catch::Approx(1.0).margin(2e-3));

  // slope identity must reject the same trace under a different mass
  const BlowupClass c4 = classify_blowup_2d(two, 1.5, tol);
  CHECK(c4.variant == BlowupVariant::unclassified);

  // wedge slope above sqrt(2M) is not admissible
  const auto steep =
      sample_circle(n, [](double th) { return 2.0 * std::abs(std::cos(th)); });
  CHECK(classify_blowup_2d(steep, 1.0, tol).variant == BlowupVariant::unclassified);

  // zero trace
  const auto flat = sample_circle(n, [](double) { return 0.0; });
  CHECK(classify_blowup_2d(flat, 1.0, tol).variant == BlowupVariant::zero);

  // short arcs (length pi/2) are not in the catalogue
  const auto narrow = sample_circle(n, [](double th) {
    return th < kPi / 2 ? std::sin(2.0 * th) : 0.0;
  });
  CHECK(classify_blowup_2d(narrow, 1.0, tol).variant == BlowupVariant::unclassified);
}

TEST_CASE("classifier is rotation invariant") {
  const int n = 512;
  std::mt19937 rng(20240811);
  std::uniform_real_distribution<double> shift(0.0, 2.0 * kPi);
  for (int trial = 0; trial < 8; ++trial) {
    const double phi0 = shift(rng);
    const auto rotated = sample_circle(n, [&](double th) {
      return std::sqrt(3.0) * std::max(std::cos(th - phi0), 0.0) -
             std::max(-std::cos(th - phi0), 0.0);
    });
    const BlowupClass c = classify_blowup_2d(rotated, 1.0, 1e-3);
    CHECK(c.variant == BlowupVariant::two_plane);
    CHECK(c.alpha == Catch::Approx(std::sqrt(3.0)).margin(2e-3));
    CHECK(c.beta == Catch::Approx(1.0).margin(2e-3));
  }
}

TEST_CASE("classifier accepts a field trace end to end") {
  const ExactSampler hp(ExactKind::half_plane(1.0), 2);
  const auto trace = circle_trace(hp, kOrigin, 0.5, 512);
  const BlowupClass c = classify_blowup_2d(trace, 1.0, 1e-3);
  CHECK(c.variant == BlowupVariant::half_plane);
  CHECK(c.alpha == Catch::Approx(std::sqrt(2.0)).margin(1e-3));
}
