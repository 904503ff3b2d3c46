#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fblab/exact.hpp"
#include "fblab/surface.hpp"

using namespace fblab;

namespace {

SphericalFunction catenoid_g(int n_theta, int n_phi) {
  const double fp0 = catenoid_f(catenoid_theta0()).second;
  return make_spherical_function(
      n_theta, n_phi, [&](double th, double) { return catenoid_f(th).first / fp0; });
}

}  // namespace

TEST_CASE("spherical derivatives on model functions") {
  // constant: gradient zero, hess + g I = R I
  const SphericalFunction cg =
      make_spherical_function(64, 128, [](double, double) { return 2.5; });
  const SphericalDerivatives dc = spherical_derivatives(cg, 20, 17);
  CHECK(dc.grad_theta == 0.0);
  CHECK(dc.grad_phi == 0.0);
  CHECK(dc.h_tt + dc.g == Catch::Approx(2.5).margin(1e-10));
  CHECK(dc.h_pp + dc.g == Catch::Approx(2.5).margin(1e-10));
  CHECK(dc.h_tp == Catch::Approx(0.0).margin(1e-12));

  // linear support function g = n . e3 = cos(theta): annihilated
  const SphericalFunction lg =
      make_spherical_function(128, 128, [](double th, double) { return std::cos(th); });
  for (int j : {2, 40, 90, 125})
    for (int k : {0, 31}) {
      const SphericalDerivatives d = spherical_derivatives(lg, j, k);
      CHECK(d.h_tt + d.g == Catch::Approx(0.0).margin(1e-3));
      CHECK(d.h_pp + d.g == Catch::Approx(0.0).margin(1e-3));
    }

  // degree-2 spherical harmonics are eigenfunctions: trace = -6 g
  const SphericalFunction y20 = make_spherical_function(
      128, 256, [](double th, double) { return 0.5 * (3.0 * std::cos(th) * std::cos(th) - 1.0); });
  const SphericalFunction y22 = make_spherical_function(
      128, 256,
      [](double th, double ph) { return std::sin(th) * std::sin(th) * std::cos(2.0 * ph); });
  for (const auto* g : {&y20, &y22})
    for (int j : {30, 64, 97})
      for (int k : {5, 77, 200}) {
        const SphericalDerivatives d = spherical_derivatives(*g, j, k);
        const double lap = d.h_tt + d.h_pp;  // trace of the orthonormal Hessian
        CHECK(lap == Catch::Approx(-6.0 * d.g).margin(0.02));
      }

  CHECK_THROWS_AS(spherical_derivatives(cg, 0, 0), insufficient_stencil_error);
  CHECK_THROWS_AS(spherical_derivatives(cg, 63, 0), insufficient_stencil_error);
}

TEST_CASE("immersion of round spheres and point surfaces") {
  const SphericalFunction sphere =
      make_spherical_function(64, 128, [](double, double) { return 3.0; });
  for (int j : {5, 32, 58})
    for (int k : {0, 50}) {
      const Vec x = immersion_X(sphere, j, k);
      const Vec n = sphere.direction(j, k);
      CHECK(norm(x - 3.0 * n) <= 1e-12);
    }

  // support function of a point: X collapses to the point
  const Vec p{0.3, -0.2, 0.9};
  const SphericalFunction point = make_spherical_function(128, 256, [&](double th, double ph) {
    const Vec n{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    return dot(n, p);
  });
  for (int j : {10, 64, 100})
    for (int k : {3, 128}) CHECK(norm(immersion_X(point, j, k) - p) <= 1e-3);
}

TEST_CASE("curvature of the round sphere") {
  const SphericalFunction sphere =
      make_spherical_function(64, 128, [](double, double) { return 2.0; });
  const SurfaceSample s = curvature_report(sphere, 30, 40);
  CHECK(s.radius1 == Catch::Approx(2.0).margin(1e-10));
  CHECK(s.radius2 == Catch::Approx(2.0).margin(1e-10));
  REQUIRE(s.gauss_defined);
  CHECK(s.gauss_K == Catch::Approx(0.25).margin(1e-10));
  CHECK(s.mean_residual == Catch::Approx(4.0).margin(1e-10));  // trace is 2R here
}

TEST_CASE("catenoid curvature and conformality") {
  const SphericalFunction g = catenoid_g(128, 256);
  const double th0 = catenoid_theta0();
  const double fp0 = catenoid_f(th0).second;

  double max_mean = 0.0, max_defect = 0.0, max_trace_gap = 0.0, max_contain = 0.0;
  for (int j = 2; j < g.n_theta - 2; ++j) {
    const double th = g.theta(j);
    if (catenoid_f(th).first <= 0.0) continue;
    for (int k : {0, 64, 190}) {
      const SurfaceSample s = curvature_report(g, j, k);
      max_mean = std::max(max_mean, std::abs(s.mean_residual));
      max_trace_gap = std::max(
          max_trace_gap, std::abs(s.radius1 + s.radius2 - s.mean_residual));
      if (j >= 24 && j <= g.n_theta - 25)  // two-ring nodes inside the band
        max_defect = std::max(max_defect, s.conformality_defect);
      CHECK_FALSE(s.branch_flag);
      max_contain = std::max(max_contain, norm(s.X));

      // radii match the analytic Weingarten eigenvalues at this node
      const double a = (catenoid_fpp(th) + catenoid_f(th).first) / fp0;
      const double c =
          (std::cos(th) / std::sin(th) * catenoid_f(th).second + catenoid_f(th).first) / fp0;
      CHECK(std::min(s.radius1, s.radius2) ==
            Catch::Approx(std::min(a, c)).margin(2.5e-3));
      CHECK(std::max(s.radius1, s.radius2) ==
            Catch::Approx(std::max(a, c)).margin(2.5e-3));
    }
  }
  CHECK(max_mean <= 2e-2);
  CHECK(max_defect <= 2e-2);
  CHECK(max_trace_gap <= 1e-12);  // algebraic identity of the same matrix
  CHECK(max_contain <= 1.0 + 1e-6);  // surface stays inside the sphere sqrt(2M) = 1
}

TEST_CASE("immersion equals the cartesian gradient of the blow-up") {
  const SphericalFunction g = catenoid_g(256, 256);
  const ExactKind cat = ExactKind::catenoid();
  for (int j : {60, 128, 180})
    for (int k : {10, 100}) {
      if (!g.in_support(j, k)) continue;
      const Vec x = immersion_X(g, j, k);
      const Vec grad = exact_gradient(cat, g.direction(j, k), 3);
      CHECK(norm(x - grad) <= 5e-4);  // O(dtheta^2) stencil error
    }

  // gradient is homogeneous of degree zero on analytic samples
  for (double r : {0.5, 1.0, 2.0}) {
    const Vec n = vec3(std::sin(1.2) * std::cos(0.7), std::sin(1.2) * std::sin(0.7),
                       std::cos(1.2));
    const Vec at_r = exact_gradient(cat, r * n, 3);
    const Vec at_1 = exact_gradient(cat, n, 3);
    CHECK(norm(at_r - at_1) <= 1e-10);
  }
}

TEST_CASE("degenerate frames flag branch points") {
  const Vec p{0.1, 0.4, 0.8};
  const SphericalFunction point = make_spherical_function(96, 192, [&](double th, double ph) {
    const Vec n{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    return dot(n, p);
  });
  int flagged = 0, total = 0;
  for (int j = 8; j < point.n_theta - 8; j += 7)
    for (int k = 0; k < point.n_phi; k += 13) {
      ++total;
      if (fundamental_form(point, j, k).branch_flag) ++flagged;
    }
  CHECK(flagged == total);

  // the catenoid immersion is branch-free and conformal; the round sphere too
  const SphericalFunction sphere =
      make_spherical_function(64, 128, [](double, double) { return 1.5; });
  const FundamentalForm ff = fundamental_form(sphere, 20, 10);
  CHECK_FALSE(ff.branch_flag);
  CHECK(ff.E == Catch::Approx(ff.G).margin(1e-10));
  CHECK(std::abs(ff.F) <= 1e-12);
  CHECK(ff.conformality_defect <= 1e-9);
}

TEST_CASE("support boundary, contact angle and |X| on the catenoid") {
  const SphericalFunction g = catenoid_g(128, 256);
  const auto boundary = support_boundary(g);
  REQUIRE(boundary.size() == std::size_t(2 * g.n_phi));  // two circles
  const double th0 = catenoid_theta0();
  for (const auto& p : boundary) {
    const double target = p.theta < 0.5 * kPi ? th0 : kPi - th0;
    CHECK(p.theta == Catch::Approx(target).margin(2e-4));
    CHECK(boundary_X_norm(g, p) == Catch::Approx(1.0).margin(1e-3));
  }
  const auto angles = contact_angle(g, boundary, 0.5);
  for (const auto& e : angles) CHECK(e.angle == Catch::Approx(0.5 * kPi).margin(1e-2));

  // half-plane support function g = sqrt(2M) cos(theta): boundary at the equator
  const SphericalFunction hp = make_spherical_function(
      128, 128, [](double th, double) { return std::sqrt(2.0) * std::cos(th); });
  const auto hp_boundary = support_boundary(hp);
  REQUIRE(!hp_boundary.empty());
  const auto hp_angles = contact_angle(hp, hp_boundary, 1.0);
  for (const auto& e : hp_angles) CHECK(e.angle == Catch::Approx(0.5 * kPi).margin(1e-3));

  // a curve where g does not vanish violates the precondition
  std::vector<SupportBoundaryPoint> fake;
  SupportBoundaryPoint q;
  q.theta = 0.5 * kPi;
  q.k = 0;
  q.j_inside = g.n_theta / 2;
  fake.push_back(q);
  CHECK_THROWS_AS(contact_angle(g, fake, 0.5), invalid_boundary_error);
}

TEST_CASE("mesh export topology") {
  // catenoid band: ring type, chi = 0, two boundary loops
  const SphericalFunction g = catenoid_g(64, 128);
  const SurfaceMesh mesh = export_mesh(g);
  int in_support = 0;
  for (int j = 0; j < g.n_theta; ++j)
    for (int k = 0; k < g.n_phi; ++k)
      if (g.in_support(j, k)) ++in_support;
  CHECK(int(mesh.vertices.size()) == in_support);  // construction contract
  CHECK(mesh.euler_characteristic() == 0);
  CHECK(mesh.boundary_loop_count() == 2);

  // full sphere: closed, chi = 2
  const SphericalFunction sphere =
      make_spherical_function(32, 64, [](double, double) { return 1.0; });
  const SurfaceMesh closed = export_mesh(sphere);
  CHECK(closed.euler_characteristic() == 2);
  CHECK(closed.boundary_loop_count() == 0);

  // OBJ text starts with the vertex block in node order
  const std::string obj = mesh.to_obj();
  CHECK(obj.rfind("v ", 0) == 0);
  CHECK(obj.find("f ") != std::string::npos);

  const SphericalFunction empty =
      make_spherical_function(16, 32, [](double, double) { return -1.0; });
  CHECK_THROWS_AS(export_mesh(empty), empty_surface_error);
}
