#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fblab/common.hpp"
#include "fblab/spherical_function.hpp"

namespace fblab {

// Support-function geometry: from g on S^2 build the immersion
// X(n) = n g(n) + grad_{S^2} g(n), the Weingarten data hess g + g I whose
// eigenvalues are the principal radii of curvature, the Gauss curvature
// 1/K = det(hess g + g I), and the first fundamental form of X.

struct SphericalDerivatives {
  double g = 0.0;
  double grad_theta = 0.0;  // orthonormal frame (e_theta, e_phi / sin)
  double grad_phi = 0.0;
  double h_tt = 0.0;  // orthonormal-frame Hessian entries
  double h_tp = 0.0;
  double h_pp = 0.0;
};

/// Central differences in (theta, phi); phi wraps, theta needs one ring.
/// The phi-phi entry carries the cot(theta) g_theta Christoffel correction;
/// raw entries are tied to the fixed (e_theta, e_phi/sin theta) frame.
inline SphericalDerivatives spherical_derivatives(const SphericalFunction& g, int j, int k) {
  if (j < 1 || j > g.n_theta - 2)
    throw insufficient_stencil_error("node adjacent to the theta grid edge");
  const double dth = g.dtheta(), dph = g.dphi();
  const double th = g.theta(j);
  const double st = std::sin(th), ct = std::cos(th);
  const double v = g.at(j, k);
  const double vt_p = g.at(j + 1, k), vt_m = g.at(j - 1, k);
  const double vp_p = g.at(j, k + 1), vp_m = g.at(j, k - 1);
  SphericalDerivatives d;
  d.g = v;
  const double g_t = (vt_p - vt_m) / (2.0 * dth);
  const double g_p = (vp_p - vp_m) / (2.0 * dph);
  const double g_tt = (vt_p - 2.0 * v + vt_m) / (dth * dth);
  const double g_pp = (vp_p - 2.0 * v + vp_m) / (dph * dph);
  const double g_tp = (g.at(j + 1, k + 1) - g.at(j + 1, k - 1) - g.at(j - 1, k + 1) +
                       g.at(j - 1, k - 1)) /
                      (4.0 * dth * dph);
  d.grad_theta = g_t;
  d.grad_phi = g_p / st;
  d.h_tt = g_tt;
  d.h_tp = (g_tp - (ct / st) * g_p) / st;
  d.h_pp = g_pp / (st * st) + (ct / st) * g_t;
  return d;
}

/// X(n) = n g + grad g embedded in R^3.
inline Vec immersion_X(const SphericalFunction& g, int j, int k) {
  const SphericalDerivatives d = spherical_derivatives(g, j, k);
  const double th = g.theta(j), ph = g.phi(k);
  const double st = std::sin(th), ct = std::cos(th);
  const Vec n{st * std::cos(ph), st * std::sin(ph), ct};
  const Vec e_t{ct * std::cos(ph), ct * std::sin(ph), -st};
  const Vec e_p{-std::sin(ph), std::cos(ph), 0.0};
  return d.g * n + d.grad_theta * e_t + d.grad_phi * e_p;
}

struct FundamentalForm {
  double E = 0.0, F = 0.0, G = 0.0;
  double conformality_defect = 0.0;  // max(|E-G|, |F|) / max(E, G, floor)
  bool branch_flag = false;          // all first derivatives of X vanish
};

/// First fundamental form w.r.t. the orthonormal pullback frame, from a
/// one-ring of X (so two theta rings of g).  Degenerate frames flag a
/// branch-point candidate instead of erroring.
inline FundamentalForm fundamental_form(const SphericalFunction& g, int j, int k) {
  if (j < 2 || j > g.n_theta - 3)
    throw insufficient_stencil_error("fundamental form needs two theta rings");
  const double dth = g.dtheta(), dph = g.dphi();
  const double st = std::sin(g.theta(j));
  const Vec xt_p = immersion_X(g, j + 1, k), xt_m = immersion_X(g, j - 1, k);
  const Vec xp_p = immersion_X(g, j, k + 1), xp_m = immersion_X(g, j, k - 1);
  const Vec Xu = (1.0 / (2.0 * dth)) * (xt_p - xt_m);
  const Vec Xv = (1.0 / (2.0 * dph * st)) * (xp_p - xp_m);
  FundamentalForm ff;
  ff.E = dot(Xu, Xu);
  ff.F = dot(Xu, Xv);
  ff.G = dot(Xv, Xv);
  // degeneracy cut: 1e-10 scale^2 plus the O(dtheta^2) stencil noise floor,
  // squared because E and G are quadratic in the first derivatives
  const double noise = 100.0 * std::pow(dth, 4);
  const double branch_cut = std::max(1e-10, noise) * g.scale * g.scale;
  ff.branch_flag = ff.E < branch_cut && ff.G < branch_cut;
  const double floor = 1e-14 * g.scale * g.scale;
  ff.conformality_defect =
      std::max(std::abs(ff.E - ff.G), std::abs(ff.F)) / std::max({ff.E, ff.G, floor});
  return ff;
}

struct SurfaceSample {
  Vec n{0.0, 0.0, 0.0};
  Vec X{0.0, 0.0, 0.0};
  double E = 0.0, F = 0.0, G = 0.0;
  double radius1 = 0.0, radius2 = 0.0;  // principal radii of curvature
  double gauss_K = 0.0;
  bool gauss_defined = false;
  double mean_residual = 0.0;  // trace of (hess g + g I)
  double conformality_defect = 0.0;
  bool branch_flag = false;
};

/// Weingarten data at a node: principal radii are the eigenvalues of the
/// 2x2 symmetric matrix hess g + g I (closed form), Gauss curvature its
/// inverse determinant when above the singularity cut.
inline SurfaceSample curvature_report(const SphericalFunction& g, int j, int k,
                                      double singular_tol = 1e-12) {
  const SphericalDerivatives d = spherical_derivatives(g, j, k);
  SurfaceSample s;
  s.n = g.direction(j, k);
  s.X = immersion_X(g, j, k);
  const double a = d.h_tt + d.g;
  const double b = d.h_tp;
  const double c = d.h_pp + d.g;
  const double tr = a + c;
  const double det = a * c - b * b;
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
  s.radius1 = 0.5 * tr - disc;
  s.radius2 = 0.5 * tr + disc;
  s.mean_residual = tr;  // = laplace-beltrami g + 2 g
  s.gauss_defined = std::abs(det) > singular_tol;
  s.gauss_K = s.gauss_defined ? 1.0 / det : 0.0;
  if (j >= 2 && j <= g.n_theta - 3) {
    const FundamentalForm ff = fundamental_form(g, j, k);
    s.E = ff.E;
    s.F = ff.F;
    s.G = ff.G;
    s.conformality_defect = ff.conformality_defect;
    s.branch_flag = ff.branch_flag;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Support boundary, contact angle
// ---------------------------------------------------------------------------

struct SupportBoundaryPoint {
  double theta = 0.0;  // sub-cell crossing of g = 0 along the phi column
  int k = 0;           // phi column
  int j_inside = 0;    // nearest in-support theta row
};

/// Zero crossings of g along each phi column (the support boundary of a
/// band-type support).
inline std::vector<SupportBoundaryPoint> support_boundary(const SphericalFunction& g) {
  std::vector<SupportBoundaryPoint> pts;
  for (int k = 0; k < g.n_phi; ++k)
    for (int j = 0; j + 1 < g.n_theta; ++j) {
      const double a = g.at(j, k), b = g.at(j + 1, k);
      if ((a > 0.0) == (b > 0.0)) continue;
      const double t = a == b ? 0.5 : std::clamp((0.0 - a) / (b - a), 0.0, 1.0);
      SupportBoundaryPoint p;
      p.theta = g.theta(j) + t * g.dtheta();
      p.k = k;
      p.j_inside = a > 0.0 ? j : j + 1;
      pts.push_back(p);
    }
  return pts;
}

namespace detail {
/// Theta direction pointing from the boundary row into the support.
inline int inward_dir(const SphericalFunction& g, const SupportBoundaryPoint& p) {
  if (p.j_inside + 1 < g.n_theta && g.in_support(p.j_inside + 1, p.k)) return +1;
  return -1;
}

/// Quadratic (three-node Lagrange) extrapolation of column samples onto
/// theta*, walking inward from j_inside.
inline double extrapolate_column(const SphericalFunction& g, int k, int j_inside,
                                 double theta_star, int dir,
                                 const std::vector<double>& node_values) {
  const int j0 = j_inside, j1 = j_inside + dir, j2 = j_inside + 2 * dir;
  if (j1 < 0 || j1 >= g.n_theta || j2 < 0 || j2 >= g.n_theta)
    throw insufficient_stencil_error("support boundary too close to the theta grid edge");
  const double t0 = g.theta(j0), t1 = g.theta(j1), t2 = g.theta(j2);
  const double v0 = node_values[g.index(j0, k)];
  const double v1 = node_values[g.index(j1, k)];
  const double v2 = node_values[g.index(j2, k)];
  const double x = theta_star;
  const double l0 = (x - t1) * (x - t2) / ((t0 - t1) * (t0 - t2));
  const double l1 = (x - t0) * (x - t2) / ((t1 - t0) * (t1 - t2));
  const double l2 = (x - t0) * (x - t1) / ((t2 - t0) * (t2 - t1));
  return l0 * v0 + l1 * v1 + l2 * v2;
}
}  // namespace detail

struct ContactAngleEntry {
  double theta = 0.0;
  int k = 0;
  double g_at_boundary = 0.0;
  double angle = 0.0;  // arccos(g / sqrt(2M))
};

/// Contact angle between the surface and the sphere of radius sqrt(2M)
/// along the support boundary: cos(angle) = g/sqrt(2M) extrapolated
/// one-sidedly onto the boundary, which vanishes on a true support
/// boundary (angle pi/2).
inline std::vector<ContactAngleEntry> contact_angle(
    const SphericalFunction& g, const std::vector<SupportBoundaryPoint>& boundary,
    double mass, double boundary_tol = 0.05) {
  if (!(mass > 0.0)) throw invalid_parameter_error("mass must be positive");
  const double root2m = std::sqrt(2.0 * mass);
  std::vector<ContactAngleEntry> out;
  out.reserve(boundary.size());
  for (const auto& p : boundary) {
    ContactAngleEntry e;
    e.theta = p.theta;
    e.k = p.k;
    e.g_at_boundary = detail::extrapolate_column(g, p.k, p.j_inside, p.theta,
                                                 detail::inward_dir(g, p), g.values);
    if (std::abs(e.g_at_boundary) > boundary_tol * root2m)
      throw invalid_boundary_error("contact angle: g does not vanish on the given curve");
    e.angle = std::acos(std::clamp(e.g_at_boundary / root2m, -1.0, 1.0));
    out.push_back(e);
  }
  return out;
}

/// |X| extrapolated onto a support-boundary point: sqrt(g^2 + |grad g|^2)
/// with the orthonormal-frame gradient extrapolated along the column.
inline double boundary_X_norm(const SphericalFunction& g, const SupportBoundaryPoint& p) {
  // node values of g_theta and g_phi/sin on the column, then extrapolate
  std::vector<double> gt(g.values.size(), 0.0), gp(g.values.size(), 0.0);
  const int dir = detail::inward_dir(g, p);
  for (int step = 0; step < 3; ++step) {
    const int j = p.j_inside + dir * step;
    const SphericalDerivatives d = spherical_derivatives(g, j, p.k);
    gt[g.index(j, p.k)] = d.grad_theta;
    gp[g.index(j, p.k)] = d.grad_phi;
  }
  const double gval = detail::extrapolate_column(g, p.k, p.j_inside, p.theta, dir, g.values);
  const double gtv = detail::extrapolate_column(g, p.k, p.j_inside, p.theta, dir, gt);
  const double gpv = detail::extrapolate_column(g, p.k, p.j_inside, p.theta, dir, gp);
  return std::sqrt(gval * gval + gtv * gtv + gpv * gpv);
}

// ---------------------------------------------------------------------------
// Mesh export
// ---------------------------------------------------------------------------

struct SurfaceMesh {
  std::vector<Vec> vertices;
  std::vector<std::array<int, 3>> triangles;  // 0-based vertex indices

  int euler_characteristic() const {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : triangles)
      for (int e = 0; e < 3; ++e) {
        int a = t[std::size_t(e)], b = t[std::size_t((e + 1) % 3)];
        edges.insert({std::min(a, b), std::max(a, b)});
      }
    return int(vertices.size()) - int(edges.size()) + int(triangles.size());
  }

  int boundary_loop_count() const {
    // edges used by exactly one triangle form disjoint cycles
    std::map<std::pair<int, int>, int> use;
    for (const auto& t : triangles)
      for (int e = 0; e < 3; ++e) {
        int a = t[std::size_t(e)], b = t[std::size_t((e + 1) % 3)];
        ++use[{std::min(a, b), std::max(a, b)}];
      }
    std::map<int, std::vector<int>> adj;
    for (const auto& [edge, count] : use)
      if (count == 1) {
        adj[edge.first].push_back(edge.second);
        adj[edge.second].push_back(edge.first);
      }
    std::set<int> seen;
    int loops = 0;
    for (const auto& [v, nbrs] : adj) {
      (void)nbrs;
      if (seen.count(v)) continue;
      ++loops;
      std::vector<int> stack{v};
      while (!stack.empty()) {
        int w = stack.back();
        stack.pop_back();
        if (!seen.insert(w).second) continue;
        for (int x : adj[w]) stack.push_back(x);
      }
    }
    return loops;
  }

  std::string to_obj() const {
    std::string out;
    out.reserve(vertices.size() * 48 + triangles.size() * 24);
    char buf[128];
    for (const auto& v : vertices) {
      std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v[0], v[1], v[2]);
      out += buf;
    }
    for (const auto& t : triangles) {
      std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
      out += buf;
    }
    return out;
  }
};

namespace detail {
/// Immersion with one-sided theta differences at the grid edge rows, for
/// mesh assembly over full-sphere supports.
inline Vec immersion_X_mesh(const SphericalFunction& g, int j, int k) {
  if (j >= 1 && j <= g.n_theta - 2) return immersion_X(g, j, k);
  const double dth = g.dtheta(), dph = g.dphi();
  const double th = g.theta(j), ph = g.phi(k);
  const double st = std::sin(th), ct = std::cos(th);
  const double v = g.at(j, k);
  const double g_t = j == 0 ? (g.at(1, k) - g.at(0, k)) / dth
                            : (g.at(j, k) - g.at(j - 1, k)) / dth;
  const double g_p = (g.at(j, k + 1) - g.at(j, k - 1)) / (2.0 * dph * st);
  const Vec n{st * std::cos(ph), st * std::sin(ph), ct};
  const Vec e_t{ct * std::cos(ph), ct * std::sin(ph), -st};
  const Vec e_p{-std::sin(ph), std::cos(ph), 0.0};
  return v * n + g_t * e_t + g_p * e_p;
}
}  // namespace detail

/// Triangulated image of the support region under X, vertices in row-major
/// node order.  When the support covers a full first/last theta row the
/// mesh is closed with a pole vertex (fan cap), e.g. round spheres.
inline SurfaceMesh export_mesh(const SphericalFunction& g) {
  SurfaceMesh mesh;
  std::vector<int> vid(g.values.size(), -1);
  for (int j = 0; j < g.n_theta; ++j)
    for (int k = 0; k < g.n_phi; ++k)
      if (g.in_support(j, k)) {
        vid[g.index(j, k)] = int(mesh.vertices.size());
        mesh.vertices.push_back(detail::immersion_X_mesh(g, j, k));
      }
  if (mesh.vertices.empty()) throw empty_surface_error("export_mesh: empty support");
  const std::size_t interior_vertices = mesh.vertices.size();
  for (int j = 0; j + 1 < g.n_theta; ++j)
    for (int k = 0; k < g.n_phi; ++k) {
      const int a = vid[g.index(j, k)];
      const int b = vid[g.index(j + 1, k)];
      const int c = vid[g.index(j + 1, k + 1)];
      const int d = vid[g.index(j, k + 1)];
      if (a < 0 || b < 0 || c < 0 || d < 0) continue;
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  (void)interior_vertices;
  // pole caps for full-sphere supports
  for (int side = 0; side < 2; ++side) {
    const int j = side == 0 ? 0 : g.n_theta - 1;
    bool full = true;
    for (int k = 0; k < g.n_phi && full; ++k) full = g.in_support(j, k);
    if (!full) continue;
    double rad = 0.0;
    for (int k = 0; k < g.n_phi; ++k) rad += norm(mesh.vertices[std::size_t(vid[g.index(j, k)])]);
    rad /= g.n_phi;
    const int pole = int(mesh.vertices.size());
    mesh.vertices.push_back({0.0, 0.0, side == 0 ? rad : -rad});
    for (int k = 0; k < g.n_phi; ++k) {
      const int a = vid[g.index(j, k)];
      const int b = vid[g.index(j, k + 1)];
      if (side == 0)
        mesh.triangles.push_back({pole, a, b});
      else
        mesh.triangles.push_back({pole, b, a});
    }
  }
  return mesh;
}

}  // namespace fblab
