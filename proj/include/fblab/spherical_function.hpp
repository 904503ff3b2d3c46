#pragma once

#include <cmath>
#include <vector>

#include "fblab/common.hpp"
#include "fblab/field.hpp"

namespace fblab {

/// Samples of a function g on the 2-sphere over a shifted lat-long grid:
/// theta_j = (j + 1/2) * pi / n_theta (no pole nodes), phi_k = 2 pi k / n_phi
/// (periodic).  The support is the node set {g > 0}.
struct SphericalFunction {
  int n_theta = 0;
  int n_phi = 0;
  std::vector<double> values;  // theta-major, phi fastest
  double scale = 1.0;          // max |g|, cached for branch-point thresholds

  double dtheta() const { return kPi / n_theta; }
  double dphi() const { return 2.0 * kPi / n_phi; }
  double theta(int j) const { return (j + 0.5) * dtheta(); }
  double phi(int k) const { return dphi() * k; }
  std::size_t index(int j, int k) const {
    const int kw = ((k % n_phi) + n_phi) % n_phi;  // phi wraps
    return std::size_t(j) * std::size_t(n_phi) + std::size_t(kw);
  }
  double at(int j, int k) const { return values[index(j, k)]; }
  bool in_support(int j, int k) const { return at(j, k) > 0.0; }

  Vec direction(int j, int k) const {
    const double th = theta(j), ph = phi(k);
    return {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
  }
};

template <class Fn>
inline SphericalFunction make_spherical_function(int n_theta, int n_phi, Fn&& fn) {
  if (n_theta < 4 || n_phi < 4)
    throw invalid_parameter_error("spherical grid needs at least 4 nodes per direction");
  SphericalFunction g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.values.resize(std::size_t(n_theta) * std::size_t(n_phi));
  double scale = 0.0;
  for (int j = 0; j < n_theta; ++j)
    for (int k = 0; k < n_phi; ++k) {
      const double v = fn(g.theta(j), g.phi(k));
      g.values[g.index(j, k)] = v;
      scale = std::max(scale, std::abs(v));
    }
  g.scale = scale > 0.0 ? scale : 1.0;
  return g;
}

/// Trace of a 3D field on the unit sphere of radius r: g(n) = u(center + r n)/r.
inline SphericalFunction spherical_trace(const FieldSampler& u, const Vec& center, double r,
                                         int n_theta, int n_phi) {
  if (u.dim() != 3) throw invalid_parameter_error("spherical trace needs a 3D field");
  if (!(r > 0.0)) throw invalid_parameter_error("trace radius must be positive");
  return make_spherical_function(n_theta, n_phi, [&](double th, double ph) {
    const Vec n{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    return u.value(center + r * n) / r;
  });
}

}  // namespace fblab
