#pragma once

#include <cmath>
#include <vector>

#include "fblab/common.hpp"

namespace fblab {

struct GaussLegendre {
  std::vector<double> nodes;    // in (-1, 1)
  std::vector<double> weights;  // sum to 2
};

/// n-point Gauss-Legendre rule on [-1,1] via Newton on P_n with the
/// Chebyshev initial guess.
inline GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw invalid_parameter_error("gauss_legendre: n must be >= 1");
  GaussLegendre q;
  q.nodes.resize(std::size_t(n));
  q.weights.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      // evaluate P_n and P_n' by the three-term recurrence
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[std::size_t(n - 1 - i)] = x;
    q.weights[std::size_t(n - 1 - i)] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return q;
}

/// Quadrature nodes on the unit sphere S^{N-1}, N = 2 or 3.
///
/// 2D: uniform angle nodes (periodic trapezoid, spectrally accurate).
/// 3D: Gauss-Legendre in cos(theta) x uniform trapezoid in phi.
/// Weights sum to the sphere area: 2*pi (N=2) or 4*pi (N=3).
struct ShellQuadrature {
  int dim = 2;  // ambient dimension N
  std::vector<Vec> dirs;
  std::vector<double> weights;

  double area() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

inline ShellQuadrature make_shell_quadrature(int dim, int n_theta, int n_phi = 0) {
  if (dim != 2 && dim != 3)
    throw invalid_parameter_error("shell quadrature: dim must be 2 or 3");
  if (n_theta < 2) throw invalid_parameter_error("shell quadrature: too few nodes");
  ShellQuadrature q;
  q.dim = dim;
  // half-step angular shift so axis-aligned jump sets never land on nodes
  if (dim == 2) {
    const double w = 2.0 * kPi / n_theta;
    q.dirs.reserve(std::size_t(n_theta));
    for (int i = 0; i < n_theta; ++i) {
      const double th = w * (i + 0.5);
      q.dirs.push_back(vec2(std::cos(th), std::sin(th)));
      q.weights.push_back(w);
    }
  } else {
    if (n_phi <= 0) n_phi = 2 * n_theta;
    const GaussLegendre gl = gauss_legendre(n_theta);
    const double wphi = 2.0 * kPi / n_phi;
    q.dirs.reserve(std::size_t(n_theta) * std::size_t(n_phi));
    for (int a = 0; a < n_theta; ++a) {
      const double mu = gl.nodes[std::size_t(a)];  // cos(theta)
      const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      for (int b = 0; b < n_phi; ++b) {
        const double ph = wphi * (b + 0.5);
        q.dirs.push_back(vec3(s * std::cos(ph), s * std::sin(ph), mu));
        q.weights.push_back(gl.weights[std::size_t(a)] * wphi);
      }
    }
  }
  return q;
}

/// Volume of the unit ball in dimension N.
inline double unit_ball_volume(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return kPi;
    case 3: return 4.0 * kPi / 3.0;
    default: throw invalid_parameter_error("unit_ball_volume: dim must be 1..3");
  }
}

}  // namespace fblab
