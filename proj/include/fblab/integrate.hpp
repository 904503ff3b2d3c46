#pragma once

#include <cmath>
#include <functional>

#include "fblab/field.hpp"
#include "fblab/quadrature.hpp"

namespace fblab {

/// Value and gradient at a cell center from the 2^dim corner nodes.
/// The gradient is the average of the edge differences along each axis,
/// which is exact for fields that are multilinear inside the cell.
struct CellData {
  Vec center{0.0, 0.0, 0.0};
  double value = 0.0;
  Vec grad{0.0, 0.0, 0.0};
};

inline CellData cell_data(const ScalarField& f, int ci, int cj, int ck) {
  CellData c;
  const double h = f.spacing;
  const int corners = 1 << f.dim;
  double vsum = 0.0;
  for (int b = 0; b < corners; ++b) {
    const int i = ci + ((b >> 0) & 1);
    const int j = cj + (f.dim >= 2 ? ((b >> 1) & 1) : 0);
    const int k = ck + (f.dim >= 3 ? ((b >> 2) & 1) : 0);
    const double v = f.at(i, j, k);
    vsum += v;
    for (int a = 0; a < f.dim; ++a) {
      const bool hi = (b >> a) & 1;
      c.grad[a] += (hi ? 1.0 : -1.0) * v;
    }
  }
  c.value = vsum / corners;
  const double edges = corners / 2;  // differences contributing per axis
  for (int a = 0; a < f.dim; ++a) c.grad[a] /= edges * h;
  c.center = f.point(ci, cj, ck);
  for (int a = 0; a < f.dim; ++a) c.center[a] += 0.5 * h;
  return c;
}

namespace detail {

/// Fraction of the cell with origin node (ci,cj,ck) lying inside the ball
/// |x - c| < R, by midpoint subsampling when the cell straddles the sphere.
inline double cell_ball_fraction(const ScalarField& f, int ci, int cj, int ck, const Vec& c,
                                 double R, int sub = 4) {
  const double h = f.spacing;
  Vec lo = f.point(ci, cj, ck);
  Vec cc = lo;
  for (int a = 0; a < f.dim; ++a) cc[a] += 0.5 * h;
  const double half_diag = 0.5 * h * std::sqrt(double(f.dim));
  const double d = norm(cc - c);
  if (d <= R - half_diag) return 1.0;
  if (d >= R + half_diag) return 0.0;
  const int sx = sub;
  const int sy = f.dim >= 2 ? sub : 1;
  const int sz = f.dim >= 3 ? sub : 1;
  int in = 0;
  for (int a = 0; a < sx; ++a)
    for (int b = 0; b < sy; ++b)
      for (int g = 0; g < sz; ++g) {
        Vec p = lo;
        p[0] += (a + 0.5) * h / sx;
        if (f.dim >= 2) p[1] += (b + 0.5) * h / sy;
        if (f.dim >= 3) p[2] += (g + 0.5) * h / sz;
        if (norm(p - c) < R) ++in;
      }
  return double(in) / double(sx * sy * sz);
}

}  // namespace detail

/// Visit every cell whose corners are all non-exterior; fn receives the
/// cell data and the quadrature weight (cell volume, reduced by the
/// inside-the-ball fraction on masked ball domains).
template <class Fn>
inline void for_each_domain_cell(const ScalarField& f, Fn&& fn) {
  const double h = f.spacing;
  const double vol = std::pow(h, f.dim);
  const int ni = f.shape[0] - 1;
  const int nj = f.dim >= 2 ? f.shape[1] - 1 : 1;
  const int nk = f.dim >= 3 ? f.shape[2] - 1 : 1;
  const bool ball = f.ball_radius > 0.0;
  const Vec c{f.ball_center[0], f.ball_center[1], f.ball_center[2]};
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < nk; ++k) {
        bool ok = true;
        const int corners = 1 << f.dim;
        for (int b = 0; b < corners && ok; ++b) {
          const int ii = i + ((b >> 0) & 1);
          const int jj = j + (f.dim >= 2 ? ((b >> 1) & 1) : 0);
          const int kk = k + (f.dim >= 3 ? ((b >> 2) & 1) : 0);
          ok = f.mask_at(ii, jj, kk) != ScalarField::kExterior;
        }
        if (!ok) continue;
        double w = vol;
        if (ball) {
          const double frac = detail::cell_ball_fraction(f, i, j, k, c, f.ball_radius);
          if (frac == 0.0) continue;
          w *= frac;
        }
        fn(cell_data(f, i, j, k), w);
      }
}

/// Midpoint statistics of a sampler over the ball B_r(center):
/// measured volume, volume of {u > 0}, and the integral of u^+.
/// n_sub midpoints per axis across the bounding box.
struct BallStats {
  double volume = 0.0;
  double positive_volume = 0.0;
  double plus_integral = 0.0;
};

inline BallStats ball_stats(const FieldSampler& u, const Vec& center, double r,
                            int n_sub = 0) {
  if (!(r > 0.0)) throw invalid_parameter_error("ball radius must be positive");
  const int dim = u.dim();
  if (n_sub <= 0) n_sub = dim == 3 ? 96 : 256;
  const double step = 2.0 * r / n_sub;
  const double w = std::pow(step, dim);
  const int ny = dim >= 2 ? n_sub : 1;
  const int nz = dim >= 3 ? n_sub : 1;
  BallStats s;
  for (int a = 0; a < n_sub; ++a)
    for (int b = 0; b < ny; ++b)
      for (int g = 0; g < nz; ++g) {
        Vec p = center;
        p[0] += -r + (a + 0.5) * step;
        if (dim >= 2) p[1] += -r + (b + 0.5) * step;
        if (dim >= 3) p[2] += -r + (g + 0.5) * step;
        if (norm(p - center) >= r) continue;
        const double v = u.value(p);
        s.volume += w;
        if (v > 0.0) {
          s.positive_volume += w;
          s.plus_integral += w * v;
        }
      }
  return s;
}

}  // namespace fblab
