#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "fblab/common.hpp"

namespace fblab {

/// Scalar sample grid: uniform Cartesian nodes in 1, 2 or 3 dimensions with
/// a node mask distinguishing interior unknowns, Dirichlet data nodes, and
/// exterior nodes (ball domains are realized by masking a box).
struct ScalarField {
  static constexpr std::uint8_t kInterior = 0;
  static constexpr std::uint8_t kDirichlet = 1;
  static constexpr std::uint8_t kExterior = 2;

  int dim = 2;
  std::array<int, 3> shape{1, 1, 1};  // node counts; unused axes stay 1
  double spacing = 1.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  // run metadata carried through persistence
  double eps = 0.0;  // 0 = untagged
  std::string profile_name;
  double profile_mass = 0.0;
  double ball_radius = 0.0;  // > 0: masked ball domain
  std::array<double, 3> ball_center{0.0, 0.0, 0.0};

  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  std::size_t size() const {
    return std::size_t(shape[0]) * std::size_t(shape[1]) * std::size_t(shape[2]);
  }
  std::size_t index(int i, int j = 0, int k = 0) const {
    return (std::size_t(i) * std::size_t(shape[1]) + std::size_t(j)) * std::size_t(shape[2]) +
           std::size_t(k);
  }
  Vec point(int i, int j = 0, int k = 0) const {
    return {origin[0] + spacing * i, origin[1] + spacing * j, origin[2] + spacing * k};
  }
  double& at(int i, int j = 0, int k = 0) { return values[index(i, j, k)]; }
  double at(int i, int j = 0, int k = 0) const { return values[index(i, j, k)]; }
  std::uint8_t mask_at(int i, int j = 0, int k = 0) const { return mask[index(i, j, k)]; }

  bool in_grid(int i, int j = 0, int k = 0) const {
    return i >= 0 && i < shape[0] && j >= 0 && j < shape[1] && k >= 0 && k < shape[2];
  }

  /// Max over nodes of |values|, skipping exterior nodes.
  double max_abs() const {
    double m = 0.0;
    for (std::size_t n = 0; n < size(); ++n)
      if (mask[n] != kExterior) m = std::max(m, std::abs(values[n]));
    return m;
  }
};

/// Box domain: all faces Dirichlet, inside interior.  shape counts nodes
/// per axis (>= 2 along used axes).
inline ScalarField make_box_field(int dim, std::array<int, 3> shape, double spacing,
                                  std::array<double, 3> origin) {
  if (dim < 1 || dim > 3) throw invalid_parameter_error("field dim must be 1, 2 or 3");
  if (!(spacing > 0.0)) throw invalid_parameter_error("spacing must be positive");
  ScalarField f;
  f.dim = dim;
  for (int a = 0; a < 3; ++a) f.shape[a] = a < dim ? shape[a] : 1;
  for (int a = 0; a < 3; ++a)
    if (a < dim && f.shape[a] < 2) throw invalid_parameter_error("box field needs >= 2 nodes per axis");
  f.spacing = spacing;
  f.origin = origin;
  f.values.assign(f.size(), 0.0);
  f.mask.assign(f.size(), ScalarField::kInterior);
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k) {
        bool edge = (i == 0 || i == f.shape[0] - 1);
        if (dim >= 2) edge = edge || (j == 0 || j == f.shape[1] - 1);
        if (dim >= 3) edge = edge || (k == 0 || k == f.shape[2] - 1);
        if (edge) f.mask[f.index(i, j, k)] = ScalarField::kDirichlet;
      }
  return f;
}

/// Symmetric box [-half, half]^dim with an odd node count (node at 0).
inline ScalarField make_centered_box_field(int dim, double half_width, double spacing) {
  const int n_half = int(std::ceil(half_width / spacing - 1e-12));
  const int n = 2 * n_half + 1;
  return make_box_field(dim, {n, n, n}, spacing,
                        {-n_half * spacing, dim >= 2 ? -n_half * spacing : 0.0,
                         dim >= 3 ? -n_half * spacing : 0.0});
}

/// Ball domain of radius R: interior nodes are |x - c| < R; the first
/// exterior node layer (face-adjacent to an interior node) carries the
/// Dirichlet data; everything beyond is exterior.  No cut cells.
inline ScalarField make_ball_field(int dim, double radius, double spacing,
                                   std::array<double, 3> center = {0.0, 0.0, 0.0}) {
  if (!(radius > 0.0)) throw invalid_parameter_error("ball radius must be positive");
  if (dim < 1 || dim > 3) throw invalid_parameter_error("field dim must be 1, 2 or 3");
  const int n_half = int(std::ceil(radius / spacing)) + 1;
  std::array<int, 3> shape{1, 1, 1};
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  std::array<double, 3> ctr{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    shape[a] = 2 * n_half + 1;
    ctr[a] = center[a];
    origin[a] = center[a] - n_half * spacing;
  }
  ScalarField f = make_box_field(dim, shape, spacing, origin);
  f.ball_radius = radius;
  f.ball_center = ctr;
  const Vec c{ctr[0], ctr[1], ctr[2]};
  auto inside = [&](int i, int j, int k) {
    const Vec p = f.point(i, j, k);
    return norm(p - c) < radius;
  };
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k)
        f.mask[f.index(i, j, k)] =
            inside(i, j, k) ? ScalarField::kInterior : ScalarField::kExterior;
  // promote exterior nodes touching the interior to Dirichlet
  const int di[6] = {1, -1, 0, 0, 0, 0};
  const int dj[6] = {0, 0, 1, -1, 0, 0};
  const int dk[6] = {0, 0, 0, 0, 1, -1};
  const int nn = 2 * dim;
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k) {
        if (f.mask[f.index(i, j, k)] != ScalarField::kExterior) continue;
        for (int q = 0; q < nn; ++q) {
          const int ii = i + di[q], jj = j + dj[q], kk = k + dk[q];
          if (f.in_grid(ii, jj, kk) && f.mask[f.index(ii, jj, kk)] == ScalarField::kInterior) {
            f.mask[f.index(i, j, k)] = ScalarField::kDirichlet;
            break;
          }
        }
      }
  // exterior nodes hold NaN so stale values can never leak into stencils
  for (std::size_t n = 0; n < f.size(); ++n)
    if (f.mask[n] == ScalarField::kExterior)
      f.values[n] = std::numeric_limits<double>::quiet_NaN();
  return f;
}

/// Evaluate fn on every non-exterior node (Dirichlet data + initial guess).
template <class Fn>
inline void fill_field(ScalarField& f, Fn&& fn) {
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k)
        if (f.mask[f.index(i, j, k)] != ScalarField::kExterior)
          f.at(i, j, k) = fn(f.point(i, j, k));
}

/// Evaluate fn on Dirichlet nodes only.
template <class Fn>
inline void apply_dirichlet(ScalarField& f, Fn&& fn) {
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k)
        if (f.mask[f.index(i, j, k)] == ScalarField::kDirichlet)
          f.at(i, j, k) = fn(f.point(i, j, k));
}

/// Central-difference node gradient; falls back to one-sided differences
/// against exterior nodes or the grid edge.
inline Vec node_gradient(const ScalarField& f, int i, int j = 0, int k = 0) {
  Vec g{0.0, 0.0, 0.0};
  const double v0 = f.at(i, j, k);
  for (int a = 0; a < f.dim; ++a) {
    int ip = i + (a == 0), jp = j + (a == 1), kp = k + (a == 2);
    int im = i - (a == 0), jm = j - (a == 1), km = k - (a == 2);
    const bool has_p = f.in_grid(ip, jp, kp) && f.mask_at(ip, jp, kp) != ScalarField::kExterior;
    const bool has_m = f.in_grid(im, jm, km) && f.mask_at(im, jm, km) != ScalarField::kExterior;
    if (has_p && has_m)
      g[a] = (f.at(ip, jp, kp) - f.at(im, jm, km)) / (2.0 * f.spacing);
    else if (has_p)
      g[a] = (f.at(ip, jp, kp) - v0) / f.spacing;
    else if (has_m)
      g[a] = (v0 - f.at(im, jm, km)) / f.spacing;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Point sampling
// ---------------------------------------------------------------------------

/// Field evaluation interface: grid interpolants and closed-form fields
/// implement the same surface so shell/ball quadratures work on both.
struct FieldSampler {
  virtual ~FieldSampler() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
};

/// Multilinear interpolation of node values; gradients are the multilinear
/// blend of the node-gradient field.
class GridSampler final : public FieldSampler {
 public:
  explicit GridSampler(const ScalarField& f) : f_(&f) {}

  int dim() const override { return f_->dim; }

  double value(const Vec& x) const override {
    Cell c = locate(x);
    double acc = 0.0;
    for_corners(c, [&](int i, int j, int k, double w) { acc += w * f_->at(i, j, k); });
    return acc;
  }

  Vec gradient(const Vec& x) const override {
    Cell c = locate(x);
    Vec acc{0.0, 0.0, 0.0};
    for_corners(c, [&](int i, int j, int k, double w) {
      const Vec g = node_gradient(*f_, i, j, k);
      acc[0] += w * g[0];
      acc[1] += w * g[1];
      acc[2] += w * g[2];
    });
    return acc;
  }

  const ScalarField& field() const { return *f_; }

 private:
  struct Cell {
    int i0[3]{0, 0, 0};
    double fr[3]{0.0, 0.0, 0.0};
  };

  Cell locate(const Vec& x) const {
    Cell c;
    for (int a = 0; a < f_->dim; ++a) {
      const double s = (x[a] - f_->origin[a]) / f_->spacing;
      if (s < -1e-9 || s > double(f_->shape[a] - 1) + 1e-9)
        throw out_of_domain_error("sample point outside grid box");
      int i = int(std::floor(s));
      i = std::max(0, std::min(i, f_->shape[a] - 2));
      c.i0[a] = i;
      c.fr[a] = s - i;
    }
    return c;
  }

  template <class Fn>
  void for_corners(const Cell& c, Fn&& fn) const {
    const int corners = 1 << f_->dim;
    for (int b = 0; b < corners; ++b) {
      int idx[3] = {c.i0[0], c.i0[1], c.i0[2]};
      double w = 1.0;
      for (int a = 0; a < f_->dim; ++a) {
        if (b & (1 << a)) {
          idx[a] += 1;
          w *= c.fr[a];
        } else {
          w *= 1.0 - c.fr[a];
        }
      }
      if (f_->mask_at(idx[0], idx[1], idx[2]) == ScalarField::kExterior) {
        if (w == 0.0) continue;  // degenerate corner with no weight
        throw out_of_domain_error("sample cell touches exterior node");
      }
      fn(idx[0], idx[1], idx[2], w);
    }
  }

  const ScalarField* f_;
};

// ---------------------------------------------------------------------------
// FLD persistence: JSON meta file + raw row-major little-endian float64,
// exterior nodes stored as NaN.
// ---------------------------------------------------------------------------

inline void write_fld(const ScalarField& f, const std::string& path) {
  nlohmann::json meta;
  meta["version"] = 1;
  meta["dim"] = f.dim;
  meta["shape"] = std::vector<int>(f.shape.begin(), f.shape.begin() + f.dim);
  meta["spacing"] = f.spacing;
  meta["origin"] = std::vector<double>(f.origin.begin(), f.origin.begin() + f.dim);
  meta["eps"] = f.eps;
  meta["profile"] = f.profile_name;
  meta["mass"] = f.profile_mass;
  if (f.ball_radius > 0.0) {
    meta["domain"] = {{"type", "ball"},
                      {"radius", f.ball_radius},
                      {"center", std::vector<double>(f.ball_center.begin(),
                                                     f.ball_center.begin() + f.dim)}};
  } else {
    meta["domain"] = {{"type", "box"}};
  }
  std::string raw_name = path + ".raw";
  // record only the basename so the pair stays relocatable
  meta["raw"] = raw_name.substr(raw_name.find_last_of('/') + 1);
  meta["order"] = "row-major";
  meta["endian"] = "little";

  std::ofstream mo(path);
  if (!mo) throw io_error("cannot open for write: " + path);
  mo << meta.dump(2) << "\n";
  mo.close();

  std::ofstream ro(raw_name, std::ios::binary);
  if (!ro) throw io_error("cannot open for write: " + raw_name);
  ro.write(reinterpret_cast<const char*>(f.values.data()),
           std::streamsize(f.values.size() * sizeof(double)));
  if (!ro) throw io_error("short write: " + raw_name);
}

inline ScalarField read_fld(const std::string& path) {
  std::ifstream mi(path);
  if (!mi) throw io_error("cannot open: " + path);
  nlohmann::json meta;
  try {
    mi >> meta;
  } catch (const std::exception& e) {
    throw io_error(std::string("bad FLD meta: ") + e.what());
  }
  ScalarField f;
  f.dim = meta.at("dim").get<int>();
  if (f.dim < 1 || f.dim > 3) throw io_error("bad FLD dim");
  auto shp = meta.at("shape").get<std::vector<int>>();
  auto org = meta.at("origin").get<std::vector<double>>();
  if (int(shp.size()) != f.dim || int(org.size()) != f.dim) throw io_error("bad FLD shape/origin");
  for (int a = 0; a < f.dim; ++a) {
    f.shape[a] = shp[std::size_t(a)];
    f.origin[a] = org[std::size_t(a)];
  }
  f.spacing = meta.at("spacing").get<double>();
  f.eps = meta.value("eps", 0.0);
  f.profile_name = meta.value("profile", std::string());
  f.profile_mass = meta.value("mass", 0.0);
  const std::string dir = path.find('/') == std::string::npos
                              ? std::string()
                              : path.substr(0, path.find_last_of('/') + 1);
  const std::string raw_name = dir + meta.at("raw").get<std::string>();
  f.values.assign(f.size(), 0.0);
  std::ifstream ri(raw_name, std::ios::binary);
  if (!ri) throw io_error("cannot open: " + raw_name);
  ri.read(reinterpret_cast<char*>(f.values.data()),
          std::streamsize(f.values.size() * sizeof(double)));
  if (std::size_t(ri.gcount()) != f.values.size() * sizeof(double))
    throw io_error("short read: " + raw_name);

  f.mask.assign(f.size(), ScalarField::kInterior);
  if (meta.contains("domain") && meta["domain"].value("type", "box") == "ball") {
    f.ball_radius = meta["domain"].at("radius").get<double>();
    auto ctr = meta["domain"].at("center").get<std::vector<double>>();
    for (int a = 0; a < f.dim; ++a) f.ball_center[a] = ctr[std::size_t(a)];
    // re-derive the mask with the construction rule
    ScalarField masked = make_box_field(f.dim, f.shape, f.spacing, f.origin);
    const Vec c{f.ball_center[0], f.ball_center[1], f.ball_center[2]};
    for (int i = 0; i < f.shape[0]; ++i)
      for (int j = 0; j < f.shape[1]; ++j)
        for (int k = 0; k < f.shape[2]; ++k)
          masked.mask[f.index(i, j, k)] = norm(f.point(i, j, k) - c) < f.ball_radius
                                              ? ScalarField::kInterior
                                              : ScalarField::kExterior;
    const int di[6] = {1, -1, 0, 0, 0, 0};
    const int dj[6] = {0, 0, 1, -1, 0, 0};
    const int dk[6] = {0, 0, 0, 0, 1, -1};
    for (int i = 0; i < f.shape[0]; ++i)
      for (int j = 0; j < f.shape[1]; ++j)
        for (int k = 0; k < f.shape[2]; ++k) {
          if (masked.mask[f.index(i, j, k)] != ScalarField::kExterior) continue;
          for (int q = 0; q < 2 * f.dim; ++q) {
            const int ii = i + di[q], jj = j + dj[q], kk = k + dk[q];
            if (f.in_grid(ii, jj, kk) &&
                masked.mask[f.index(ii, jj, kk)] == ScalarField::kInterior) {
              masked.mask[f.index(i, j, k)] = ScalarField::kDirichlet;
              break;
            }
          }
        }
    f.mask = masked.mask;
  } else {
    // box: grid-edge nodes are Dirichlet, NaN nodes exterior
    for (int i = 0; i < f.shape[0]; ++i)
      for (int j = 0; j < f.shape[1]; ++j)
        for (int k = 0; k < f.shape[2]; ++k) {
          const std::size_t n = f.index(i, j, k);
          if (std::isnan(f.values[n])) {
            f.mask[n] = ScalarField::kExterior;
            continue;
          }
          bool edge = (i == 0 || i == f.shape[0] - 1);
          if (f.dim >= 2) edge = edge || (j == 0 || j == f.shape[1] - 1);
          if (f.dim >= 3) edge = edge || (k == 0 || k == f.shape[2] - 1);
          if (edge) f.mask[n] = ScalarField::kDirichlet;
        }
  }
  return f;
}

}  // namespace fblab
