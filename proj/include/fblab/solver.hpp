#pragma once

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "fblab/field.hpp"
#include "fblab/integrate.hpp"
#include "fblab/mollifier.hpp"

namespace fblab {

enum class SweepOrder { red_black, lexicographic };

struct SolverConfig {
  double tol_residual = 0.0;  // 0: defaults to 1e-8 / h^2 (beta_eps units)
  int max_iterations = 200000;
  SweepOrder sweep = SweepOrder::red_black;
  std::vector<double> continuation;  // strictly decreasing eps ladder
  double relax = 0.0;                // 0: auto SOR factor from the grid size
  int threads = 1;

  void validate() const {
    if (tol_residual < 0.0) throw invalid_parameter_error("tol_residual must be positive");
    if (max_iterations < 1) throw invalid_parameter_error("max_iterations must be >= 1");
    for (std::size_t i = 0; i + 1 < continuation.size(); ++i)
      if (!(continuation[i] > continuation[i + 1]))
        throw invalid_parameter_error("continuation ladder must be strictly decreasing");
    for (double e : continuation)
      if (!(e > 0.0)) throw invalid_parameter_error("continuation eps must be positive");
  }
};

/// Discrete L-inf of Delta_h u - beta_eps(u) over interior nodes.
inline double residual(const ScalarField& f, const BetaProfile& profile, double eps) {
  if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
  const double h2 = f.spacing * f.spacing;
  const std::size_t off[3] = {std::size_t(f.shape[1]) * std::size_t(f.shape[2]),
                              std::size_t(f.shape[2]), 1};
  double worst = 0.0;
  bool any = false;
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k) {
        const std::size_t n = f.index(i, j, k);
        if (f.mask[n] != ScalarField::kInterior) continue;
        any = true;
        double s = -2.0 * f.dim * f.values[n];
        for (int a = 0; a < f.dim; ++a) s += f.values[n - off[a]] + f.values[n + off[a]];
        worst = std::max(worst, std::abs(s / h2 - profile.beta_eps(f.values[n], eps)));
      }
  if (!any) throw invalid_domain_error("field has no interior nodes");
  return worst;
}

namespace detail {

struct SweepContext {
  ScalarField* f;
  const BetaProfile* profile;
  double eps;
  double omega;
  double h2;
  double beta_max_eps;  // sup of beta_eps
};

/// Solve the pointwise stencil equation at node n given the neighbor sum.
/// G(c) = S - 2*dim*c - h^2 beta_eps(c) is strictly decreasing whenever
/// h^2 |beta_eps'| < 2*dim; a maintained sign bracket covers the rest.
inline double point_solve(const SweepContext& ctx, double S, double u_old) {
  const ScalarField& f = *ctx.f;
  const double twoN = 2.0 * f.dim;
  const double avg = S / twoN;
  const double span = ctx.h2 * ctx.beta_max_eps / twoN;
  double lo = avg - span, hi = avg;
  if (avg <= 0.0 || lo >= ctx.eps) return avg;  // beta inactive on the bracket
  auto G = [&](double c) {
    return S - twoN * c - ctx.h2 * ctx.profile->beta_eps(c, ctx.eps);
  };
  double c = std::clamp(u_old, lo, hi);
  for (int it = 0; it < 60; ++it) {
    const double g = G(c);
    if (g > 0.0)
      lo = c;
    else
      hi = c;
    const double gp = -twoN - ctx.h2 * ctx.profile->beta_eps_prime(c, ctx.eps);
    double next = gp < -1e-30 ? c - g / gp : 0.5 * (lo + hi);
    if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - c) <= 1e-16 * (1.0 + std::abs(next))) {
      c = next;
      break;
    }
    c = next;
  }
  return c;
}

inline void sweep_rows(const SweepContext& ctx, int i_begin, int i_end, int color) {
  ScalarField& f = *ctx.f;
  const std::size_t off[3] = {std::size_t(f.shape[1]) * std::size_t(f.shape[2]),
                              std::size_t(f.shape[2]), 1};
  for (int i = i_begin; i < i_end; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k) {
        if (color >= 0 && ((i + j + k) & 1) != color) continue;
        const std::size_t n = f.index(i, j, k);
        if (f.mask[n] != ScalarField::kInterior) continue;
        double S = 0.0;
        for (int a = 0; a < f.dim; ++a) S += f.values[n - off[a]] + f.values[n + off[a]];
        const double u_old = f.values[n];
        const double c = point_solve(ctx, S, u_old);
        // plain Gauss-Seidel inside the reaction band, SOR elsewhere
        const bool banded = (c > 0.0 && c < ctx.eps) || (u_old > 0.0 && u_old < ctx.eps);
        const double w = banded ? 1.0 : ctx.omega;
        f.values[n] = u_old + w * (c - u_old);
      }
}

inline void run_sweep(const SweepContext& ctx, SweepOrder order, int threads) {
  ScalarField& f = *ctx.f;
  if (order == SweepOrder::lexicographic || threads <= 1) {
    if (order == SweepOrder::lexicographic) {
      sweep_rows(ctx, 0, f.shape[0], -1);
    } else {
      sweep_rows(ctx, 0, f.shape[0], 0);
      sweep_rows(ctx, 0, f.shape[0], 1);
    }
    return;
  }
  // red-black halves are data independent within a color, so row chunks can
  // run concurrently without changing any result
  const int nt = std::min<int>(threads, std::max(1, f.shape[0] / 8));
  for (int color = 0; color < 2; ++color) {
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nt));
    const int rows = f.shape[0];
    for (int t = 0; t < nt; ++t) {
      const int b = rows * t / nt, e = rows * (t + 1) / nt;
      pool.emplace_back([&, b, e, color] { sweep_rows(ctx, b, e, color); });
    }
    for (auto& th : pool) th.join();
  }
}

inline int solve_single_eps(ScalarField& f, const BetaProfile& profile, double eps,
                            const SolverConfig& cfg, double tol) {
  SweepContext ctx;
  ctx.f = &f;
  ctx.profile = &profile;
  ctx.eps = eps;
  ctx.h2 = f.spacing * f.spacing;
  double beta_max = 0.0;
  for (int i = 0; i <= 512; ++i) beta_max = std::max(beta_max, profile.beta(i / 512.0));
  ctx.beta_max_eps = beta_max / eps;
  const int n_max = std::max(f.shape[0], std::max(f.shape[1], f.shape[2]));
  ctx.omega = cfg.relax > 0.0 ? cfg.relax : 2.0 / (1.0 + std::sin(kPi / n_max));

  double last_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    run_sweep(ctx, cfg.sweep, cfg.threads);
    if (it % 8 == 0 || it == cfg.max_iterations) {
      last_res = residual(f, profile, eps);
      if (last_res <= tol) return it;
    }
  }
  throw convergence_error("solve_peps: residual " + std::to_string(last_res) +
                              " above tolerance after max iterations",
                          last_res, cfg.max_iterations);
}

}  // namespace detail

struct SolveStats {
  int sweeps = 0;
  double residual = 0.0;
};

/// Solve Delta u = beta_eps(u) on the masked domain of `boundary` with the
/// Dirichlet data already stored in its Dirichlet nodes; interior values
/// seed the relaxation.  With a continuation ladder the rungs are solved
/// coarsest-eps first, warm-starting each next rung.
inline ScalarField solve_peps(const ScalarField& boundary, const BetaProfile& profile,
                              double eps, const SolverConfig& cfg = {},
                              SolveStats* stats = nullptr) {
  if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
  cfg.validate();
  ScalarField f = boundary;
  bool any_interior = false;
  for (std::size_t n = 0; n < f.size(); ++n) {
    if (f.mask[n] == ScalarField::kDirichlet && !std::isfinite(f.values[n]))
      throw invalid_domain_error("Dirichlet trace undefined on some boundary node");
    if (f.mask[n] == ScalarField::kInterior) {
      any_interior = true;
      if (!std::isfinite(f.values[n])) f.values[n] = 0.0;
    }
  }
  if (!any_interior) throw invalid_domain_error("domain has no interior nodes");

  const double tol =
      cfg.tol_residual > 0.0 ? cfg.tol_residual : 1e-8 / (f.spacing * f.spacing);
  std::vector<double> ladder = cfg.continuation;
  if (!ladder.empty() && ladder.back() > eps) ladder.push_back(eps);
  if (ladder.empty()) ladder.push_back(eps);
  if (ladder.back() != eps)
    throw invalid_parameter_error("continuation ladder must end at the target eps");
  int sweeps = 0;
  for (double e : ladder) sweeps += detail::solve_single_eps(f, profile, e, cfg, tol);
  f.eps = eps;
  f.profile_mass = profile.mass();
  if (stats) {
    stats->sweeps = sweeps;
    stats->residual = residual(f, profile, eps);
  }
  return f;
}

/// J_eps[u] = int |grad u|^2 / 2 + B(u/eps) over the masked domain,
/// cell-centered composite quadrature.
inline double energy_J(const ScalarField& f, const BetaProfile& profile, double eps) {
  if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
  double acc = 0.0;
  for_each_domain_cell(f, [&](const CellData& c, double w) {
    acc += w * (0.5 * dot(c.grad, c.grad) + profile.B(c.value / eps));
  });
  return acc;
}

/// LHS - RHS of the domain-variation identity
///   int (|grad u|^2/2 + B(u/eps)) d1(phi) = int sum_k dk(u) d1(u) dk(phi)
/// for a test function phi supported >= 2 cells inside the interior.
inline double domain_variation_residual(const ScalarField& f, const BetaProfile& profile,
                                        double eps, const ScalarField& phi) {
  if (!(eps > 0.0)) throw invalid_parameter_error("eps must be positive");
  if (phi.dim != f.dim || phi.shape != f.shape || phi.spacing != f.spacing ||
      phi.origin != f.origin)
    throw invalid_pair_error("phi must share the field grid");
  // compact support: phi may be nonzero only where a 2-cell margin of
  // interior nodes surrounds the node
  for (int i = 0; i < f.shape[0]; ++i)
    for (int j = 0; j < f.shape[1]; ++j)
      for (int k = 0; k < f.shape[2]; ++k) {
        if (phi.at(i, j, k) == 0.0) continue;
        for (int di = -2; di <= 2; ++di)
          for (int dj = (f.dim >= 2 ? -2 : 0); dj <= (f.dim >= 2 ? 2 : 0); ++dj)
            for (int dk = (f.dim >= 3 ? -2 : 0); dk <= (f.dim >= 3 ? 2 : 0); ++dk) {
              const int ii = i + di, jj = j + dj, kk = k + dk;
              if (!f.in_grid(ii, jj, kk) ||
                  f.mask_at(ii, jj, kk) != ScalarField::kInterior)
                throw invalid_test_function_error(
                    "phi is not compactly supported in the interior");
            }
      }
  double acc = 0.0;
  const int ni = f.shape[0] - 1;
  const int nj = f.dim >= 2 ? f.shape[1] - 1 : 1;
  const int nk = f.dim >= 3 ? f.shape[2] - 1 : 1;
  const double vol = std::pow(f.spacing, f.dim);
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < nj; ++j)
      for (int k = 0; k < nk; ++k) {
        const CellData cphi = cell_data(phi, i, j, k);
        if (cphi.value == 0.0 && cphi.grad[0] == 0.0 && cphi.grad[1] == 0.0 &&
            cphi.grad[2] == 0.0)
          continue;
        const CellData cu = cell_data(f, i, j, k);
        const double lhs =
            (0.5 * dot(cu.grad, cu.grad) + profile.B(cu.value / eps)) * cphi.grad[0];
        double rhs = 0.0;
        for (int a = 0; a < f.dim; ++a) rhs += cu.grad[a] * cu.grad[0] * cphi.grad[a];
        acc += vol * (lhs - rhs);
      }
  return acc;
}

}  // namespace fblab
