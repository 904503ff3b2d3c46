// fblab — command-line laboratory for the singular-perturbation
// free-boundary problem: solve the eps-problem on boxes and balls, tabulate
// shell energies, rescale and classify blow-ups, extract and label free
// boundaries, and render support-function surfaces.
//
// Exit codes: 0 success, 1 I/O failure, 2 configuration error,
// 3 numerical non-convergence (summary still written).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fblab/blowup.hpp"
#include "fblab/exact.hpp"
#include "fblab/field.hpp"
#include "fblab/invariants.hpp"
#include "fblab/mollifier.hpp"
#include "fblab/solver.hpp"
#include "fblab/spherical_energy.hpp"
#include "fblab/spherical_function.hpp"
#include "fblab/surface.hpp"

using nlohmann::json;
using namespace fblab;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_summary(const json& j) { std::cout << j.dump() << "\n"; }

Vec parse_center(const std::string& s, int dim) {
  Vec c{0.0, 0.0, 0.0};
  std::stringstream ss(s);
  std::string tok;
  int i = 0;
  while (std::getline(ss, tok, ',')) {
    if (i >= dim) throw invalid_parameter_error("too many center components: " + s);
    c[std::size_t(i++)] = std::stod(tok);
  }
  if (i != dim)
    throw invalid_parameter_error("center needs " + std::to_string(dim) + " components: " + s);
  return c;
}

// "r0:r1:n" -> n values spaced linearly from r0 to r1 inclusive
std::vector<double> parse_range(const std::string& s) {
  double a = 0.0, b = 0.0;
  int n = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1)
    throw invalid_parameter_error("expected r0:r1:n, got: " + s);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

BetaProfile load_profile(const std::string& name, double scale) {
  if (name == "poly" || name == "smooth") return profile_by_name(name, scale);
  // otherwise a two-column text table (t, beta) with a header row
  std::ifstream in(name);
  if (!in) throw io_error("cannot open profile table: " + name);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::pair<double, double>> samples;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double t = 0.0, b = 0.0;
    std::replace(line.begin(), line.end(), ',', ' ');
    if (std::sscanf(line.c_str(), "%lf %lf", &t, &b) != 2)
      throw invalid_profile_error("bad profile table row: " + line);
    samples.emplace_back(t, b);
  }
  return BetaProfile::tabulated(samples, scale);
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveSpec {
  int dim = 2;
  std::string domain_type = "ball";
  double radius = 1.0;
  double half_width = 1.0;
  double h = 1.0 / 64.0;
  std::string boundary = "half_plane";
  double bc_mass = 1.0;
  double bc_alpha = 1.0;
  double bc_beta = 1.0;
  double bc_value = 0.0;
  std::string bc_table;
  std::string profile = "poly";
  double profile_scale = 1.0;
  double eps = 0.05;
  std::vector<double> ladder;
  double tol = 0.0;
  int max_iterations = 200000;
  std::string sweep = "red_black";
  std::string init = "auto";  // auto | data | zero
  std::string out = "u.fld";
};

void merge_config_file(SolveSpec& s, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw invalid_parameter_error(std::string("config parse error: ") + e.what());
  }
  s.dim = j.value("dim", s.dim);
  if (j.contains("domain")) {
    const auto& d = j["domain"];
    s.domain_type = d.value("type", s.domain_type);
    s.radius = d.value("radius", s.radius);
    s.half_width = d.value("half_width", s.half_width);
  }
  s.h = j.value("h", s.h);
  if (j.contains("boundary")) {
    const auto& b = j["boundary"];
    s.boundary = b.value("name", s.boundary);
    s.bc_mass = b.value("mass", s.bc_mass);
    s.bc_alpha = b.value("alpha", s.bc_alpha);
    s.bc_beta = b.value("beta", s.bc_beta);
    s.bc_value = b.value("value", s.bc_value);
    s.bc_table = b.value("path", s.bc_table);
  }
  if (j.contains("profile")) {
    s.profile = j["profile"].value("name", s.profile);
    s.profile_scale = j["profile"].value("scale", s.profile_scale);
  }
  s.eps = j.value("eps", s.eps);
  if (j.contains("ladder")) s.ladder = j["ladder"].get<std::vector<double>>();
  if (j.contains("solver")) {
    const auto& v = j["solver"];
    s.tol = v.value("tol", s.tol);
    s.max_iterations = v.value("max_iterations", s.max_iterations);
    s.sweep = v.value("sweep", s.sweep);
  }
  s.init = j.value("init", s.init);
  s.out = j.value("out", s.out);
}

int run_solve(const SolveSpec& spec, int threads) {
  const BetaProfile profile = load_profile(spec.profile, spec.profile_scale);

  ScalarField dom;
  if (spec.domain_type == "ball")
    dom = make_ball_field(spec.dim, spec.radius, spec.h);
  else if (spec.domain_type == "box")
    dom = make_centered_box_field(spec.dim, spec.half_width, spec.h);
  else
    throw invalid_parameter_error("unknown domain type: " + spec.domain_type);

  // boundary registry
  std::function<double(const Vec&)> data;
  if (spec.boundary == "half_plane") {
    const double a = std::sqrt(2.0 * spec.bc_mass);
    data = [a](const Vec& p) { return a * std::max(p[0], 0.0); };
  } else if (spec.boundary == "wedge") {
    const double a = spec.bc_alpha;
    data = [a](const Vec& p) { return a * std::abs(p[0]); };
  } else if (spec.boundary == "two_plane") {
    const ExactKind k = ExactKind::two_plane(spec.bc_alpha, spec.bc_beta);
    const int dim = spec.dim;
    data = [k, dim](const Vec& p) { return exact_value(k, p, dim); };
  } else if (spec.boundary == "catenoid") {
    if (spec.dim != 3) throw invalid_parameter_error("catenoid data requires dim 3");
    data = [](const Vec& p) { return exact_value(ExactKind::catenoid(), p, 3); };
  } else if (spec.boundary == "constant") {
    const double c = spec.bc_value;
    data = [c](const Vec&) { return c; };
  } else if (spec.boundary == "custom-table") {
    if (spec.dim != 2 || spec.domain_type != "ball")
      throw invalid_parameter_error("custom-table data is defined on 2D ball domains");
    std::ifstream in(spec.bc_table);
    if (!in) throw io_error("cannot open boundary table: " + spec.bc_table);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      double t = 0.0, v = 0.0;
      std::replace(line.begin(), line.end(), ',', ' ');
      if (std::sscanf(line.c_str(), "%lf %lf", &t, &v) != 2)
        throw invalid_parameter_error("bad boundary table row: " + line);
      rows.emplace_back(t, v);
    }
    if (rows.size() < 2) throw invalid_parameter_error("boundary table too short");
    std::sort(rows.begin(), rows.end());
    data = [rows](const Vec& p) {
      double th = std::atan2(p[1], p[0]);
      if (th < rows.front().first) th += 2.0 * kPi;
      auto it = std::lower_bound(rows.begin(), rows.end(), std::make_pair(th, -1e300));
      if (it == rows.begin()) return it->second;
      if (it == rows.end()) return rows.back().second;
      const auto [t1, v1] = *it;
      const auto [t0, v0] = *(it - 1);
      const double w = (th - t0) / (t1 - t0);
      return (1.0 - w) * v0 + w * v1;
    };
  } else {
    throw invalid_parameter_error("unknown boundary expression: " + spec.boundary);
  }

  // interior seed: the 1D layer composite for half-plane data, else the
  // data expression itself (zero for tables)
  if (spec.init == "zero" || (spec.init == "auto" && spec.boundary == "custom-table")) {
    fill_field(dom, [](const Vec&) { return 0.0; });
  } else if (spec.init == "auto" && spec.boundary == "half_plane") {
    const LayerProfileGuess guess(profile, spec.eps);
    fill_field(dom, guess);
  } else {
    fill_field(dom, data);
  }
  apply_dirichlet(dom, data);

  SolverConfig cfg;
  cfg.tol_residual = spec.tol;
  cfg.max_iterations = spec.max_iterations;
  cfg.threads = threads;
  cfg.continuation = spec.ladder;
  if (spec.sweep == "red_black")
    cfg.sweep = SweepOrder::red_black;
  else if (spec.sweep == "lexicographic")
    cfg.sweep = SweepOrder::lexicographic;
  else
    throw invalid_parameter_error("unknown sweep order: " + spec.sweep);

  json summary;
  summary["command"] = "solve";
  summary["out"] = spec.out;
  summary["eps"] = spec.eps;
  summary["h"] = spec.h;
  summary["boundary"] = spec.boundary;
  try {
    SolveStats stats;
    ScalarField u = solve_peps(dom, profile, spec.eps, cfg, &stats);
    u.profile_name = spec.profile;
    write_fld(u, spec.out);
    summary["converged"] = true;
    summary["sweeps"] = stats.sweeps;
    summary["residual"] = stats.residual;
    summary["energy"] = energy_J(u, profile, spec.eps);
    print_summary(summary);
    return 0;
  } catch (const convergence_error& e) {
    summary["converged"] = false;
    summary["sweeps"] = e.iterations;
    summary["residual"] = e.last_residual;
    print_summary(summary);
    std::cerr << "fblab solve: " << e.what() << "\n";
    return 3;
  }
}

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

int run_energy(const std::string& field_path, const std::string& center_s,
               const std::string& radii_s, const std::string& mode_s, double eps_flag,
               double mass_flag, int n_theta, int n_phi, const std::string& out) {
  const ScalarField f = read_fld(field_path);
  const Vec center = parse_center(center_s, f.dim);
  const std::vector<double> radii = parse_range(radii_s);
  const ShellQuadrature quad = make_shell_quadrature(f.dim, n_theta, n_phi);
  const GridSampler s(f);

  const double eps = eps_flag > 0.0 ? eps_flag : f.eps;
  const double mass = mass_flag > 0.0 ? mass_flag : f.profile_mass;
  SpruckMode mode;
  BetaProfile profile = BetaProfile::polynomial();
  if (mode_s == "eps") {
    mode = SpruckMode::eps;
    if (!(eps > 0.0))
      throw invalid_parameter_error("eps mode needs --eps or an eps-tagged field");
    if (!f.profile_name.empty()) profile = load_profile(f.profile_name, 1.0);
  } else if (mode_s == "limit") {
    mode = SpruckMode::limit;
    if (!(mass > 0.0))
      throw invalid_parameter_error("limit mode needs --mass or field metadata");
  } else {
    throw invalid_parameter_error("mode must be eps or limit");
  }

  const EnergyProfile prof =
      monotonicity_profile(s, center, radii, mode, quad, &profile, eps, mass);

  std::ofstream csv(out);
  if (!csv) throw io_error("cannot open for write: " + out);
  csv << "# center=" << center_s << " mode=" << mode_s << " eps=" << fmt17(eps)
      << " M=" << fmt17(mass) << "\n";
  csv << "radius,S,defect\n";
  for (std::size_t i = 0; i < prof.radii.size(); ++i)
    csv << fmt17(prof.radii[i]) << "," << fmt17(prof.values[i]) << ","
        << fmt17(i == 0 ? 0.0 : prof.defects[i - 1]) << "\n";
  csv.close();

  json summary;
  summary["command"] = "energy";
  summary["out"] = out;
  summary["mode"] = mode_s;
  summary["n_radii"] = prof.radii.size();
  summary["min_defect"] = prof.min_defect();
  print_summary(summary);
  return 0;
}

// ---------------------------------------------------------------------------
// blowup
// ---------------------------------------------------------------------------

int run_blowup(const std::string& field_path, const std::string& center_s,
               const std::string& scales_s, int out_nodes, const std::string& out_dir) {
  const ScalarField f = read_fld(field_path);
  const Vec center = parse_center(center_s, f.dim);
  const std::vector<double> scales = parse_range(scales_s);
  std::filesystem::create_directories(out_dir);
  std::array<int, 3> shape{out_nodes, 1, 1};
  for (int a = 1; a < f.dim; ++a) shape[std::size_t(a)] = out_nodes;

  json outputs = json::array();
  json deviations = json::array();
  int idx = 0;
  for (double rho : scales) {
    const ScalarField b = rescale(f, center, rho, shape);
    char name[64];
    std::snprintf(name, sizeof name, "blowup_%03d.fld", idx++);
    const std::string path = out_dir + "/" + name;
    write_fld(b, path);
    outputs.push_back(path);
    if (f.dim >= 2) {
      const ShellQuadrature quad = make_shell_quadrature(f.dim, 128, 128);
      const GridSampler s(b);
      const double w = 0.5 * b.spacing * (out_nodes - 1);
      deviations.push_back(homogeneity_deviation(s, {0, 0, 0}, 0.25 * w, 0.5 * w, quad, 65));
    }
  }
  json summary;
  summary["command"] = "blowup";
  summary["scales"] = scales;
  summary["outputs"] = outputs;
  summary["homogeneity_deviations"] = deviations;
  print_summary(summary);
  return 0;
}

// ---------------------------------------------------------------------------
// classify2d
// ---------------------------------------------------------------------------

int run_classify2d(const std::string& field_path, const std::string& center_s, double radius,
                   int samples, double tol, double mass_flag, const std::string& out) {
  const ScalarField f = read_fld(field_path);
  if (f.dim != 2) throw invalid_parameter_error("classify2d needs a 2D field");
  const Vec center = parse_center(center_s, 2);
  const double mass = mass_flag > 0.0 ? mass_flag : f.profile_mass;
  if (!(mass > 0.0))
    throw invalid_parameter_error("classify2d needs --mass or field metadata");
  const GridSampler s(f);
  const std::vector<double> trace = circle_trace(s, center, radius, samples);
  const BlowupClass c = classify_blowup_2d(trace, mass, tol);

  json rec;
  rec["variant"] = [&] {
    switch (c.variant) {
      case BlowupVariant::zero: return "zero";
      case BlowupVariant::half_plane: return "half_plane";
      case BlowupVariant::wedge: return "wedge";
      case BlowupVariant::two_plane: return "two_plane";
      default: return "unclassified";
    }
  }();
  rec["alpha"] = c.alpha;
  rec["beta"] = c.beta;
  rec["fit_residual"] = c.fit_residual;
  rec["normal"] = {c.normal[0], c.normal[1]};
  rec["mass"] = mass;
  rec["radius"] = radius;
  rec["samples"] = samples;
  if (!out.empty()) {
    std::ofstream o(out);
    if (!o) throw io_error("cannot open for write: " + out);
    o << rec.dump(2) << "\n";
  }
  json summary = rec;
  summary["command"] = "classify2d";
  if (!out.empty()) summary["out"] = out;
  print_summary(summary);
  return 0;
}

// ---------------------------------------------------------------------------
// fb
// ---------------------------------------------------------------------------

const char* label_name(DensityLabel l) {
  switch (l) {
    case DensityLabel::half_density: return "half_density";
    case DensityLabel::full_density: return "full_density";
    case DensityLabel::degenerate: return "degenerate";
    default: return "unknown";
  }
}

int run_fb(const std::string& field_path, double level_tol, const std::string& radii_s,
           double half_tol, double mass_flag, bool no_label, const std::string& out) {
  const ScalarField f = read_fld(field_path);
  FreeBoundarySet fb = extract_free_boundary(f, level_tol);

  std::vector<double> radii;
  if (radii_s == "auto")
    radii = {16.0 * f.spacing, 8.0 * f.spacing, 4.0 * f.spacing};
  else
    radii = parse_list(radii_s);
  const double mass =
      mass_flag > 0.0 ? mass_flag : (f.profile_mass > 0.0 ? f.profile_mass : 1.0);

  if (!no_label && !fb.points.empty()) {
    const GridSampler s(f);
    // label point by point so balls that exit the grid degrade to unknown
    for (std::size_t i = 0; i < fb.points.size(); ++i) {
      FreeBoundarySet one;
      one.points.push_back(fb.points[i]);
      one.labels.assign(1, DensityLabel::unknown);
      one.densities.assign(1, std::numeric_limits<double>::quiet_NaN());
      one.density_ladders.resize(1);
      try {
        const FreeBoundarySet lab = label_density_sets(one, s, radii, half_tol, mass, 64);
        fb.labels[i] = lab.labels[0];
        fb.densities[i] = lab.densities[0];
        fb.density_ladders[i] = lab.density_ladders[0];
      } catch (const out_of_domain_error&) {
        fb.labels[i] = DensityLabel::unknown;
      }
    }
  }

  json rec;
  rec["points"] = json::array();
  rec["labels"] = json::array();
  rec["densities"] = json::array();
  rec["ladders"] = json::array();
  int counts[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < fb.points.size(); ++i) {
    json p = json::array();
    for (int a = 0; a < f.dim; ++a) p.push_back(fb.points[i][std::size_t(a)]);
    rec["points"].push_back(p);
    rec["labels"].push_back(label_name(fb.labels[i]));
    ++counts[int(fb.labels[i])];
    if (std::isnan(fb.densities[i]))
      rec["densities"].push_back(nullptr);
    else
      rec["densities"].push_back(fb.densities[i]);
    rec["ladders"].push_back(fb.density_ladders[i]);
  }
  std::ofstream o(out);
  if (!o) throw io_error("cannot open for write: " + out);
  o << rec.dump() << "\n";

  json summary;
  summary["command"] = "fb";
  summary["out"] = out;
  summary["n_points"] = fb.points.size();
  summary["unknown"] = counts[0];
  summary["half_density"] = counts[1];
  summary["full_density"] = counts[2];
  summary["degenerate"] = counts[3];
  print_summary(summary);
  return 0;
}

// ---------------------------------------------------------------------------
// catenoid
// ---------------------------------------------------------------------------

int run_catenoid(int samples) {
  const double th0 = catenoid_theta0();
  const double fp0 = catenoid_f(th0).second;

  std::vector<double> grid;
  for (int i = 0; i <= 10000; ++i) grid.push_back(0.1 + (kPi - 0.2) * i / 10000.0);
  const double support_defect = catenoid_support_identity(grid);
  double ode_res = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double th = 0.5 * th0 + (kPi - th0) * i / 10000.0;
    const auto [fv, fpv] = catenoid_f(th);
    ode_res = std::max(
        ode_res, std::abs(catenoid_fpp(th) + std::cos(th) / std::sin(th) * fpv + 2.0 * fv));
  }

  if (samples > 0) {
    std::cout << "theta,f,fprime\n";
    for (int i = 0; i < samples; ++i) {
      const double th = 0.05 + (kPi - 0.1) * i / std::max(1, samples - 1);
      const auto [fv, fpv] = catenoid_f(th);
      std::cout << fmt17(th) << "," << fmt17(fv) << "," << fmt17(fpv) << "\n";
    }
  }

  json summary;
  summary["command"] = "catenoid";
  summary["theta0"] = th0;
  summary["fprime_theta0"] = fp0;
  summary["f_theta0_residual"] = std::abs(catenoid_f(th0).first);
  summary["support_identity_defect"] = support_defect;
  summary["ode_residual_max"] = ode_res;
  print_summary(summary);
  return 0;
}

// ---------------------------------------------------------------------------
// surface
// ---------------------------------------------------------------------------

SphericalFunction load_g_csv(const std::string& path, int n_theta, int n_phi) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open g samples: " + path);
  std::string line;
  std::getline(in, line);  // header theta,phi,g
  SphericalFunction g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.values.assign(std::size_t(n_theta) * std::size_t(n_phi),
                  std::numeric_limits<double>::quiet_NaN());
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double th = 0.0, ph = 0.0, gv = 0.0;
    std::replace(line.begin(), line.end(), ',', ' ');
    if (std::sscanf(line.c_str(), "%lf %lf %lf", &th, &ph, &gv) != 3)
      throw invalid_parameter_error("bad g sample row: " + line);
    const int j = int(std::round(th / g.dtheta() - 0.5));
    const int k = int(std::round(ph / g.dphi()));
    if (j < 0 || j >= n_theta || std::abs(g.theta(j) - th) > 1e-9)
      throw invalid_parameter_error("g sample off the shifted lat-long grid: " + line);
    g.values[g.index(j, k)] = gv;
    ++rows;
  }
  if (rows != g.values.size())
    throw invalid_parameter_error("g samples do not cover the full grid");
  double scale = 0.0;
  for (double v : g.values) scale = std::max(scale, std::abs(v));
  g.scale = scale > 0.0 ? scale : 1.0;
  return g;
}

int run_surface(const std::string& g_csv, const std::string& field_path,
                const std::string& exact_name, const std::string& res_s, double trace_radius,
                double mass_flag, const std::string& out_obj, const std::string& out_summary) {
  int n_theta = 128, n_phi = 256;
  if (std::sscanf(res_s.c_str(), "%d,%d", &n_theta, &n_phi) != 2)
    throw invalid_parameter_error("expected --res nt,np, got: " + res_s);

  SphericalFunction g;
  double mass = mass_flag;
  if (!exact_name.empty()) {
    if (exact_name != "catenoid")
      throw invalid_parameter_error("unknown exact surface: " + exact_name);
    const double fp0 = catenoid_f(catenoid_theta0()).second;
    g = make_spherical_function(
        n_theta, n_phi, [&](double th, double) { return catenoid_f(th).first / fp0; });
    if (!(mass > 0.0)) mass = 0.5;
  } else if (!field_path.empty()) {
    const ScalarField f = read_fld(field_path);
    const GridSampler s(f);
    g = spherical_trace(s, {0, 0, 0}, trace_radius, n_theta, n_phi);
    if (!(mass > 0.0)) mass = f.profile_mass;
  } else if (!g_csv.empty()) {
    g = load_g_csv(g_csv, n_theta, n_phi);
  } else {
    throw invalid_parameter_error("surface needs one of --g, --field, --exact");
  }
  if (!(mass > 0.0))
    throw invalid_parameter_error(
        "surface needs --mass (or field metadata) for the contact-angle sphere");

  const SurfaceMesh mesh = export_mesh(g);
  std::ofstream obj(out_obj);
  if (!obj) throw io_error("cannot open for write: " + out_obj);
  obj << mesh.to_obj();
  obj.close();

  double max_mean = 0.0, max_defect = 0.0, min_g = 1e300;
  int branch_flags = 0;
  for (int j = 1; j < g.n_theta - 1; ++j)
    for (int k = 0; k < g.n_phi; ++k) {
      if (!g.in_support(j, k)) continue;
      min_g = std::min(min_g, g.at(j, k));
      const SurfaceSample s = curvature_report(g, j, k);
      max_mean = std::max(max_mean, std::abs(s.mean_residual));
      if (j >= 2 && j <= g.n_theta - 3) {
        max_defect = std::max(max_defect, s.conformality_defect);
        if (s.branch_flag) ++branch_flags;
      }
    }

  const auto boundary = support_boundary(g);
  double x_min = 1e300, x_max = 0.0, ang_min = 1e300, ang_max = 0.0;
  if (!boundary.empty()) {
    const auto angles = contact_angle(g, boundary, mass, 0.1);
    for (std::size_t i = 0; i < boundary.size(); ++i) {
      const double xn = boundary_X_norm(g, boundary[i]);
      x_min = std::min(x_min, xn);
      x_max = std::max(x_max, xn);
      ang_min = std::min(ang_min, angles[i].angle);
      ang_max = std::max(ang_max, angles[i].angle);
    }
  }

  json summary;
  summary["command"] = "surface";
  summary["out"] = out_obj;
  summary["n_vertices"] = mesh.vertices.size();
  summary["n_triangles"] = mesh.triangles.size();
  summary["euler_characteristic"] = mesh.euler_characteristic();
  summary["boundary_loops"] = mesh.boundary_loop_count();
  summary["max_mean_residual"] = max_mean;
  summary["max_conformality_defect"] = max_defect;
  summary["branch_flags"] = branch_flags;
  summary["min_support_g"] = min_g;  // star-shapedness diagnostic: min of X . n
  summary["mass"] = mass;
  if (!boundary.empty()) {
    summary["boundary_X"] = {{"min", x_min}, {"max", x_max}};
    summary["contact_angle"] = {{"min", ang_min}, {"max", ang_max}};
  }
  if (!out_summary.empty()) {
    std::ofstream o(out_summary);
    if (!o) throw io_error("cannot open for write: " + out_summary);
    o << summary.dump(2) << "\n";
    summary["summary"] = out_summary;
  }
  print_summary(summary);
  return 0;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

int run_check(const std::string& suite, int threads) {
  if (suite != "all" && suite != "fast")
    throw invalid_parameter_error("suite must be all or fast");
  const auto results = checks::run_suite(suite == "fast", threads, &std::cout);
  int passed = 0;
  json failures = json::array();
  for (const auto& r : results) {
    if (r.pass)
      ++passed;
    else
      failures.push_back(r.name);
  }
  json summary;
  summary["command"] = "check";
  summary["suite"] = suite;
  summary["passed"] = passed;
  summary["failed"] = results.size() - std::size_t(passed);
  summary["failures"] = failures;
  print_summary(summary);
  return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fblab: numerical laboratory for the singular-perturbation free-boundary problem\n"
      "Option precedence: command-line flags > --config file > built-in defaults."};
  app.require_subcommand(1);
  int threads = int(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  app.add_option("--threads", threads, "cap on worker threads (default: machine parallelism)");

  // solve
  SolveSpec spec;
  std::string config_path;
  std::string ladder_s;
  auto* solve = app.add_subcommand("solve", "solve the eps-problem and write an FLD field");
  solve->add_option("--config", config_path, "JSON run configuration");
  auto* o_dim = solve->add_option("--dim", spec.dim, "1, 2 or 3");
  auto* o_domain = solve->add_option("--domain", spec.domain_type, "ball | box");
  auto* o_radius = solve->add_option("--radius", spec.radius, "ball radius");
  auto* o_halfw = solve->add_option("--half-width", spec.half_width, "box half width");
  auto* o_h = solve->add_option("--spacing", spec.h, "grid spacing h");
  auto* o_bc = solve->add_option(
      "--boundary", spec.boundary,
      "half_plane | wedge | two_plane | catenoid | constant | custom-table");
  auto* o_mass = solve->add_option("--mass", spec.bc_mass, "half_plane mass M");
  auto* o_alpha = solve->add_option("--alpha", spec.bc_alpha, "wedge/two_plane slope");
  auto* o_beta = solve->add_option("--beta", spec.bc_beta, "two_plane negative slope");
  auto* o_value = solve->add_option("--value", spec.bc_value, "constant boundary value");
  auto* o_table = solve->add_option("--table", spec.bc_table, "custom boundary table path");
  auto* o_profile =
      solve->add_option("--profile", spec.profile, "poly | smooth | path to a (t, beta) table");
  auto* o_scale = solve->add_option("--scale", spec.profile_scale, "profile scale factor");
  auto* o_eps = solve->add_option("--eps", spec.eps, "mollifier width");
  auto* o_ladder = solve->add_option("--ladder", ladder_s,
                                     "descending eps continuation ladder, e.g. 0.2,0.1,0.05");
  auto* o_tol = solve->add_option("--tol", spec.tol, "residual tolerance (0: 1e-8/h^2)");
  auto* o_maxit = solve->add_option("--max-iter", spec.max_iterations, "sweep budget");
  auto* o_sweep = solve->add_option("--sweep", spec.sweep, "red_black | lexicographic");
  auto* o_init = solve->add_option("--init", spec.init, "auto | data | zero");
  auto* o_out = solve->add_option("--out", spec.out, "output FLD path");

  // energy
  std::string e_field, e_center = "0,0", e_radii = "0.1:0.45:20", e_mode = "eps",
                       e_out = "s.csv";
  double e_eps = 0.0, e_mass = 0.0;
  int e_ntheta = 256, e_nphi = 0;
  auto* energy = app.add_subcommand("energy", "tabulate the shell energy S over radii");
  energy->add_option("--field", e_field, "input FLD")->required();
  energy->add_option("--center", e_center, "x,y[,z]");
  energy->add_option("--radii", e_radii, "r0:r1:n");
  energy->add_option("--mode", e_mode, "eps | limit");
  energy->add_option("--eps", e_eps, "override the field eps tag");
  energy->add_option("--mass", e_mass, "override the field mass metadata");
  energy->add_option("--ntheta", e_ntheta, "angular nodes");
  energy->add_option("--nphi", e_nphi, "3D azimuthal nodes (0: 2*ntheta)");
  energy->add_option("--out", e_out, "output CSV path");

  // blowup
  std::string b_field, b_center = "0,0", b_scales = "0.4:0.1:4", b_out = "blowups";
  int b_nodes = 65;
  auto* blowup = app.add_subcommand("blowup", "write rescaled fields u(x0 + rho x)/rho");
  blowup->add_option("--field", b_field, "input FLD")->required();
  blowup->add_option("--center", b_center, "x,y[,z]");
  blowup->add_option("--scales", b_scales, "s0:s1:n");
  blowup->add_option("--shape", b_nodes, "output nodes per axis");
  blowup->add_option("--out", b_out, "output directory");

  // classify2d
  std::string c_field, c_center = "0,0", c_out = "cls.json";
  double c_radius = 0.5, c_tol = 1e-3, c_mass = 0.0;
  int c_samples = 512;
  auto* classify = app.add_subcommand("classify2d", "classify the blow-up trace on a circle");
  classify->add_option("--field", c_field, "input FLD")->required();
  classify->add_option("--center", c_center, "x,y");
  classify->add_option("--radius", c_radius, "trace radius");
  classify->add_option("--samples", c_samples, "trace samples");
  classify->add_option("--tol", c_tol, "classification tolerance");
  classify->add_option("--mass", c_mass, "override the field mass metadata");
  classify->add_option("--out", c_out, "output JSON path");

  // fb
  std::string f_field, f_radii = "auto", f_out = "fb.json";
  double f_level = 0.0, f_half_tol = 0.05, f_mass = 0.0;
  bool f_no_label = false;
  auto* fb = app.add_subcommand("fb", "extract and label the free boundary");
  fb->add_option("--field", f_field, "input FLD")->required();
  fb->add_option("--level-tol", f_level, "zero dead band");
  fb->add_option("--radii", f_radii, "descending density radii, e.g. 0.3,0.2,0.1");
  fb->add_option("--half-tol", f_half_tol, "half-density tolerance");
  fb->add_option("--mass", f_mass, "override the field mass metadata");
  fb->add_flag("--no-label", f_no_label, "skip density labeling");
  fb->add_option("--out", f_out, "output JSON path");

  // catenoid
  bool cat_report = false;
  int cat_samples = 0;
  auto* cat = app.add_subcommand("catenoid", "report the catenoid spherical profile");
  cat->add_flag("--report", cat_report, "print the summary record (default)");
  cat->add_option("--samples", cat_samples, "also print a CSV table of f with n rows");

  // surface
  std::string s_g, s_field, s_exact, s_res = "128,256", s_out = "m.obj", s_summary;
  double s_trace_r = 0.5, s_mass = 0.0;
  auto* surface = app.add_subcommand("surface", "build the support-function immersion and mesh");
  surface->add_option("--g", s_g, "CSV of theta,phi,g on the shifted lat-long grid");
  surface->add_option("--field", s_field, "FLD field, traced on the unit sphere");
  surface->add_option("--exact", s_exact, "built-in surface: catenoid");
  surface->add_option("--res", s_res, "nt,np grid resolution");
  surface->add_option("--trace-radius", s_trace_r, "sphere radius for --field traces");
  surface->add_option("--mass", s_mass, "mass M for the contact-angle sphere");
  surface->add_option("--out", s_out, "output OBJ path");
  surface->add_option("--summary", s_summary, "output JSON summary path");

  // check
  std::string suite = "all";
  auto* check = app.add_subcommand("check", "run the reproducible invariant suite");
  check->add_option("--suite", suite, "all | fast");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "fblab: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*solve) {
      if (!config_path.empty()) {
        SolveSpec from_file;
        merge_config_file(from_file, config_path);
        // flags given on the command line override the file
        if (!*o_dim) spec.dim = from_file.dim;
        if (!*o_domain) spec.domain_type = from_file.domain_type;
        if (!*o_radius) spec.radius = from_file.radius;
        if (!*o_halfw) spec.half_width = from_file.half_width;
        if (!*o_h) spec.h = from_file.h;
        if (!*o_bc) spec.boundary = from_file.boundary;
        if (!*o_mass) spec.bc_mass = from_file.bc_mass;
        if (!*o_alpha) spec.bc_alpha = from_file.bc_alpha;
        if (!*o_beta) spec.bc_beta = from_file.bc_beta;
        if (!*o_value) spec.bc_value = from_file.bc_value;
        if (!*o_table) spec.bc_table = from_file.bc_table;
        if (!*o_profile) spec.profile = from_file.profile;
        if (!*o_scale) spec.profile_scale = from_file.profile_scale;
        if (!*o_eps) spec.eps = from_file.eps;
        if (!*o_ladder) spec.ladder = from_file.ladder;
        if (!*o_tol) spec.tol = from_file.tol;
        if (!*o_maxit) spec.max_iterations = from_file.max_iterations;
        if (!*o_sweep) spec.sweep = from_file.sweep;
        if (!*o_init) spec.init = from_file.init;
        if (!*o_out) spec.out = from_file.out;
      }
      if (*o_ladder) spec.ladder = parse_list(ladder_s);
      return run_solve(spec, threads);
    }
    if (*energy)
      return run_energy(e_field, e_center, e_radii, e_mode, e_eps, e_mass, e_ntheta, e_nphi,
                        e_out);
    if (*blowup) return run_blowup(b_field, b_center, b_scales, b_nodes, b_out);
    if (*classify)
      return run_classify2d(c_field, c_center, c_radius, c_samples, c_tol, c_mass, c_out);
    if (*fb) return run_fb(f_field, f_level, f_radii, f_half_tol, f_mass, f_no_label, f_out);
    if (*cat) {
      (void)cat_report;
      return run_catenoid(cat_samples);
    }
    if (*surface)
      return run_surface(s_g, s_field, s_exact, s_res, s_trace_r, s_mass, s_out, s_summary);
    if (*check) return run_check(suite, threads);
  } catch (const io_error& e) {
    std::cerr << "fblab: " << e.what() << "\n";
    return 1;
  } catch (const convergence_error& e) {
    std::cerr << "fblab: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "fblab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
