#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fblab {

/// Point / direction in up to three dimensions. Unused trailing
/// components are kept at zero so dot products work for any dim.
using Vec = std::array<double, 3>;

inline Vec vec1(double x) { return {x, 0.0, 0.0}; }
inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec operator+(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) {
  return {s * a[0], s * a[1], s * a[2]};
}

// ---------------------------------------------------------------------------
// Error types. Names follow the failure modes surfaced by the CLI.
// ---------------------------------------------------------------------------

struct invalid_parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct invalid_profile_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct invalid_domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_pair_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_test_function_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct invalid_boundary_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct out_of_domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct insufficient_stencil_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct pole_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct empty_surface_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Relaxation ran out of iterations; carries the last residual seen.
struct convergence_error : std::runtime_error {
  double last_residual;
  int iterations;
  convergence_error(const std::string& what, double residual, int iters)
      : std::runtime_error(what), last_residual(residual), iterations(iters) {}
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace fblab
