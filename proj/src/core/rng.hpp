#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "common.hpp"

// Deterministic sampling helpers. All randomness flows through mt19937_64 with
// explicit seeds and hand-rolled transforms so output is identical across
// standard library implementations.

namespace rl::rng {

inline double uniform01(std::mt19937_64& g) {
  return (g() >> 11) * 0x1.0p-53;  // 53-bit mantissa in [0,1)
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

inline double gaussian(std::mt19937_64& g) {
  double u1 = uniform01(g);
  double u2 = uniform01(g);
  while (u1 <= 0.0) u1 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Vec3 unit_vector(std::mt19937_64& g) {
  Vec3 v(gaussian(g), gaussian(g), gaussian(g));
  double n = v.norm();
  while (n < 1e-12) {
    v = Vec3(gaussian(g), gaussian(g), gaussian(g));
    n = v.norm();
  }
  return v / n;
}

// Quasi-uniform points on the unit sphere (golden-angle spiral).
inline std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = 1.0 - 2.0 * (i + 0.5) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = ga * i;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), z);
  }
  return pts;
}

// Quasi-uniform directions on the hemisphere around axis (inner product > 0).
inline std::vector<Vec3> fibonacci_hemisphere(int n, const Vec3& axis) {
  Vec3 a = axis.normalized();
  Vec3 h = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 e1 = a.cross(h).normalized();
  Vec3 e2 = a.cross(e1);
  std::vector<Vec3> pts;
  pts.reserve(n);
  const double ga = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    double z = (i + 0.5) / n;  // (0,1]: strictly inward component
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double phi = ga * i;
    pts.push_back(a * z + e1 * (r * std::cos(phi)) + e2 * (r * std::sin(phi)));
  }
  return pts;
}

}  // namespace rl::rng
