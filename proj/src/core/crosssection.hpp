#pragma once

#include "rayfinder.hpp"

namespace rl {

enum class JacobianMethod { finite_difference, linearized };

// Differential of the shooting map J: Z_omega -> S^2 at the launch point of a
// ray, expressed in deterministic orthonormal frames perpendicular to omega
// (domain) and theta (range).
struct CrossSectionRecord {
  Vec2 u = Vec2::Zero();  // launch coordinates on Z_omega
  Mat2 dJ = Mat2::Zero();
  double det = 0.0;
  JacobianMethod method = JacobianMethod::linearized;
};

// Exit direction of the trajectory launched from point u on Z_omega with
// direction omega. Requires exactly m_expected transversal reflections.
Vec3 shooting_map(const Scene& scene, const Vec3& omega, const Vec3& u, int m_expected);

// Central finite differences of the shooting map, starting at step
// h_rel * scene.a and shrinking while probes change reflection count or the
// probe deflection is too large for the curvature of unstable chains.
CrossSectionRecord jacobian_fd(const Scene& scene, const ReflectingRay& ray, double h_rel = 1e-4);

// Exact differential via the linearized reflection chain (variation transport
// of (dx, dd) through every bounce).
CrossSectionRecord jacobian_linearized(const Scene& scene, const ReflectingRay& ray);

// Convex-case prediction |det dJ| = 4 K(x+) |theta-omega|^{n-3} (n = 3) for
// single-reflection rays; NotApplicable otherwise.
double majda_det(const Scene& scene, const ReflectingRay& ray);

inline bool is_nondegenerate(const CrossSectionRecord& rec, double threshold = tol::nondegenerate) {
  return std::abs(rec.det) > threshold;
}

}  // namespace rl
