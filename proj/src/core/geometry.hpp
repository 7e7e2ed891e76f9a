#pragma once

#include <optional>
#include <string>
#include <vector>

#include "common.hpp"

namespace rl {

enum class BodyKind { sphere, ellipsoid };

// Smooth strictly convex obstacle component given by an implicit function
// f(x) <= 0. Spheres: f = |x-c|^2 - r^2. Ellipsoids: f = |M(x-c)|^2 - 1 with
// M = diag(1/radii).
struct Body {
  BodyKind kind = BodyKind::sphere;
  Vec3 center = Vec3::Zero();
  Vec3 radii = Vec3::Ones();  // sphere uses radii.x()

  double max_extent() const { return radii.maxCoeff(); }
};

// Obstacle K = union of bodies, all contained in the ball of radius rho about
// the origin; a >= rho is the radius of the reference ball U0.
struct Scene {
  std::vector<Body> bodies;
  double rho = 1.0;
  double a = 1.0;

  void validate() const;  // throws Error(Err::validation) on violations
};

struct ImplicitEval {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};

// Point on some body's surface together with the local frame data downstream
// modules need: outward unit normal, orthonormal tangent frame, and the second
// fundamental form in that frame (w.r.t. the outward normal).
struct SurfacePoint {
  int body = -1;
  Vec3 x = Vec3::Zero();
  Vec3 nu = Vec3::UnitZ();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Mat2 second_form = Mat2::Zero();
};

struct Hit {
  SurfacePoint point;
  double t = 0.0;      // ray parameter of the hit
  bool tangential = false;  // |<d,nu>| below the tangency tolerance
};

ImplicitEval implicit_eval(const Body& body, const Vec3& x);

// Outward unit normal; throws NotOnSurface when |f(x)| exceeds the surface
// tolerance (scaled by the body size).
Vec3 unit_normal(const Body& body, const Vec3& x);

// Gauss curvature at a surface point (product of principal curvatures).
double gauss_curvature(const Body& body, const Vec3& x);

// Deterministic orthonormal tangent frame (e1, e2) with e1 x e2 = nu.
void tangent_frame(const Vec3& nu, Vec3& e1, Vec3& e2);

// Full local data at x on the given body.
SurfacePoint surface_point(const Scene& scene, int body, const Vec3& x);

// Retract a point near the surface back onto it (exact for spheres and
// ellipsoids via radial scaling in the stretched frame).
Vec3 surface_project(const Body& body, const Vec3& x);

// First transversal intersection of the ray {x + t d, t > hit_step} with any
// body. Returns nullopt when the ray misses every body.
std::optional<Hit> first_hit(const Scene& scene, const Vec3& x, const Vec3& d);

// Parameter t > 0 at which the ray leaves the ball |x| <= a (forward exit).
double ball_exit(const Scene& scene, const Vec3& x, const Vec3& d);

bool inside_any_body(const Scene& scene, const Vec3& x, double slack = 0.0);

}  // namespace rl
