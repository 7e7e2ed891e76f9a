#include "geometry.hpp"

#include <cmath>

namespace rl {

void Scene::validate() const {
  if (bodies.empty()) fail(Err::validation, "scene has no bodies");
  if (!(rho > 0.0)) fail(Err::validation, "rho must be positive");
  if (a + 1e-12 < rho) fail(Err::validation, "a must be >= rho");
  for (size_t i = 0; i < bodies.size(); ++i) {
    const Body& b = bodies[i];
    if (!(b.radii.minCoeff() > 0.0)) fail(Err::validation, "body radii must be positive");
    if (b.kind == BodyKind::sphere && (b.radii.x() != b.radii.y() || b.radii.x() != b.radii.z()))
      fail(Err::validation, "sphere body must have equal radii");
    if (b.center.norm() + b.max_extent() > rho + 1e-12)
      fail(Err::validation, "body " + std::to_string(i) + " not contained in the rho ball");
  }
  for (size_t i = 0; i < bodies.size(); ++i)
    for (size_t j = i + 1; j < bodies.size(); ++j) {
      double gap = (bodies[i].center - bodies[j].center).norm() -
                   bodies[i].max_extent() - bodies[j].max_extent();
      if (!(gap > 0.0))
        fail(Err::validation, "bodies " + std::to_string(i) + " and " + std::to_string(j) +
                                  " are not disjoint with positive gap");
    }
}

ImplicitEval implicit_eval(const Body& body, const Vec3& x) {
  ImplicitEval out;
  Vec3 p = x - body.center;
  if (body.kind == BodyKind::sphere) {
    double r = body.radii.x();
    out.value = p.squaredNorm() - r * r;
    out.gradient = 2.0 * p;
    out.hessian = 2.0 * Mat3::Identity();
  } else {
    Vec3 m2(1.0 / (body.radii.x() * body.radii.x()),
            1.0 / (body.radii.y() * body.radii.y()),
            1.0 / (body.radii.z() * body.radii.z()));
    out.value = m2.x() * p.x() * p.x() + m2.y() * p.y() * p.y() + m2.z() * p.z() * p.z() - 1.0;
    out.gradient = 2.0 * Vec3(m2.x() * p.x(), m2.y() * p.y(), m2.z() * p.z());
    out.hessian = 2.0 * m2.asDiagonal();
  }
  return out;
}

static double surface_scale(const Body& body) {
  // |f| tolerance scale: f is quadratic, gradient magnitude ~ extent
  return std::max(1.0, body.max_extent());
}

Vec3 unit_normal(const Body& body, const Vec3& x) {
  ImplicitEval e = implicit_eval(body, x);
  if (std::abs(e.value) > tol::surface * surface_scale(body) * surface_scale(body))
    fail(Err::not_on_surface, "point is not on the body surface");
  double g = e.gradient.norm();
  if (g < 1e-300) fail(Err::not_on_surface, "vanishing gradient");
  return e.gradient / g;
}

void tangent_frame(const Vec3& nu, Vec3& e1, Vec3& e2) {
  Vec3 h = std::abs(nu.x()) <= std::abs(nu.y()) && std::abs(nu.x()) <= std::abs(nu.z())
               ? Vec3::UnitX()
               : (std::abs(nu.y()) <= std::abs(nu.z()) ? Vec3::UnitY() : Vec3::UnitZ());
  e1 = nu.cross(h).normalized();
  e2 = nu.cross(e1);  // unit, and e1 x e2 = nu
}

static Mat2 second_fundamental_form(const Body& body, const Vec3& x, const Vec3& e1,
                                    const Vec3& e2) {
  ImplicitEval e = implicit_eval(body, x);
  double g = e.gradient.norm();
  Mat2 II;
  II(0, 0) = e1.dot(e.hessian * e1) / g;
  II(0, 1) = e1.dot(e.hessian * e2) / g;
  II(1, 0) = II(0, 1);
  II(1, 1) = e2.dot(e.hessian * e2) / g;
  return II;
}

double gauss_curvature(const Body& body, const Vec3& x) {
  Vec3 nu = unit_normal(body, x);
  Vec3 e1, e2;
  tangent_frame(nu, e1, e2);
  return second_fundamental_form(body, x, e1, e2).determinant();
}

SurfacePoint surface_point(const Scene& scene, int body, const Vec3& x) {
  if (body < 0 || body >= static_cast<int>(scene.bodies.size()))
    fail(Err::invalid_argument, "body index out of range");
  SurfacePoint sp;
  sp.body = body;
  sp.x = x;
  sp.nu = unit_normal(scene.bodies[body], x);
  tangent_frame(sp.nu, sp.e1, sp.e2);
  sp.second_form = second_fundamental_form(scene.bodies[body], x, sp.e1, sp.e2);
  return sp;
}

Vec3 surface_project(const Body& body, const Vec3& x) {
  Vec3 p = x - body.center;
  if (body.kind == BodyKind::sphere) {
    double n = p.norm();
    if (n < 1e-300) fail(Err::invalid_argument, "cannot project body center to surface");
    return body.center + p * (body.radii.x() / n);
  }
  Vec3 y = p.cwiseQuotient(body.radii);
  double n = y.norm();
  if (n < 1e-300) fail(Err::invalid_argument, "cannot project body center to surface");
  return body.center + (y / n).cwiseProduct(body.radii);
}

// Stable quadratic roots of A t^2 + 2 B t + C = 0, increasing order.
static bool quadratic_roots(double A, double B, double C, double& t0, double& t1) {
  double disc = B * B - A * C;
  if (disc < 0.0) return false;
  double s = std::sqrt(disc);
  double r0, r1;
  if (B == 0.0) {
    r0 = -s / A;
    r1 = s / A;
  } else {
    double q = -(B + std::copysign(s, B));  // |q| = |B| + s > 0
    r0 = q / A;
    r1 = C / q;
  }
  t0 = std::min(r0, r1);
  t1 = std::max(r0, r1);
  return true;
}

std::optional<Hit> first_hit(const Scene& scene, const Vec3& x, const Vec3& d) {
  if (d.norm() < 0.5) fail(Err::invalid_argument, "direction must be a unit vector");
  int best = -1;
  double best_t = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < scene.bodies.size(); ++i) {
    const Body& b = scene.bodies[i];
    Vec3 p = x - b.center;
    double A, B, C;
    if (b.kind == BodyKind::sphere) {
      A = d.squaredNorm();
      B = d.dot(p);
      C = p.squaredNorm() - b.radii.x() * b.radii.x();
    } else {
      Vec3 dm = d.cwiseQuotient(b.radii);
      Vec3 pm = p.cwiseQuotient(b.radii);
      A = dm.squaredNorm();
      B = dm.dot(pm);
      C = pm.squaredNorm() - 1.0;
    }
    double t0, t1;
    if (!quadratic_roots(A, B, C, t0, t1)) continue;
    double t = t0 > tol::hit_step ? t0 : (t1 > tol::hit_step ? t1 : -1.0);
    if (t > 0.0 && t < best_t) {
      best_t = t;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) return std::nullopt;
  Hit h;
  Vec3 raw = x + best_t * d;
  h.point = surface_point(scene, best, surface_project(scene.bodies[best], raw));
  h.t = best_t;
  h.tangential = std::abs(d.dot(h.point.nu)) < tol::tangency;
  return h;
}

double ball_exit(const Scene& scene, const Vec3& x, const Vec3& d) {
  double A = d.squaredNorm();
  double B = d.dot(x);
  double C = x.squaredNorm() - scene.a * scene.a;
  double t0, t1;
  if (!quadratic_roots(A, B, C, t0, t1)) fail(Err::internal, "ray does not meet the reference ball");
  return t1;  // forward exit; C <= 0 inside the ball makes t1 >= 0
}

bool inside_any_body(const Scene& scene, const Vec3& x, double slack) {
  for (const Body& b : scene.bodies)
    if (implicit_eval(b, x).value < -slack) return true;
  return false;
}

}  // namespace rl
