#include "crosssection.hpp"

#include <cmath>

namespace rl {

Vec3 shooting_map(const Scene& scene, const Vec3& omega, const Vec3& u, int m_expected) {
  if (m_expected < 1) fail(Err::invalid_argument, "m_expected must be >= 1");
  if (std::abs(u.dot(omega) + scene.a) > 1e-6 * std::max(1.0, scene.a))
    fail(Err::invalid_argument, "launch point is not on Z_omega");
  Trajectory traj = trace(scene, PhasePoint{u, omega}, m_expected);
  if (traj.status == TraceStatus::tangency) fail(Err::tangency_encountered, "grazing trajectory");
  if (traj.status != TraceStatus::escaped || static_cast<int>(traj.hits.size()) != m_expected)
    fail(Err::wrong_reflection_count, "trajectory does not make the expected reflections");
  return traj.exit->xi;
}

static void frames(const Vec3& omega, const Vec3& theta, Vec3& e1, Vec3& e2, Vec3& f1, Vec3& f2) {
  tangent_frame(omega, e1, e2);
  tangent_frame(theta, f1, f2);
}

CrossSectionRecord jacobian_fd(const Scene& scene, const ReflectingRay& ray, double h_rel) {
  if (ray.points.empty()) fail(Err::invalid_argument, "ray has no points");
  Vec3 e1, e2, f1, f2;
  frames(ray.omega, ray.theta, e1, e2, f1, f2);
  Vec3 u0 = project_to_zplane(scene, ray.omega, ray.points.front());
  const int m = ray.m();
  const Vec3 dir[2] = {e1, e2};

  auto stencil = [&](double h) {
    Mat2 dJ;
    for (int a = 0; a < 2; ++a) {
      Vec3 tp = shooting_map(scene, ray.omega, u0 + h * dir[a], m);
      Vec3 tm = shooting_map(scene, ray.omega, u0 - h * dir[a], m);
      Vec3 dtheta = (tp - tm) / (2.0 * h);
      dJ(0, a) = f1.dot(dtheta);
      dJ(1, a) = f2.dot(dtheta);
    }
    return dJ;
  };

  double h = h_rel * scene.a;
  Mat2 dJ;
  for (int attempt = 0;; ++attempt) {
    try {
      dJ = stencil(h);
      break;
    } catch (const Error& e) {
      if (attempt >= 40 ||
          (e.code() != Err::wrong_reflection_count && e.code() != Err::tangency_encountered))
        throw;
      h /= 3.0;  // probe fell off the ray's reflection pattern; tighten
    }
  }

  // Unstable chains amplify the probe offset geometrically, so a step that
  // merely keeps the reflection pattern still carries an O(1) truncation
  // error. Shrink until the probe deflection is ~1e-3 radians (small enough
  // for curvature, large enough to stay above direction roundoff).
  for (int attempt = 0; attempt < 24; ++attempt) {
    double amp = dJ.cwiseAbs().maxCoeff();
    double h_want = 1e-3 / std::max(amp, 1e-9);
    if (h <= h_want || h <= 1e-9 * scene.a) break;
    h = std::max({h_want, h / 9.0, 1e-9 * scene.a});
    dJ = stencil(h);
  }

  // The targeted step still leaves ~1e-5 relative curvature error, so
  // extrapolate the h and h/2 stencils; the halved step keeps the same
  // reflection pattern, but fall back to the plain stencil if it does not.
  try {
    dJ = (4.0 * stencil(h / 2.0) - dJ) / 3.0;
  } catch (const Error&) {
  }

  CrossSectionRecord rec;
  Vec3 plane_origin = -scene.a * ray.omega;
  rec.u = Vec2((u0 - plane_origin).dot(e1), (u0 - plane_origin).dot(e2));
  rec.dJ = dJ;
  rec.det = dJ.determinant();
  rec.method = JacobianMethod::finite_difference;
  return rec;
}

CrossSectionRecord jacobian_linearized(const Scene& scene, const ReflectingRay& ray) {
  if (ray.points.empty()) fail(Err::invalid_argument, "ray has no points");
  Vec3 e1, e2, f1, f2;
  frames(ray.omega, ray.theta, e1, e2, f1, f2);
  Vec3 p0 = project_to_zplane(scene, ray.omega, ray.points.front());

  Mat2 dJ;
  int col_exp[2] = {0, 0};  // power-of-two scale factored out of each column
  const Vec3 dir[2] = {e1, e2};
  for (int a = 0; a < 2; ++a) {
    Vec3 p = p0;
    Vec3 d = ray.omega;
    Vec3 dx = dir[a];
    Vec3 dd = Vec3::Zero();
    for (int i = 0; i < ray.m(); ++i) {
      const Body& body = scene.bodies[ray.bodies[i]];
      const Vec3& q = ray.points[i];
      double t = (q - p).norm();
      ImplicitEval ie = implicit_eval(body, q);
      double gn = ie.gradient.norm();
      Vec3 nu = ie.gradient / gn;
      double denom = ie.gradient.dot(d);
      if (std::abs(denom) < tol::tangency * gn) fail(Err::singular_hit, "grazing linearization");
      double dt = -ie.gradient.dot(dx + t * dd) / denom;
      Vec3 dxh = dx + t * dd + dt * d;
      Vec3 dnu = (Mat3::Identity() - nu * nu.transpose()) * (ie.hessian * dxh) / gn;
      Vec3 ddr = dd - 2.0 * (dd.dot(nu) + d.dot(dnu)) * nu - 2.0 * d.dot(nu) * dnu;
      p = q;
      d = reflect(d, nu);
      dx = dxh;
      dd = ddr;
      // Long unstable chains amplify variations geometrically; renormalize so
      // the transport itself never overflows (the determinant may still
      // saturate to inf once rescaled, which is the honest answer).
      double peak = std::max(dx.cwiseAbs().maxCoeff(), dd.cwiseAbs().maxCoeff());
      if (peak > 0x1p500) {
        dx *= 0x1p-500;
        dd *= 0x1p-500;
        col_exp[a] += 500;
      }
    }
    dJ(0, a) = f1.dot(dd);
    dJ(1, a) = f2.dot(dd);
  }
  CrossSectionRecord rec;
  Vec3 plane_origin = -scene.a * ray.omega;
  rec.u = Vec2((p0 - plane_origin).dot(e1), (p0 - plane_origin).dot(e2));
  rec.det = std::ldexp(dJ.determinant(), col_exp[0] + col_exp[1]);
  for (int a = 0; a < 2; ++a)
    for (int r = 0; r < 2; ++r) rec.dJ(r, a) = std::ldexp(dJ(r, a), col_exp[a]);
  rec.method = JacobianMethod::linearized;
  return rec;
}

double majda_det(const Scene& scene, const ReflectingRay& ray) {
  if (ray.m() != 1)
    fail(Err::not_applicable, "convex-case prediction requires a single reflection");
  double K = gauss_curvature(scene.bodies[ray.bodies.front()], ray.points.front());
  return 4.0 * K;  // |theta-omega|^(n-3) = 1 in dimension three
}

}  // namespace rl
