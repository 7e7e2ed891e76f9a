#include "billiard.hpp"

#include <cmath>

namespace rl {

static void check_phase_point(const Scene& scene, const PhasePoint& z) {
  if (std::abs(z.xi.squaredNorm() - 1.0) > 1e-9)
    fail(Err::invalid_argument, "phase point direction must be a unit vector");
  if (inside_any_body(scene, z.x, tol::surface))
    fail(Err::invalid_argument, "phase point lies inside a body");
}

Trajectory trace(const Scene& scene, const PhasePoint& z, int max_reflections) {
  check_phase_point(scene, z);
  if (max_reflections < 0) fail(Err::invalid_argument, "max_reflections must be >= 0");
  Trajectory traj;
  traj.start = z;
  Vec3 x = z.x;
  Vec3 d = z.xi;
  traj.directions.push_back(d);
  for (int k = 0; k <= max_reflections; ++k) {
    auto hit = first_hit(scene, x, d);
    if (!hit) {
      // On/inside the ball, or outside but aimed back through it (launches on
      // C carry roundoff either way): advance to the forward exit from C.
      double Cq = x.squaredNorm() - scene.a * scene.a;
      double Bq = d.dot(x);
      double te = (Cq <= 0.0 || (Bq < 0.0 && Bq * Bq >= Cq)) ? ball_exit(scene, x, d) : 0.0;
      traj.path_length += te;
      traj.exit = PhasePoint{x + te * d, d};
      traj.status = TraceStatus::escaped;
      return traj;
    }
    if (k == max_reflections) {
      traj.status = TraceStatus::budget_exhausted;
      return traj;
    }
    traj.path_length += hit->t;
    traj.hits.push_back(hit->point);
    if (hit->tangential) {
      traj.status = TraceStatus::tangency;
      return traj;
    }
    x = hit->point.x;
    d = reflect(d, hit->point.nu);
    traj.directions.push_back(d);
  }
  return traj;  // unreachable
}

EscapeResult escape_time(const Scene& scene, const PhasePoint& z, double budget) {
  check_phase_point(scene, z);
  if (!(budget > 0.0)) fail(Err::invalid_argument, "budget must be positive");
  if (z.x.squaredNorm() > scene.a * scene.a * (1.0 + 1e-12) + 1e-12)
    fail(Err::invalid_argument, "escape_time start must lie inside the reference ball");
  EscapeResult out;
  Vec3 x = z.x;
  Vec3 d = z.xi;
  double length = 0.0;
  while (true) {
    auto hit = first_hit(scene, x, d);
    double seg = hit ? hit->t : ball_exit(scene, x, d);
    if (length + seg > budget) {
      out.time = budget;
      out.censored = true;
      return out;
    }
    length += seg;
    if (!hit) break;
    if (hit->tangential) {
      out.tangency = true;
      break;
    }
    ++out.reflections;
    x = hit->point.x;
    d = reflect(d, hit->point.nu);
  }
  out.time = length;
  return out;
}

}  // namespace rl
