#pragma once

#include <optional>
#include <vector>

#include "geometry.hpp"

namespace rl {

// State of the exterior billiard flow: position + unit direction. Valid when
// x lies outside every body (a surface point with outward-moving direction is
// also fine for launches).
struct PhasePoint {
  Vec3 x = Vec3::Zero();
  Vec3 xi = Vec3::UnitX();
};

enum class TraceStatus { escaped, budget_exhausted, tangency };

struct Trajectory {
  PhasePoint start;
  std::vector<SurfacePoint> hits;
  std::vector<Vec3> directions;  // directions.size() == hits.size()+1; [i] is the
                                 // direction entering hit i, back() the final one
  std::optional<PhasePoint> exit;  // state on the sphere C when escaped
  double path_length = 0.0;        // start -> hits -> C exit (while it lasts)
  TraceStatus status = TraceStatus::escaped;
};

// Specular reflection of direction d at unit normal nu.
inline Vec3 reflect(const Vec3& d, const Vec3& nu) { return d - 2.0 * d.dot(nu) * nu; }

// Follow the trajectory through at most max_reflections transversal
// reflections. Stops early on escape from the ball of radius scene.a or on a
// tangential hit (status tangency; the grazing point is recorded).
Trajectory trace(const Scene& scene, const PhasePoint& z, int max_reflections);

struct EscapeResult {
  double time = 0.0;  // path length to first exit from U0, or the budget
  bool censored = false;
  bool tangency = false;
  int reflections = 0;
};

// Escape time T(z): path length until the trajectory leaves the ball of
// radius scene.a, censored at the given length budget.
EscapeResult escape_time(const Scene& scene, const PhasePoint& z, double budget);

}  // namespace rl
