#pragma once

#include <vector>

#include "billiard.hpp"

namespace rl {

// Ordinary reflecting (omega,theta)-ray: enters with direction omega, reflects
// transversally at points[0..m-1] (points[i] on bodies[i]), leaves with
// direction theta. sojourn is the critical value of the Fermat functional
//   F = <x_1,omega> + sum |x_i - x_{i+1}| - <x_m,theta>.
struct ReflectingRay {
  Vec3 omega = Vec3::UnitZ();
  Vec3 theta = -Vec3::UnitZ();
  std::vector<Vec3> points;
  std::vector<int> bodies;
  double sojourn = 0.0;
  double residual = 0.0;  // max specular-law defect over the reflections

  int m() const { return static_cast<int>(points.size()); }
};

double fermat_value(const Vec3& omega, const Vec3& theta, const std::vector<Vec3>& points);

// Chain directions d_0 = omega, d_i = unit(x_{i+1}-x_i), d_m = theta.
std::vector<Vec3> chain_directions(const Vec3& omega, const Vec3& theta,
                                   const std::vector<Vec3>& points);

// Per-point surface data for a candidate reflection chain.
std::vector<SurfacePoint> chain_surface_points(const Scene& scene, const std::vector<Vec3>& points,
                                               const std::vector<int>& bodies);

// Tangential gradient of F, stacked as (e1,e2)-components per point (size 2m).
Eigen::VectorXd fermat_gradient(const Vec3& omega, const Vec3& theta,
                                const std::vector<SurfacePoint>& sp);

// Constrained Hessian of F in the same frames (2m x 2m), including the
// surface-curvature correction -<grad_i F, nu_i> II_i on the diagonal blocks.
Eigen::MatrixXd fermat_hessian(const Vec3& omega, const Vec3& theta,
                               const std::vector<SurfacePoint>& sp);

// Damped Newton refinement of a reflection chain to a critical point of F,
// followed by validation (transversality, residual, unobstructed segments).
ReflectingRay refine_ray(const Scene& scene, const Vec3& omega, const Vec3& theta,
                         const std::vector<Vec3>& initial_points, const std::vector<int>& bodies,
                         double grad_tol = tol::newton_grad);

struct FindRaysResult {
  std::vector<ReflectingRay> rays;  // sorted by sojourn
  int seeds_tried = 0;
  int seeds_converged = 0;
};

// All ordinary reflecting (omega,theta)-rays with at most m_max reflections,
// found from a shooting grid on Z_omega plus combinatorial body-word seeds.
FindRaysResult find_rays(const Scene& scene, const Vec3& omega, const Vec3& theta, int m_max,
                         int grid_density);

// Sojourn via tangent-plane feet: |pi_omega(x_1)-x_1| + chain + |x_m -
// pi_{-theta}(x_m)| - 2a. Equals fermat_value for every a >= rho.
double sojourn_hyperplane(const Scene& scene, const ReflectingRay& ray);

// Foot of x on the hyperplane Z_omega tangent to U0 with inward normal omega.
Vec3 project_to_zplane(const Scene& scene, const Vec3& omega, const Vec3& x);

}  // namespace rl
