#include "spectrum.hpp"

#include <cmath>

namespace rl {

double singularity_coefficient(const Scene& scene, const CrossSectionRecord& rec,
                               const ReflectingRay& ray) {
  if (ray.points.empty()) fail(Err::invalid_argument, "ray has no points");
  if (std::abs(rec.det) <= tol::nondegenerate)
    fail(Err::degenerate_ray, "vanishing shooting-map determinant");
  Vec3 nu1 = unit_normal(scene.bodies[ray.bodies.front()], ray.points.front());
  Vec3 num = unit_normal(scene.bodies[ray.bodies.back()], ray.points.back());
  double cos_in = nu1.dot(ray.omega);
  double cos_out = num.dot(ray.theta);
  if (std::abs(cos_out) < tol::tangency) fail(Err::grazing_exit, "outgoing direction grazes");
  double inner = std::abs(rec.det * cos_in / cos_out);
  if (inner <= 0.0) fail(Err::degenerate_ray, "degenerate angle factor");
  return std::pow(inner, -0.5) / (2.0 * M_PI);
}

int morse_index(const Scene& scene, const ReflectingRay& ray) {
  auto sp = chain_surface_points(scene, ray.points, ray.bodies);
  Eigen::MatrixXd H = fermat_hessian(ray.omega, ray.theta, sp);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  if (es.info() != Eigen::Success) fail(Err::internal, "eigenvalue solve failed");
  int negatives = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double ev = es.eigenvalues()[i];
    if (std::abs(ev) < 1e-10) fail(Err::singular_hessian, "near-degenerate Fermat Hessian");
    if (ev < 0.0) ++negatives;
  }
  return negatives;
}

std::vector<SpectrumEntry> spectrum_from_rays(const Scene& scene,
                                              const std::vector<ReflectingRay>& rays,
                                              double gap_tol) {
  std::vector<SpectrumEntry> entries;
  entries.reserve(rays.size());
  for (size_t i = 0; i < rays.size(); ++i) {
    const ReflectingRay& ray = rays[i];
    SpectrumEntry e;
    e.ray_id = static_cast<int>(i);
    e.t_singular = -ray.sojourn;
    e.m_gamma = ray.m();
    CrossSectionRecord rec = jacobian_linearized(scene, ray);
    e.det_dJ = rec.det;
    try {
      e.coeff_magnitude = singularity_coefficient(scene, rec, ray);
    } catch (const Error&) {
      e.degenerate = true;
    }
    try {
      e.beta_experimental = morse_index(scene, ray);
    } catch (const Error&) {
      // singular Hessian: leave the index unrecorded
    }
    entries.push_back(e);
  }
  for (auto& e : entries) {
    for (const auto& other : entries)
      if (other.ray_id != e.ray_id)
        e.min_gap = std::min(e.min_gap, std::abs(e.t_singular - other.t_singular));
    e.separated = e.min_gap > gap_tol;
  }
  std::sort(entries.begin(), entries.end(), [](const SpectrumEntry& x, const SpectrumEntry& y) {
    if (x.t_singular != y.t_singular) return x.t_singular < y.t_singular;
    return x.ray_id < y.ray_id;
  });
  return entries;
}

std::vector<SpectrumEntry> length_spectrum(const Scene& scene, const Vec3& omega, const Vec3& theta,
                                           int m_max, int grid_density, double gap_tol,
                                           std::vector<ReflectingRay>* rays_out) {
  FindRaysResult found = find_rays(scene, omega, theta, m_max, grid_density);
  std::vector<SpectrumEntry> entries = spectrum_from_rays(scene, found.rays, gap_tol);
  if (rays_out) *rays_out = std::move(found.rays);
  return entries;
}

}  // namespace rl
