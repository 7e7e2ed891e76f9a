#pragma once

#include <optional>

#include "crosssection.hpp"

namespace rl {

// One singularity of the scattering kernel: located at t = -T_gamma with the
// leading coefficient magnitude from the stationary-phase expansion.
struct SpectrumEntry {
  int ray_id = -1;
  double t_singular = 0.0;  // -sojourn
  int m_gamma = 0;
  double det_dJ = 0.0;
  std::optional<double> coeff_magnitude;  // empty when the ray is degenerate
  std::optional<int> beta_experimental;   // Morse index of the Fermat Hessian (recorded only)
  bool degenerate = false;
  bool separated = false;  // isolated from every other entry by more than gap_tol
  double min_gap = std::numeric_limits<double>::infinity();
};

// |leading coefficient| of the singularity at -T_gamma:
//   (2 pi)^{-(n-1)/2} |det dJ * <nu(q1),omega> / <nu(qm),theta>|^{-1/2}, n = 3.
double singularity_coefficient(const Scene& scene, const CrossSectionRecord& rec,
                               const ReflectingRay& ray);

// Number of negative eigenvalues of the constrained Fermat Hessian.
int morse_index(const Scene& scene, const ReflectingRay& ray);

// Entries for an explicit ray list (each ray may carry its own directions),
// sorted by t_singular ascending; ray_id indexes the input vector.
std::vector<SpectrumEntry> spectrum_from_rays(const Scene& scene,
                                              const std::vector<ReflectingRay>& rays,
                                              double gap_tol = tol::min_gap);

// Rays found for (omega,theta) turned into spectrum entries, sorted by
// t_singular ascending (deepest singularity first).
std::vector<SpectrumEntry> length_spectrum(const Scene& scene, const Vec3& omega, const Vec3& theta,
                                           int m_max, int grid_density = 24,
                                           double gap_tol = tol::min_gap,
                                           std::vector<ReflectingRay>* rays_out = nullptr);

}  // namespace rl
