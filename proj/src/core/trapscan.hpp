#pragma once

#include <string>
#include <utility>

#include "rayfinder.hpp"

namespace rl {

struct EscapeSample {
  PhasePoint z;
  double time = 0.0;
  bool censored = false;
};

struct EscapeField {
  std::vector<EscapeSample> samples;
  double budget = 0.0;
};

// Escape times over a quasi-uniform grid: density^2 positions on the sphere C
// times density^2 inward directions each. Extra phase points (e.g. the
// interior axis condition of a trapping scene) are appended verbatim.
EscapeField escape_scan(const Scene& scene, int density, double budget,
                        const std::vector<PhasePoint>& extra = {});

// Rays extracted while bisecting initial conditions from a free seed toward a
// trapped seed, one per requested sojourn window [B_k, 2 B_k].
struct TrappedApproxSequence {
  std::vector<ReflectingRay> rays;                 // strictly increasing sojourn
  std::vector<std::pair<Vec3, Vec3>> directions;   // (omega_m, theta_m) per ray
  std::vector<double> gaps;                        // successive sojourn differences
  std::vector<int> reflections;                    // m per ray
  std::vector<std::string> report;                 // per-budget notes
};

// Constructive approximation of a trapped ray: bisect the phase-space chord
// between z_trapped (censored at every working budget) and z_free, convert the
// bracketing trajectories into ordinary reflecting rays via the full
// bi-infinite trace (backward trace supplies omega_m), and refine each.
TrappedApproxSequence boundary_bisection(const Scene& scene, const PhasePoint& z_trapped,
                                         const PhasePoint& z_free,
                                         const std::vector<double>& budgets);

// Drop (or repair by direction perturbation) rays whose |det dJ| falls below
// the threshold; recomputes gaps.
TrappedApproxSequence nondegenerate_filter(const Scene& scene, const TrappedApproxSequence& seq,
                                           double threshold = tol::nondegenerate);

struct WeakNdgEstimate {
  double fraction = 0.0;
  double ci_halfwidth = 0.0;  // 95% normal-approximation halfwidth
  int successes = 0;
  int samples = 0;
};

// Fraction of phase points near y_eta whose full trajectory is an ordinary
// reflecting ray (clean escape both ways, at least one transversal
// reflection). Positive fraction witnesses weak non-degeneracy of trapping.
WeakNdgEstimate weak_nondegeneracy_estimate(const Scene& scene, const PhasePoint& y_eta,
                                            double radius, int n_samples, uint64_t seed,
                                            double budget = 1000.0);

}  // namespace rl
