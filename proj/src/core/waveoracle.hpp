#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "common.hpp"

namespace rl {

// Spherical Bessel arrays j_l(x), y_l(x) for l = 0..l_max. j uses downward
// recurrence with renormalization against sin(x)/x, y upward recurrence;
// overflow raises Err::recurrence_overflow.
std::vector<double> sph_bessel_j(int l_max, double x);
std::vector<double> sph_bessel_y(int l_max, double x);

// Legendre polynomials P_l(mu) for l = 0..l_max, |mu| <= 1.
std::vector<double> legendre_p(int l_max, double mu);

// Exact scattering amplitude of the sphere of radius R (Dirichlet), partial
// wave sum. gamma is the angle between incoming and outgoing directions. The
// returned value follows the convention whose high-frequency limit has
// |a| -> R/2; pass l_max = -1 for an automatic truncation (with a built-in
// tail self-test that throws Err::truncation_not_converged when violated).
std::complex<double> sphere_amplitude(double R, double cos_gamma, double lambda, int l_max = -1);

enum class WindowKind { gaussian, hann };

// Band-filtered time-domain kernel
//   s(t) = (2 pi)^-1 sum_k e^{i t lambda_k} (i lambda_k / 2 pi)
//            conj(a(lambda_k)) w(lambda_k) dlambda,
// sampled on a uniform t-grid covering exactly one alias period of the
// lambda-grid, so the discrete Parseval identity between energy_time and
// energy_freq holds to rounding. Its envelope |s| peaks at the sojourn-time
// singularities inside the band's reach; for the sphere that is
// t = R |theta - omega|.
struct FilteredKernel {
  std::vector<double> t;
  std::vector<std::complex<double>> s;
  double dt = 0.0;
  double dlambda = 0.0;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  int n_lambda = 0;
  double energy_time = 0.0;   // sum |s|^2 dt
  double energy_freq = 0.0;   // (2 pi)^-1 sum |g|^2 dlambda
  double parseval_rel = 0.0;  // |energy_time - energy_freq| / energy_freq
};

// Synthesis core over explicit amplitude samples on the uniform band grid
// (amplitude.size() fixes the grid; at least 64 points). The t-grid covers
// one alias period 2 pi / dlambda centered at t_center, so the caller
// controls wraparound margin through the sample count. Linear in the input:
// zero amplitudes give an identically zero kernel.
FilteredKernel synthesize_kernel(const std::vector<std::complex<double>>& amplitude,
                                 double lambda_lo, double lambda_hi,
                                 WindowKind window, double t_center);

// t_center defaults (when NaN) to the predicted singular time R|theta-omega|
// encoded by cos_gamma; the t-span is chosen wide enough to keep wraparound
// of the decaying tails negligible. Throws Err::band_too_narrow when the band
// cannot support the required lambda resolution.
FilteredKernel filtered_kernel(double R, double cos_gamma, double lambda_lo, double lambda_hi,
                               WindowKind window = WindowKind::gaussian,
                               double t_center = std::numeric_limits<double>::quiet_NaN());

struct Peak {
  double t = 0.0;
  double magnitude = 0.0;
  int index = 0;
};

// Local maxima of |s| above threshold_ratio * max, with quadratic refinement.
std::vector<Peak> locate_peaks(const FilteredKernel& kernel, double threshold_ratio = 0.1);

struct SphereValidation {
  double predicted_t = 0.0;
  double measured_t = 0.0;
  double peak_error = 0.0;     // |measured - predicted|
  double peak_magnitude = 0.0;
  int spurious_peaks = 0;  // peaks >= 30% of main farther than one cell from predicted
  FilteredKernel kernel;
};

// End-to-end check that the wave-side kernel peaks at the ray-side sojourn
// time for a sphere of radius R.
SphereValidation validate_sphere(double R, const Vec3& omega, const Vec3& theta, double lambda_lo,
                                 double lambda_hi, WindowKind window = WindowKind::gaussian);

struct PairCheck {
  SphereValidation first, second;
  double magnitude_ratio = 0.0;  // measured peak magnitude ratio (first/second)
  double predicted_ratio = 0.0;  // R1/R2, the singularity-coefficient ratio
  double ratio_error = 0.0;      // relative
};

// Two spheres, same band and directions: measured peak magnitudes must scale
// like the predicted leading singularity coefficients.
PairCheck cross_check(double R1, double R2, const Vec3& omega, const Vec3& theta, double lambda_lo,
                      double lambda_hi, WindowKind window = WindowKind::gaussian);

}  // namespace rl
