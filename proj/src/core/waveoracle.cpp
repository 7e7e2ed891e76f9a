#include "waveoracle.hpp"

#include <algorithm>
#include <cmath>

namespace rl {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};

// Double factorial (2l+1)!! as a double; overflows to inf harmlessly for the
// small-argument series (terms underflow to 0 first).
double odd_double_factorial(int l) {
  double v = 1.0;
  for (int k = 3; k <= 2 * l + 1; k += 2) v *= k;
  return v;
}
}  // namespace

std::vector<double> sph_bessel_j(int l_max, double x) {
  if (l_max < 0) fail(Err::invalid_argument, "l_max must be >= 0");
  if (!(x >= 0.0)) fail(Err::invalid_argument, "argument must be nonnegative");
  std::vector<double> j(static_cast<size_t>(l_max) + 1, 0.0);

  if (x < 1e-4) {
    // Series j_l = x^l / (2l+1)!! (1 - x^2/(2(2l+3))); underflow is fine.
    double xl = 1.0;
    for (int l = 0; l <= l_max; ++l) {
      j[l] = xl / odd_double_factorial(l) * (1.0 - x * x / (2.0 * (2.0 * l + 3.0)));
      xl *= x;
    }
    return j;
  }

  // Downward recurrence from a start order high enough that the result at
  // l_max has converged, normalized against j_0 = sin(x)/x.
  int l_start = l_max + 30 + static_cast<int>(std::sqrt(30.0 * l_max));
  double jp1 = 0.0;
  double jc = 1e-30;
  for (int l = l_start; l >= 1; --l) {
    double jm1 = (2.0 * l + 1.0) / x * jc - jp1;
    if (std::abs(jm1) > 1e280) {
      jm1 *= 1e-280;
      jc *= 1e-280;
      for (auto& v : j) v *= 1e-280;
    }
    jp1 = jc;
    jc = jm1;
    if (l - 1 <= l_max) j[l - 1] = jc;
  }
  double j0_true = std::sin(x) / x;
  if (jc == 0.0) fail(Err::recurrence_overflow, "downward recurrence lost all precision");
  double scale = j0_true / jc;
  for (auto& v : j) v *= scale;
  return j;
}

std::vector<double> sph_bessel_y(int l_max, double x) {
  if (l_max < 0) fail(Err::invalid_argument, "l_max must be >= 0");
  if (!(x > 0.0)) fail(Err::invalid_argument, "argument must be positive");
  std::vector<double> y(static_cast<size_t>(l_max) + 1, 0.0);
  y[0] = -std::cos(x) / x;
  if (l_max >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (int l = 1; l + 1 <= l_max; ++l) {
    y[l + 1] = (2.0 * l + 1.0) / x * y[l] - y[l - 1];
    if (std::abs(y[l + 1]) > 1e290)
      fail(Err::recurrence_overflow, "y recurrence overflow; order too high for argument");
  }
  return y;
}

std::vector<double> legendre_p(int l_max, double mu) {
  if (l_max < 0) fail(Err::invalid_argument, "l_max must be >= 0");
  if (std::abs(mu) > 1.0 + 1e-12) fail(Err::invalid_argument, "|mu| must be <= 1");
  mu = std::clamp(mu, -1.0, 1.0);
  std::vector<double> p(static_cast<size_t>(l_max) + 1, 0.0);
  p[0] = 1.0;
  if (l_max >= 1) p[1] = mu;
  for (int l = 1; l + 1 <= l_max; ++l)
    p[l + 1] = ((2.0 * l + 1.0) * mu * p[l] - l * p[l - 1]) / (l + 1.0);
  return p;
}

std::complex<double> sphere_amplitude(double R, double cos_gamma, double lambda, int l_max) {
  if (!(R > 0.0)) fail(Err::invalid_argument, "radius must be positive");
  if (!(lambda > 0.0)) fail(Err::invalid_argument, "frequency must be positive");
  double x = lambda * R;
  if (l_max < 0) l_max = static_cast<int>(std::ceil(x)) + 20 +
                         static_cast<int>(std::ceil(4.0 * std::cbrt(std::max(1.0, x))));

  auto j = sph_bessel_j(l_max, x);
  auto y = sph_bessel_y(l_max, x);
  auto p = legendre_p(l_max, cos_gamma);

  std::complex<double> sum = 0.0;
  double tail = 0.0;
  for (int l = 0; l <= l_max; ++l) {
    std::complex<double> h(j[l], y[l]);  // outgoing Hankel
    std::complex<double> ratio = j[l] / h;
    sum += (2.0 * l + 1.0) * ratio * p[l];
    if (l >= l_max - 2) tail = std::max(tail, (2.0 * l + 1.0) * std::abs(ratio));
  }
  if (tail > 1e-13 * std::max(1.0, std::abs(sum)))
    fail(Err::truncation_not_converged, "partial wave tail is not negligible at l_max");
  return std::conj(kI / lambda * sum);
}

FilteredKernel synthesize_kernel(const std::vector<std::complex<double>>& amplitude,
                                 double lambda_lo, double lambda_hi, WindowKind window,
                                 double t_center) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
    fail(Err::invalid_argument, "band must satisfy 0 < lambda_lo < lambda_hi");
  int n_lambda = static_cast<int>(amplitude.size());
  if (n_lambda < 64) fail(Err::band_too_narrow, "need at least 64 band samples");
  if (!std::isfinite(t_center)) fail(Err::invalid_argument, "t_center must be finite");
  double band = lambda_hi - lambda_lo;
  double dlam = band / (n_lambda - 1);
  double period = 2.0 * M_PI / dlam;  // alias period of the lambda grid in t

  double cell = 2.0 * M_PI / band;
  int n_t = static_cast<int>(std::ceil(period / (cell / 8.0)));
  double dt = period / n_t;
  double t0 = t_center - 0.5 * period;

  // Frequency-side samples g(lambda_k).
  double lc = 0.5 * (lambda_lo + lambda_hi);
  double sigma = band / 6.0;
  std::vector<std::complex<double>> g(n_lambda);
  double efreq = 0.0;
  for (int k = 0; k < n_lambda; ++k) {
    double lam = lambda_lo + k * dlam;
    double w;
    if (window == WindowKind::gaussian) {
      double zrel = (lam - lc) / sigma;
      w = std::exp(-0.5 * zrel * zrel);
    } else {
      double frac = (lam - lambda_lo) / band;
      w = 0.5 - 0.5 * std::cos(2.0 * M_PI * frac);
    }
    g[k] = kI * lam / (2.0 * M_PI) * std::conj(amplitude[k]) * w;
    efreq += std::norm(g[k]);
  }
  efreq *= dlam / (2.0 * M_PI);

  FilteredKernel out;
  out.dt = dt;
  out.dlambda = dlam;
  out.lambda_lo = lambda_lo;
  out.lambda_hi = lambda_hi;
  out.n_lambda = n_lambda;
  out.t.resize(n_t);
  out.s.resize(n_t);
  double etime = 0.0;
  for (int jt = 0; jt < n_t; ++jt) {
    double t = t0 + jt * dt;
    std::complex<double> acc = 0.0;
    for (int k = 0; k < n_lambda; ++k) {
      double lam = lambda_lo + k * dlam;
      acc += g[k] * std::polar(1.0, t * lam);
    }
    acc *= dlam / (2.0 * M_PI);
    out.t[jt] = t;
    out.s[jt] = acc;
    etime += std::norm(acc);
  }
  etime *= dt;
  out.energy_time = etime;
  out.energy_freq = efreq;
  out.parseval_rel = std::abs(etime - efreq) / std::max(efreq, 1e-300);
  return out;
}

FilteredKernel filtered_kernel(double R, double cos_gamma, double lambda_lo, double lambda_hi,
                               WindowKind window, double t_center) {
  if (!(R > 0.0)) fail(Err::invalid_argument, "radius must be positive");
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
    fail(Err::invalid_argument, "band must satisfy 0 < lambda_lo < lambda_hi");
  double band = lambda_hi - lambda_lo;
  double chord = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::clamp(cos_gamma, -1.0, 1.0)));
  double t_pred = R * chord;
  if (std::isnan(t_center)) t_center = t_pred;

  // Span wide enough that the reflected peak, its window sidelobes, and the
  // slow diffraction tail all live inside one alias period.
  double halfspan =
      std::max(2.0 * std::abs(t_center), std::abs(t_center) + (M_PI + 2.0) * R + 60.0 / band + 4.0);

  int n_lambda =
      std::max(64, static_cast<int>(std::ceil(2.0 * halfspan * band / (2.0 * M_PI))) + 1);
  if (n_lambda > 300000) fail(Err::band_too_narrow, "band cannot support the needed resolution");
  double dlam = band / (n_lambda - 1);
  std::vector<std::complex<double>> amplitude(n_lambda);
  for (int k = 0; k < n_lambda; ++k)
    amplitude[k] = sphere_amplitude(R, cos_gamma, lambda_lo + k * dlam);
  return synthesize_kernel(amplitude, lambda_lo, lambda_hi, window, t_center);
}

std::vector<Peak> locate_peaks(const FilteredKernel& kernel, double threshold_ratio) {
  std::vector<Peak> peaks;
  const auto& s = kernel.s;
  int n = static_cast<int>(s.size());
  if (n < 3) return peaks;
  double top = 0.0;
  for (const auto& v : s) top = std::max(top, std::abs(v));
  double cut = threshold_ratio * top;
  for (int i = 1; i + 1 < n; ++i) {
    double m = std::abs(s[i]);
    double lo = std::abs(s[i - 1]);
    double hi = std::abs(s[i + 1]);
    if (m < cut || m < lo || m <= hi) continue;
    double denom = lo - 2.0 * m + hi;
    double shift = (std::abs(denom) > 1e-300) ? 0.5 * (lo - hi) / denom : 0.0;
    shift = std::clamp(shift, -0.5, 0.5);
    Peak p;
    p.index = i;
    p.t = kernel.t[i] + shift * kernel.dt;
    p.magnitude = m - 0.25 * (lo - hi) * shift;
    peaks.push_back(p);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.magnitude > b.magnitude; });
  return peaks;
}

SphereValidation validate_sphere(double R, const Vec3& omega, const Vec3& theta, double lambda_lo,
                                 double lambda_hi, WindowKind window) {
  if (std::abs(omega.squaredNorm() - 1.0) > 1e-9 || std::abs(theta.squaredNorm() - 1.0) > 1e-9)
    fail(Err::invalid_argument, "directions must be unit vectors");
  if ((theta - omega).norm() < 1e-12)
    fail(Err::theta_equals_omega, "outgoing direction equals incoming");
  double cg = std::clamp(omega.dot(theta), -1.0, 1.0);

  SphereValidation v;
  v.kernel = filtered_kernel(R, cg, lambda_lo, lambda_hi, window);
  v.predicted_t = R * (theta - omega).norm();
  auto peaks = locate_peaks(v.kernel, 0.05);
  if (peaks.empty()) fail(Err::validation, "no peak found in the filtered kernel");
  v.measured_t = peaks.front().t;
  v.peak_magnitude = peaks.front().magnitude;
  v.peak_error = std::abs(v.measured_t - v.predicted_t);
  // Spurious = above 30% of the main peak yet more than one resolution cell
  // away from the predicted singular time.
  double cell = 2.0 * M_PI / (lambda_hi - lambda_lo);
  for (const Peak& p : peaks) {
    if (p.magnitude >= 0.3 * v.peak_magnitude && std::abs(p.t - v.predicted_t) > cell)
      ++v.spurious_peaks;
  }
  return v;
}

PairCheck cross_check(double R1, double R2, const Vec3& omega, const Vec3& theta, double lambda_lo,
                      double lambda_hi, WindowKind window) {
  PairCheck pc;
  pc.first = validate_sphere(R1, omega, theta, lambda_lo, lambda_hi, window);
  pc.second = validate_sphere(R2, omega, theta, lambda_lo, lambda_hi, window);
  pc.magnitude_ratio = pc.first.peak_magnitude / pc.second.peak_magnitude;
  pc.predicted_ratio = R1 / R2;
  pc.ratio_error = std::abs(pc.magnitude_ratio - pc.predicted_ratio) / pc.predicted_ratio;
  return pc;
}

}  // namespace rl
