#include "core/waveoracle.hpp"

#include <cmath>

#include "support.hpp"

using namespace rl;

TEST_CASE("spherical bessel functions match the standard library") {
  for (double x : {0.3, 1.0, 7.5, 40.0}) {
    auto j = sph_bessel_j(40, x);
    auto y = sph_bessel_y(40, x);
    REQUIRE(j.size() == 41);
    REQUIRE(y.size() == 41);
    for (int l = 0; l <= 40; ++l) {
      double jref = std::sph_bessel(unsigned(l), x);
      double yref = std::sph_neumann(unsigned(l), x);
      CHECK(std::abs(j[l] - jref) < 1e-12 * std::max(1.0, std::abs(jref)));
      if (std::abs(yref) < 1e280)
        CHECK(std::abs(y[l] - yref) < 1e-11 * std::max(1.0, std::abs(yref)));
    }
  }
  // closed forms at l = 0
  CHECK(sph_bessel_j(0, 2.0)[0] == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-14));
  CHECK(sph_bessel_y(0, 2.0)[0] == doctest::Approx(-std::cos(2.0) / 2.0).epsilon(1e-14));
}

TEST_CASE("bessel y recurrence overflow is reported") {
  CHECK(ts::error_code([&] { sph_bessel_y(400, 1.0); }) == Err::recurrence_overflow);
}

TEST_CASE("legendre polynomials") {
  auto p = legendre_p(10, 0.3);
  REQUIRE(p.size() == 11);
  for (int l = 0; l <= 10; ++l)
    CHECK(p[l] == doctest::Approx(std::legendre(unsigned(l), 0.3)).epsilon(1e-13));
  auto pm = legendre_p(6, -1.0);
  for (int l = 0; l <= 6; ++l) CHECK(pm[l] == doctest::Approx(l % 2 == 0 ? 1.0 : -1.0));
}

TEST_CASE("sphere amplitude approaches the geometric limit") {
  // |a| -> R/2 at high frequency
  CHECK(std::abs(std::abs(sphere_amplitude(1.0, -1.0, 40.0)) - 0.5) < 0.03 * 0.5);
  CHECK(std::abs(std::abs(sphere_amplitude(2.0, -1.0, 40.0)) - 1.0) < 0.03 * 1.0);
  // automatic truncation matches a generous explicit one
  std::complex<double> a_auto = sphere_amplitude(1.0, -0.4, 25.0);
  std::complex<double> a_wide = sphere_amplitude(1.0, -0.4, 25.0, 220);
  CHECK(std::abs(a_auto - a_wide) < 1e-10);
  CHECK(ts::error_code([&] { sphere_amplitude(1.0, -1.0, 0.0); }) == Err::invalid_argument);
  CHECK(ts::error_code([&] { sphere_amplitude(-1.0, -1.0, 10.0); }) == Err::invalid_argument);
}

TEST_CASE("synthesize_kernel is linear and validates input") {
  std::vector<std::complex<double>> zeros(128, 0.0);
  FilteredKernel k = synthesize_kernel(zeros, 20.0, 60.0, WindowKind::gaussian, 0.0);
  CHECK(k.n_lambda == 128);
  CHECK(k.energy_freq == 0.0);
  for (const auto& s : k.s) CHECK(std::abs(s) == 0.0);

  std::vector<std::complex<double>> few(10, 1.0);
  CHECK(ts::error_code([&] { synthesize_kernel(few, 20.0, 60.0, WindowKind::gaussian, 0.0); }) ==
        Err::band_too_narrow);
  std::vector<std::complex<double>> ok(128, 1.0);
  CHECK(ts::error_code([&] { synthesize_kernel(ok, 60.0, 20.0, WindowKind::gaussian, 0.0); }) ==
        Err::invalid_argument);
  CHECK(ts::error_code([&] {
          synthesize_kernel(ok, 20.0, 60.0, WindowKind::gaussian,
                            std::numeric_limits<double>::quiet_NaN());
        }) == Err::invalid_argument);
}

TEST_CASE("filtered kernel peaks at the backscatter sojourn") {
  FilteredKernel k = filtered_kernel(1.0, -1.0, 20.0, 60.0);
  CHECK(k.parseval_rel < 1e-8);  // discrete Parseval holds on the alias period
  double cell = 2.0 * M_PI / (k.lambda_hi - k.lambda_lo);
  auto peaks = locate_peaks(k);
  REQUIRE(!peaks.empty());
  CHECK(std::abs(peaks[0].t - 2.0) < cell);  // t = R |theta - omega| = 2
  // threshold 1.0 keeps only the global maximum
  CHECK(locate_peaks(k, 1.0).size() == 1);
}

TEST_CASE("filtered kernel peak location is stable under band and window changes") {
  double t_ref = 0.0;
  for (auto [lo, hi] : {std::pair{20.0, 60.0}, std::pair{30.0, 90.0}}) {
    for (WindowKind w : {WindowKind::gaussian, WindowKind::hann}) {
      FilteredKernel k = filtered_kernel(1.0, -0.5, lo, hi, w);
      auto peaks = locate_peaks(k);
      REQUIRE(!peaks.empty());
      double cell = 2.0 * M_PI / (hi - lo);
      double chord = std::sqrt(3.0);  // |theta - omega| at cos gamma = -1/2
      CHECK(std::abs(peaks[0].t - chord) < cell);
      if (t_ref == 0.0) t_ref = peaks[0].t;
      CHECK(std::abs(peaks[0].t - t_ref) < cell);
    }
  }
}

TEST_CASE("filtered kernel validation") {
  CHECK(ts::error_code([&] { filtered_kernel(0.0, -1.0, 20.0, 60.0); }) == Err::invalid_argument);
  CHECK(ts::error_code([&] { filtered_kernel(1.0, -1.0, 60.0, 20.0); }) == Err::invalid_argument);
}

TEST_CASE("validate_sphere end to end") {
  SphereValidation v = validate_sphere(1.0, Vec3(0, 0, -1), Vec3(0, 0, 1), 20.0, 60.0);
  CHECK(v.predicted_t == doctest::Approx(2.0));
  double cell = 2.0 * M_PI / 40.0;
  CHECK(v.peak_error < cell);
  CHECK(v.spurious_peaks == 0);
  CHECK(v.peak_magnitude > 0.0);

  Vec3 om = Vec3(1, 1, 0).normalized();
  Vec3 th = Vec3(1, -1, 0.5).normalized();
  SphereValidation v2 = validate_sphere(2.0, om, th, 30.0, 90.0, WindowKind::hann);
  CHECK(v2.predicted_t == doctest::Approx(2.0 * (th - om).norm()));
  CHECK(v2.peak_error < 2.0 * M_PI / 60.0);
  CHECK(v2.spurious_peaks == 0);

  CHECK(ts::error_code([&] {
          validate_sphere(1.0, Vec3(0, 0, 1), Vec3(0, 0, 1), 20.0, 60.0);
        }) == Err::theta_equals_omega);
  CHECK(ts::error_code([&] {
          validate_sphere(1.0, Vec3(0, 0, 2), Vec3(0, 0, 1), 20.0, 60.0);
        }) == Err::invalid_argument);
}

TEST_CASE("cross_check ties peak magnitudes to coefficient ratios") {
  PairCheck pc = cross_check(1.0, 2.0, Vec3(0, 0, -1), Vec3(0, 0, 1), 20.0, 60.0);
  CHECK(pc.predicted_ratio == doctest::Approx(0.5));
  CHECK(pc.ratio_error < 0.1);
  CHECK(pc.magnitude_ratio == doctest::Approx(pc.first.peak_magnitude / pc.second.peak_magnitude));
}
