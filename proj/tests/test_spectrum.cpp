#include "core/spectrum.hpp"

#include "support.hpp"

using namespace rl;

namespace {

Scene scaled_scene(const Scene& s, double factor) {
  Scene out = s;
  out.rho *= factor;
  out.a *= factor;
  for (Body& b : out.bodies) {
    b.center *= factor;
    b.radii *= factor;
  }
  return out;
}

}  // namespace

TEST_CASE("singularity coefficient of the sphere backscatter ray") {
  Scene sph = ts::sphere_scene();
  ReflectingRay ray = refine_ray(sph, Vec3(0, 0, -1), Vec3(0, 0, 1), {Vec3(0, 0, 1)}, {0});
  CrossSectionRecord rec = jacobian_linearized(sph, ray);
  // (2 pi)^-1 |det|^-1/2 = (2 pi)^-1 / 2 = 1/(4 pi)
  CHECK(singularity_coefficient(sph, rec, ray) ==
        doctest::Approx(1.0 / (4.0 * M_PI)).epsilon(1e-12));

  Scene big = scaled_scene(sph, 2.0);
  ReflectingRay ray2 = refine_ray(big, Vec3(0, 0, -1), Vec3(0, 0, 1), {Vec3(0, 0, 2)}, {0});
  CrossSectionRecord rec2 = jacobian_linearized(big, ray2);
  CHECK(singularity_coefficient(big, rec2, ray2) ==
        doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("singularity coefficient matches its definition on random rays") {
  Scene two = ts::two_sphere_scene();
  std::mt19937_64 gen(83);
  int tested = 0;
  for (int trial = 0; trial < 6; ++trial) {
    auto [om, th] = ts::direction_pair(gen);
    for (const auto& ray : find_rays(two, om, th, 5, 16).rays) {
      CrossSectionRecord rec = jacobian_linearized(two, ray);
      Vec3 nu1 = unit_normal(two.bodies[ray.bodies.front()], ray.points.front());
      Vec3 num = unit_normal(two.bodies[ray.bodies.back()], ray.points.back());
      double expect = std::pow(std::abs(rec.det * nu1.dot(om) / num.dot(th)), -0.5) /
                      (2.0 * M_PI);
      CHECK(singularity_coefficient(two, rec, ray) == doctest::Approx(expect).epsilon(1e-14));
      ++tested;
    }
  }
  CHECK(tested >= 40);
}

TEST_CASE("singularity coefficient rejects degenerate records") {
  Scene sph = ts::sphere_scene();
  ReflectingRay ray = refine_ray(sph, Vec3(0, 0, -1), Vec3(0, 0, 1), {Vec3(0, 0, 1)}, {0});
  CrossSectionRecord rec = jacobian_linearized(sph, ray);
  rec.det = 0.0;
  CHECK(ts::error_code([&] { singularity_coefficient(sph, rec, ray); }) == Err::degenerate_ray);
}

TEST_CASE("morse index of convex and axis chains") {
  Scene sph = ts::sphere_scene();
  ReflectingRay direct = refine_ray(sph, Vec3(0, 0, -1), Vec3(0, 0, 1), {Vec3(0, 0, 1)}, {0});
  CHECK(morse_index(sph, direct) == 0);

  // every axis chain of the two-sphere scene has a positive-definite
  // constrained Hessian (unstable bouncing between convex mirrors)
  Scene two = ts::two_sphere_scene();
  for (const auto& ray : find_rays(two, Vec3(0, 0, -1), Vec3(0, 0, 1), 4, 16).rays)
    CHECK(morse_index(two, ray) == 0);
}

TEST_CASE("spectrum entries carry negated sojourns and coefficients") {
  Scene two = ts::two_sphere_scene();
  auto res = find_rays(two, Vec3(0, 0, -1), Vec3(0, 0, 1), 6, 24);
  REQUIRE(res.rays.size() == 12);
  auto entries = spectrum_from_rays(two, res.rays);
  REQUIRE(entries.size() == 12);
  for (size_t i = 0; i < entries.size(); ++i) {
    const SpectrumEntry& e = entries[i];
    REQUIRE(e.ray_id >= 0);
    REQUIRE(e.ray_id < int(res.rays.size()));
    CHECK(e.t_singular == -res.rays[e.ray_id].sojourn);  // exact negation
    CHECK(e.m_gamma == res.rays[e.ray_id].m());
    CHECK(!e.degenerate);
    REQUIRE(e.coeff_magnitude.has_value());
    CHECK(*e.coeff_magnitude > 0.0);
    REQUIRE(e.beta_experimental.has_value());
    CHECK(*e.beta_experimental == 0);
    if (i > 0) CHECK(e.t_singular >= entries[i - 1].t_singular);
    // mirror pairs collide in sojourn, so nothing is separated here
    CHECK(!e.separated);
    CHECK(e.min_gap < 1e-9);
  }
}

TEST_CASE("separation flags use the gap tolerance") {
  Scene two = ts::two_sphere_scene();
  auto res = find_rays(two, Vec3(0, 0, -1), Vec3(0, 0, 1), 2, 16);
  REQUIRE(res.rays.size() == 4);
  // keep one ray of each mirror pair: gaps become macroscopic
  std::vector<ReflectingRay> picked;
  for (const auto& r : res.rays)
    if (picked.empty() || std::abs(picked.back().sojourn - r.sojourn) > 1e-9)
      picked.push_back(r);
  REQUIRE(picked.size() == 2);
  auto entries = spectrum_from_rays(two, picked);
  for (const auto& e : entries) {
    CHECK(e.separated);
    CHECK(e.min_gap == doctest::Approx(std::abs(picked[0].sojourn - picked[1].sojourn)));
  }
}

TEST_CASE("length_spectrum of the unit sphere") {
  Scene sph = ts::sphere_scene();
  std::mt19937_64 gen(89);
  for (int trial = 0; trial < 4; ++trial) {
    auto [om, th] = ts::direction_pair(gen);
    std::vector<ReflectingRay> rays;
    auto entries = length_spectrum(sph, om, th, 3, 16, tol::min_gap, &rays);
    REQUIRE(entries.size() == 1);
    REQUIRE(rays.size() == 1);
    CHECK(entries[0].t_singular == doctest::Approx((th - om).norm()).epsilon(1e-10));
    CHECK(entries[0].m_gamma == 1);
    CHECK(entries[0].separated);
    CHECK(*entries[0].coeff_magnitude > 0.0);
  }
  CHECK(length_spectrum(sph, Vec3(0, 0, -1), Vec3(0, 0, 1), 0).empty());
}

TEST_CASE("coefficients scale linearly with the scene") {
  std::mt19937_64 gen(97);
  for (const Scene& base : {ts::sphere_scene(), ts::two_sphere_scene()}) {
    auto [om, th] = ts::direction_pair(gen);
    auto res = find_rays(base, om, th, 3, 16);
    REQUIRE(!res.rays.empty());
    for (double s : {0.5, 2.0}) {
      Scene scaled = scaled_scene(base, s);
      for (const auto& ray : res.rays) {
        std::vector<Vec3> seed;
        for (const Vec3& p : ray.points) seed.push_back(s * p);
        ReflectingRay scaled_ray = refine_ray(scaled, om, th, seed, ray.bodies);
        CHECK(std::abs(scaled_ray.sojourn - s * ray.sojourn) < 1e-9 * std::abs(s * ray.sojourn));
        double c0 = singularity_coefficient(base, jacobian_linearized(base, ray), ray);
        double c1 = singularity_coefficient(scaled, jacobian_linearized(scaled, scaled_ray),
                                            scaled_ray);
        CHECK(std::abs(c1 - s * c0) < 1e-8 * std::abs(s * c0));
      }
    }
  }
}
