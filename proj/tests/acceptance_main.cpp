// Acceptance gate: one line per criterion, PASS only when the measured
// quantity meets the stated bound inside the stated time cap. Run with no
// arguments for the full gate or with criterion numbers to select.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/scenetext.hpp"
#include "core/spectrum.hpp"
#include "core/trapscan.hpp"
#include "core/waveoracle.hpp"

using namespace rl;

namespace {

std::string g_scenes = SCENES_DIR;

Scene load(const char* name) { return load_scene(g_scenes + "/" + name); }

Scene sphere_of(double R) {
  Scene s;
  s.rho = R;
  s.a = 2.0 * R;
  s.bodies.push_back({BodyKind::sphere, Vec3::Zero(), Vec3(R, R, R)});
  return s;
}

std::pair<Vec3, Vec3> direction_pair(std::mt19937_64& gen) {
  Vec3 om = rng::unit_vector(gen);
  Vec3 th = rng::unit_vector(gen);
  while ((th - om).norm() < 1e-2) th = rng::unit_vector(gen);
  return {om, th};
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];
std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// 1. Convex prediction: on spheres of radius 1, 2, 3 both Jacobian methods
//    reproduce 4 K(x+) = 4/R^2 to relative error < 1e-5 over 100 random
//    direction pairs per radius.
Outcome criterion_1() {
  std::mt19937_64 gen(101);
  double worst = 0.0;
  int checks = 0;
  for (double R : {1.0, 2.0, 3.0}) {
    Scene s = sphere_of(R);
    double expect = 4.0 / (R * R);
    for (int trial = 0; trial < 100; ++trial) {
      auto [om, th] = direction_pair(gen);
      ReflectingRay ray = refine_ray(s, om, th, {R * (th - om).normalized()}, {0});
      for (double det : {jacobian_linearized(s, ray).det, jacobian_fd(s, ray).det}) {
        worst = std::max(worst, std::abs(std::abs(det) - expect) / expect);
        ++checks;
      }
    }
  }
  return {worst < 1e-5, fmt("worst rel err %.2e over %d determinants (bound 1e-5)", worst, checks)};
}

// 2. The hyperplane sojourn agrees with the inner-product form to 1e-12 for
//    ball radii a = rho, 2 rho, 10 rho over at least 100 rays drawn from both
//    reference scenes.
Outcome criterion_2() {
  std::mt19937_64 gen(102);
  Scene sph = load("sphere_unit.scene");
  Scene two = load("two_spheres.scene");
  double worst = 0.0;
  int rays = 0;
  while (rays < 100) {
    auto [om, th] = direction_pair(gen);
    for (const Scene* sc : {&sph, &two}) {
      for (const auto& ray : find_rays(*sc, om, th, sc == &two ? 6 : 1, 16).rays) {
        ++rays;
        for (double mult : {1.0, 2.0, 10.0}) {
          Scene s2 = *sc;
          s2.a = s2.rho * mult;
          worst = std::max(worst, std::abs(sojourn_hyperplane(s2, ray) - ray.sojourn));
        }
      }
    }
  }
  return {worst < 1e-12, fmt("worst |T_plane - T| %.2e over %d rays x 3 radii (bound 1e-12)",
                             worst, rays)};
}

// 3. Finite-difference and linearized shooting-map determinants agree to
//    relative error 1e-5 on 100 random two-sphere rays including depth 6.
Outcome criterion_3() {
  std::mt19937_64 gen(103);
  Scene two = load("two_spheres.scene");
  double worst = 0.0;
  int rays = 0, deepest = 0;
  while (rays < 100) {
    auto [om, th] = direction_pair(gen);
    for (const auto& ray : find_rays(two, om, th, 6, 16).rays) {
      ++rays;
      deepest = std::max(deepest, ray.m());
      double lin = jacobian_linearized(two, ray).det;
      double fd = jacobian_fd(two, ray).det;
      worst = std::max(worst, std::abs(fd - lin) / std::abs(lin));
    }
  }
  bool pass = worst < 1e-5 && deepest >= 6;
  return {pass, fmt("worst rel diff %.2e over %d rays, max depth %d (bound 1e-5, depth 6)",
                    worst, rays, deepest)};
}

// 4. boundary_bisection with budgets 10..320 banks >= 6 ordinary reflecting
//    rays with strictly increasing sojourns whose per-reflection gap reaches
//    the body gap 2 within 1e-3 at the last stage.
Outcome criterion_4() {
  Scene two = load("two_spheres.scene");
  TrappedApproxSequence seq =
      boundary_bisection(two, {Vec3::Zero(), Vec3(1, 0, 0)}, {Vec3::Zero(), Vec3(0, 1, 0)},
                         {10, 20, 40, 80, 160, 320});
  if (seq.rays.size() < 6) return {false, fmt("only %zu rays banked", seq.rays.size())};
  for (size_t i = 0; i < seq.rays.size(); ++i) {
    if (seq.rays[i].m() < 1 || seq.rays[i].residual > 1e-9)
      return {false, fmt("ray %zu is not an ordinary reflecting ray", i)};
    if (i > 0 && !(seq.rays[i].sojourn > seq.rays[i - 1].sojourn))
      return {false, fmt("sojourns not strictly increasing at stage %zu", i)};
  }
  size_t n = seq.rays.size();
  double dm = seq.reflections[n - 1] - seq.reflections[n - 2];
  double gap = (seq.rays[n - 1].sojourn - seq.rays[n - 2].sojourn) / dm;
  double err = std::abs(gap - 2.0);
  return {err < 1e-3, fmt("%zu rays, last per-reflection gap %.9f, |gap-2| = %.2e (bound 1e-3)",
                          n, gap, err)};
}

// 5. After nondegenerate_filter the banked sequence is spectrum-ready:
//    every |det dJ| > 1e-8, every coefficient magnitude positive, and the
//    singular times are pairwise separated by more than 1e-6.
Outcome criterion_5() {
  Scene two = load("two_spheres.scene");
  TrappedApproxSequence seq =
      boundary_bisection(two, {Vec3::Zero(), Vec3(1, 0, 0)}, {Vec3::Zero(), Vec3(0, 1, 0)},
                         {10, 20, 40, 80, 160, 320});
  TrappedApproxSequence kept = nondegenerate_filter(two, seq);
  if (kept.rays.size() < 6) return {false, fmt("filter kept only %zu rays", kept.rays.size())};

  double min_det = 1e300;
  for (const auto& ray : kept.rays)
    min_det = std::min(min_det, std::abs(jacobian_linearized(two, ray).det));
  if (min_det <= 1e-8) return {false, fmt("min |det dJ| %.2e below 1e-8", min_det)};

  auto entries = spectrum_from_rays(two, kept.rays);
  double min_gap = 1e300, min_coeff = 1e300;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].coeff_magnitude) return {false, fmt("entry %zu has no coefficient", i)};
    min_coeff = std::min(min_coeff, *entries[i].coeff_magnitude);
    for (size_t j = i + 1; j < entries.size(); ++j)
      min_gap = std::min(min_gap, std::abs(entries[i].t_singular - entries[j].t_singular));
  }
  bool pass = min_coeff > 0.0 && min_gap > 1e-6;
  return {pass, fmt("%zu entries, min |det| %.2e, min coeff %.2e, min gap %.3f (bound 1e-6)",
                    entries.size(), min_det, min_coeff, min_gap)};
}

// 6. Wave-side validation on the unit sphere: for bands [20,60] and [30,90]
//    and <theta,omega> in {-1, -0.5, 0.3}, the dominant kernel peak falls
//    within one resolution cell of R|theta-omega| with no spurious peak at
//    30% of the main one outside that cell.
Outcome criterion_6() {
  Vec3 om(0, 0, -1);
  Vec3 perp(1, 0, 0);
  double worst_cells = 0.0;
  int spurious = 0, checks = 0;
  for (auto [lo, hi] : {std::pair{20.0, 60.0}, std::pair{30.0, 90.0}}) {
    double cell = 2.0 * M_PI / (hi - lo);
    for (double c : {-1.0, -0.5, 0.3}) {
      Vec3 th = c * om + std::sqrt(1.0 - c * c) * perp;
      SphereValidation v = validate_sphere(1.0, om, th.normalized(), lo, hi);
      worst_cells = std::max(worst_cells, v.peak_error / cell);
      spurious += v.spurious_peaks;
      ++checks;
    }
  }
  bool pass = worst_cells < 1.0 && spurious == 0;
  return {pass, fmt("%d bands x angles, worst peak error %.3f cells, %d spurious peaks",
                    checks, worst_cells, spurious)};
}

// 7. Cross-scale consistency: the measured peak-magnitude ratio between the
//    R=1 and R=2 spheres matches the singularity-coefficient ratio from the
//    geometric pipeline within 10%.
Outcome criterion_7() {
  Vec3 om(0, 0, -1), th(0, 0, 1);
  PairCheck pc = cross_check(1.0, 2.0, om, th, 20.0, 60.0);
  auto coeff_for = [&](double R) {
    Scene s = sphere_of(R);
    std::vector<ReflectingRay> rays;
    auto entries = length_spectrum(s, om, th, 1, 16, tol::min_gap, &rays);
    return *entries.front().coeff_magnitude;
  };
  double predicted = coeff_for(1.0) / coeff_for(2.0);
  double err = std::abs(pc.magnitude_ratio - predicted) / predicted;
  return {err < 0.1, fmt("measured ratio %.4f vs pipeline coefficient ratio %.4f, error %.1f%% "
                         "(bound 10%%)",
                         pc.magnitude_ratio, predicted, 100.0 * err)};
}

// 8. Escape censoring: the convex scene never censors at budget 500 over a
//    10^4-sample grid; the two-sphere scene censors a positive fraction
//    below 1%.
Outcome criterion_8() {
  Scene sph = load("sphere_unit.scene");
  EscapeField f1 = escape_scan(sph, 10, 500.0);
  int c1 = 0;
  for (const auto& s : f1.samples) c1 += s.censored ? 1 : 0;

  Scene two = load("two_spheres.scene");
  EscapeField f2 = escape_scan(two, 10, 500.0, {{Vec3::Zero(), Vec3(1, 0, 0)}});
  int c2 = 0;
  for (const auto& s : f2.samples) c2 += s.censored ? 1 : 0;
  double frac = double(c2) / double(f2.samples.size());

  bool pass = c1 == 0 && f1.samples.size() >= 10000 && c2 > 0 && frac < 0.01;
  return {pass, fmt("sphere %d/%zu censored, two-sphere %d/%zu (%.3f%%, need >0 and <1%%)",
                    c1, f1.samples.size(), c2, f2.samples.size(), 100.0 * frac)};
}

// 9. Weak non-degeneracy of trapping: 10^4 samples in the radius-0.05
//    neighborhood of the trapped axis give a positive ordinary-ray fraction
//    whose 95% interval excludes zero, reproducibly under the seed.
Outcome criterion_9() {
  Scene two = load("two_spheres.scene");
  PhasePoint axis{Vec3::Zero(), Vec3(1, 0, 0)};
  WeakNdgEstimate est = weak_nondegeneracy_estimate(two, axis, 0.05, 10000, 1);
  WeakNdgEstimate rep = weak_nondegeneracy_estimate(two, axis, 0.05, 10000, 1);
  bool deterministic = est.successes == rep.successes && est.fraction == rep.fraction;
  bool pass = est.fraction > 0.0 && est.fraction - est.ci_halfwidth > 0.0 && deterministic;
  return {pass, fmt("fraction %.4f +/- %.4f over %d samples, interval excludes 0: %s, "
                    "seed-stable: %s",
                    est.fraction, est.ci_halfwidth, est.samples,
                    est.fraction - est.ci_halfwidth > 0.0 ? "yes" : "no",
                    deterministic ? "yes" : "no")};
}

// 10. Property suites: the reflection law over 10^6 random inputs at 1e-14,
//     criticality <=> specularity of found rays at 1e-9, linear scene-scaling
//     covariance of coefficients at 1e-8, and bit-exact scene round-trips.
Outcome criterion_10() {
  std::mt19937_64 gen(110);

  double worst_reflect = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    Vec3 d = rng::unit_vector(gen);
    Vec3 nu = rng::unit_vector(gen);
    Vec3 r = reflect(d, nu);
    worst_reflect = std::max(worst_reflect, std::abs(r.norm() - 1.0));
    worst_reflect = std::max(worst_reflect, std::abs(r.dot(nu) + d.dot(nu)));
    worst_reflect = std::max(worst_reflect, (reflect(r, nu) - d).norm());
  }
  if (worst_reflect >= 1e-14)
    return {false, fmt("reflection law defect %.2e exceeds 1e-14", worst_reflect)};

  Scene two = load("two_spheres.scene");
  double worst_crit = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    auto [om, th] = direction_pair(gen);
    for (const auto& ray : find_rays(two, om, th, 5, 12).rays) {
      auto sp = chain_surface_points(two, ray.points, ray.bodies);
      worst_crit = std::max(worst_crit, fermat_gradient(om, th, sp).norm());
      worst_crit = std::max(worst_crit, ray.residual);
    }
  }
  if (worst_crit >= 1e-9)
    return {false, fmt("criticality/specularity defect %.2e exceeds 1e-9", worst_crit)};

  double worst_scale = 0.0;
  for (const Scene& base : {load("sphere_unit.scene"), two}) {
    auto [om, th] = direction_pair(gen);
    for (const auto& ray : find_rays(base, om, th, 3, 12).rays) {
      double c0 = singularity_coefficient(base, jacobian_linearized(base, ray), ray);
      for (double s : {0.5, 2.0}) {
        Scene scaled = base;
        scaled.rho *= s;
        scaled.a *= s;
        for (Body& b : scaled.bodies) {
          b.center *= s;
          b.radii *= s;
        }
        std::vector<Vec3> seed;
        for (const Vec3& p : ray.points) seed.push_back(s * p);
        ReflectingRay sray = refine_ray(scaled, om, th, seed, ray.bodies);
        double c1 = singularity_coefficient(scaled, jacobian_linearized(scaled, sray), sray);
        worst_scale = std::max(worst_scale, std::abs(c1 - s * c0) / (s * c0));
      }
    }
  }
  if (worst_scale >= 1e-8)
    return {false, fmt("scaling covariance defect %.2e exceeds 1e-8", worst_scale)};

  for (const char* name : {"sphere_unit.scene", "two_spheres.scene", "ellipsoid.scene"}) {
    Scene s = load(name);
    Scene back = parse_scene(emit_scene(s));
    bool same = s.rho == back.rho && s.a == back.a && s.bodies.size() == back.bodies.size();
    for (size_t i = 0; same && i < s.bodies.size(); ++i)
      same = s.bodies[i].center == back.bodies[i].center &&
             s.bodies[i].radii == back.bodies[i].radii;
    if (!same) return {false, fmt("scene %s does not round-trip bit-exactly", name)};
  }

  return {true, fmt("reflect %.1e (<1e-14), critical %.1e (<1e-9), scaling %.1e (<1e-8), "
                    "round-trips exact",
                    worst_reflect, worst_crit, worst_scale)};
}

struct Criterion {
  int number;
  double cap_seconds;
  std::function<Outcome()> fn;
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all = {
      {1, 10.0, criterion_1},  {2, 10.0, criterion_2},  {3, 30.0, criterion_3},
      {4, 60.0, criterion_4},  {5, 60.0, criterion_5},  {6, 120.0, criterion_6},
      {7, 120.0, criterion_7}, {8, 60.0, criterion_8},  {9, 60.0, criterion_9},
      {10, 30.0, criterion_10},
  };

  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.fn();
    } catch (const Error& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs < c.cap_seconds;
    bool pass = out.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %2d: %s in %6.2fs (cap %3.0fs) - %s%s\n", c.number,
                pass ? "PASS" : "FAIL", secs, c.cap_seconds, out.detail.c_str(),
                in_time ? "" : " [over time budget]");
  }
  return failures == 0 ? 0 : 1;
}
