#include "trapscan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>

#include "crosssection.hpp"
#include "rng.hpp"

namespace rl {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string format(const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[256];
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf);
}

// Smallest surface-to-surface distance between bodies; +inf for one body.
double min_body_gap(const Scene& scene) {
  double gap = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < scene.bodies.size(); ++i) {
    for (size_t j = i + 1; j < scene.bodies.size(); ++j) {
      double d = (scene.bodies[i].center - scene.bodies[j].center).norm();
      gap = std::min(gap, d - scene.bodies[i].max_extent() - scene.bodies[j].max_extent());
    }
  }
  return gap;
}

Vec3 slerp_dir(const Vec3& from, const Vec3& to, double u) {
  double c = std::clamp(from.dot(to), -1.0, 1.0);
  double phi = std::acos(c);
  if (phi < 1e-12) return ((1.0 - u) * from + u * to).normalized();
  if (phi > M_PI - 1e-6) fail(Err::invalid_argument, "seed directions are antipodal");
  double s = std::sin(phi);
  // For u below ~1e-16 this evaluates to from + (u*phi/s)*to with the `from`
  // coefficient exactly 1, so the interpolant stays meaningful down to the
  // last representable positive u.
  Vec3 v = (std::sin((1.0 - u) * phi) / s) * from + (std::sin(u * phi) / s) * to;
  return v.normalized();
}

// One bidirectional probe of the chord at parameter u. The trajectory through
// a phase point is bi-infinite: tracing backward recovers the incoming leg
// (and hence omega_m), tracing forward the outgoing one.
struct Probe {
  bool censored = true;
  bool tangency = false;
  int m = 0;
  double t_raw = kNegInf;  // sojourn of the raw (unrefined) chain
  Vec3 omega = Vec3::Zero();
  Vec3 theta = Vec3::Zero();
  std::vector<Vec3> points;
  std::vector<int> bodies;
};

Probe probe_chord(const Scene& scene, const PhasePoint& z_trapped, const PhasePoint& z_free,
                  double u, int max_reflections) {
  Probe pr;
  Vec3 pos = z_trapped.x + u * (z_free.x - z_trapped.x);
  Vec3 dir = slerp_dir(z_trapped.xi, z_free.xi, u);

  Trajectory fwd = trace(scene, PhasePoint{pos, dir}, max_reflections);
  Trajectory bwd = trace(scene, PhasePoint{pos, -dir}, max_reflections);
  // A grazing contact leaves the chain undefined but says nothing about
  // trapping; report it as unusable rather than censored.
  pr.tangency = (fwd.status == TraceStatus::tangency) || (bwd.status == TraceStatus::tangency);
  if (pr.tangency) {
    pr.censored = false;
    return pr;
  }
  if (fwd.status != TraceStatus::escaped || bwd.status != TraceStatus::escaped) return pr;

  pr.censored = false;
  pr.m = static_cast<int>(fwd.hits.size() + bwd.hits.size());
  if (pr.m == 0) return pr;  // straight line through the scene, not a ray

  // Chronological order: reversed backward hits, then forward hits.
  for (auto it = bwd.hits.rbegin(); it != bwd.hits.rend(); ++it) {
    pr.points.push_back(it->x);
    pr.bodies.push_back(it->body);
  }
  for (const auto& h : fwd.hits) {
    pr.points.push_back(h.x);
    pr.bodies.push_back(h.body);
  }
  pr.omega = -bwd.directions.back();  // arrival direction of the incoming leg
  pr.theta = fwd.directions.back();
  pr.t_raw = fermat_value(pr.omega, pr.theta, pr.points);
  return pr;
}

}  // namespace

EscapeField escape_scan(const Scene& scene, int density, double budget,
                        const std::vector<PhasePoint>& extra) {
  scene.validate();
  if (density < 1) fail(Err::invalid_argument, "density must be >= 1");
  if (!(budget > 0.0)) fail(Err::invalid_argument, "budget must be positive");

  EscapeField field;
  field.budget = budget;
  int n = density * density;
  auto positions = rng::fibonacci_sphere(n);
  field.samples.reserve(static_cast<size_t>(n) * n + extra.size());
  for (const Vec3& p : positions) {
    Vec3 x = scene.a * p;
    if (inside_any_body(scene, x)) continue;  // body touching C is excluded by validate
    for (const Vec3& d : rng::fibonacci_hemisphere(n, -p)) {
      PhasePoint z{x, d};
      EscapeResult r = escape_time(scene, z, budget);
      field.samples.push_back({z, r.time, r.censored || r.tangency});
    }
  }
  for (const PhasePoint& z : extra) {
    EscapeResult r = escape_time(scene, z, budget);
    field.samples.push_back({z, r.time, r.censored || r.tangency});
  }
  return field;
}

TrappedApproxSequence boundary_bisection(const Scene& scene, const PhasePoint& z_trapped,
                                         const PhasePoint& z_free,
                                         const std::vector<double>& budgets) {
  scene.validate();
  if (budgets.empty()) fail(Err::invalid_argument, "need at least one budget");
  for (size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] > 0.0)) fail(Err::invalid_argument, "budgets must be positive");
    if (i > 0 && !(budgets[i] > budgets[i - 1]))
      fail(Err::invalid_argument, "budgets must be strictly increasing");
  }
  if (std::abs(z_trapped.xi.squaredNorm() - 1.0) > 1e-9 ||
      std::abs(z_free.xi.squaredNorm() - 1.0) > 1e-9)
    fail(Err::invalid_argument, "seed directions must be unit vectors");

  // Working caps. Each side of a probe may carry nearly the whole sojourn.
  const double w_side = 2.0 * budgets.back() + 8.0 * scene.a + 16.0;
  const double gap = min_body_gap(scene);
  const int max_refl =
      std::isfinite(gap) ? static_cast<int>(w_side / std::max(gap, 1e-3)) + 16 : 8;

  // Seed sanity: the trapped end must outlast every working budget, the free
  // end must leave cleanly in both time directions.
  {
    EscapeResult f = escape_time(scene, z_trapped, w_side);
    EscapeResult b = escape_time(scene, {z_trapped.x, -z_trapped.xi}, w_side);
    if (!f.censored && !b.censored)
      fail(Err::seed_not_trapped, "trapped seed escapes before the working budget");
  }
  Probe free_probe = probe_chord(scene, z_trapped, z_free, 1.0, max_refl);
  if (free_probe.censored) fail(Err::seed_not_free, "free seed does not escape");

  TrappedApproxSequence out;
  // Bracket invariant: at u_lo the chain is censored (or already past the
  // current window), at u_hi it escapes with sojourn below the window.
  double u_lo = 0.0;
  double u_hi = 1.0;
  double last_sojourn = kNegInf;

  for (double budget : budgets) {
    const double window_lo = budget;
    const double window_hi = 2.0 * budget;
    bool banked = false;
    int probes = 0;
    int refine_failures = 0;

    // Probe with a tiny relative nudge when the chain grazes a body; grazing
    // parameters form measure-zero pattern boundaries.
    auto clean_probe = [&](double u) -> Probe {
      ++probes;
      Probe pr = probe_chord(scene, z_trapped, z_free, u, max_refl);
      for (int jitter = 1; jitter <= 8 && pr.tangency; ++jitter) {
        double sign = (jitter % 2 == 1) ? 1.0 : -1.0;
        double u_try = u * (1.0 + sign * 4e-12 * jitter);
        if (u_try <= 0.0 || u_try >= 1.0) continue;
        ++probes;
        pr = probe_chord(scene, z_trapped, z_free, u_try, max_refl);
      }
      return pr;
    };
    // "Deep" side of the reflection-count transition at M: trapped, still
    // grazing after nudges, or carrying at least M reflections.
    auto deep = [&](double u, int M) -> bool {
      Probe pr = clean_probe(u);
      return pr.censored || pr.tangency || pr.m >= M;
    };
    // Locate the parameter where the chain stops carrying M reflections.
    // Geometric bisection keeps relative precision uniform across the many
    // decades the parameter spans; returns the deep edge of the bracket.
    auto transition = [&](int M, double u_deep, double u_shallow) -> double {
      for (int i = 0; i < 90 && probes < 3600; ++i) {
        double mid = std::sqrt(u_deep * u_shallow);
        if (!(mid > u_deep) || !(mid < u_shallow)) break;
        (deep(mid, M) ? u_deep : u_shallow) = mid;
      }
      return u_deep;
    };
    auto bank = [&](const Probe& pr, const char* how) -> bool {
      try {
        ReflectingRay ray = refine_ray(scene, pr.omega, pr.theta, pr.points, pr.bodies);
        if (ray.sojourn < window_lo || ray.sojourn > window_hi)
          fail(Err::refinement_failed, "refined sojourn left the window");
        if (!(ray.sojourn > last_sojourn))
          fail(Err::refinement_failed, "sojourn not strictly increasing");
        out.rays.push_back(ray);
        out.directions.emplace_back(ray.omega, ray.theta);
        out.reflections.push_back(ray.m());
        last_sojourn = ray.sojourn;
        out.report.push_back(format("budget %g: sojourn %.9g with %d reflections (%d probes, %s)",
                                    budget, ray.sojourn, ray.m(), probes, how));
        return true;
      } catch (const Error&) {
        ++refine_failures;
        return false;
      }
    };
    // The escape time of a chain sitting at a fixed relative position between
    // two consecutive reflection-count transitions differs from 2m (the closed
    // orbit contribution) by an entry/exit term that is the same at every
    // depth, up to corrections that die off with the instability factor per
    // bounce. Banking at that pinned position makes the per-reflection sojourn
    // gaps between stages converge to the surface gap essentially exactly,
    // instead of wobbling with whatever exit shape the first in-window probe
    // happened to carry.
    auto bank_phase_pinned = [&](double u_cand, int m_cand) -> bool {
      int m_cur = m_cand;
      // Shallow edge of the current plateau.
      double u_s = u_cand;
      for (int i = 0; i < 200 && deep(u_s, m_cur) && probes < 3600; ++i) u_s = std::min(1.0, u_s * 2.0);
      if (deep(u_s, m_cur)) return false;
      double top = transition(m_cur, u_cand, u_s);
      // Deep edge: the next transition below.
      double u_d = u_cand;
      for (int i = 0; i < 200 && !deep(u_d, m_cur + 1) && probes < 3600; ++i) u_d *= 0.5;
      if (!deep(u_d, m_cur + 1) || u_d < 1e-300) return false;
      double bot = transition(m_cur + 1, u_d, u_cand);

      for (int move = 0; move < 8 && probes < 3800; ++move) {
        double lt = std::log(top), lb = std::log(bot);
        Probe pr;
        bool usable = false;
        // Pinned position first, then small sweeps around it in case a grazing
        // sliver breaks the plateau right at the midpoint.
        for (double phi : {0.5, 0.45, 0.55, 0.4, 0.6, 0.35, 0.65}) {
          pr = clean_probe(std::exp(lt + phi * (lb - lt)));
          if (!pr.censored && !pr.tangency && pr.m == m_cur) { usable = true; break; }
        }
        if (!usable) return false;
        if (pr.t_raw >= window_lo && pr.t_raw <= window_hi) return bank(pr, "phase-pinned");
        if (pr.t_raw > window_hi) {
          // Plateau overshoots the window: step one plateau shallower.
          Probe above = clean_probe(top * 2.4);
          if (above.censored || above.tangency || above.m < 1 || above.m >= m_cur) return false;
          m_cur = above.m;
          double shallow = top;
          for (int i = 0; i < 200 && deep(shallow, m_cur) && probes < 3600; ++i)
            shallow = std::min(1.0, shallow * 2.0);
          if (deep(shallow, m_cur)) return false;
          bot = top;
          top = transition(m_cur, top, shallow);
        } else {
          // Plateau sits below the window: step one plateau deeper.
          Probe below = clean_probe(bot * 0.4);
          if (below.censored || below.tangency || below.m <= m_cur) return false;
          m_cur = below.m;
          double deep_end = bot;
          for (int i = 0; i < 200 && !deep(deep_end, m_cur + 1) && probes < 3600; ++i) deep_end *= 0.5;
          if (!deep(deep_end, m_cur + 1) || deep_end < 1e-300) return false;
          top = bot;
          bot = transition(m_cur + 1, deep_end, bot);
        }
      }
      return false;
    };

    while (probes < 4000 && !banked) {
      double u_mid = 0.5 * (u_lo + u_hi);
      if (u_mid <= u_lo || u_mid >= u_hi || u_hi < 1e-300) {
        out.report.push_back(format("budget %g: bracket exhausted after %d probes", budget, probes));
        break;
      }
      Probe pr = clean_probe(u_mid);
      if (pr.tangency) {
        // Persistent grazing band: path length is continuous across it, so it
        // belongs to the escaping side the bracket approached it from.
        u_hi = u_mid;
        continue;
      }
      if (pr.censored || pr.t_raw > window_hi) {
        u_lo = u_mid;
        continue;
      }
      if (pr.t_raw < window_lo || pr.m < 1) {
        u_hi = u_mid;
        continue;
      }
      // First probe inside the window. Prefer the phase-pinned point on a
      // plateau inside the window; fall back to this probe if pinning fails.
      banked = bank_phase_pinned(u_mid, pr.m) || bank(pr, "first candidate");
      if (banked) {
        u_hi = u_mid;  // the banked region escapes before the next window
      } else {
        if (refine_failures > 40) {
          out.report.push_back(format("budget %g: refinement kept failing, giving up", budget));
          break;
        }
        u_hi = u_mid;  // look for another candidate deeper in the window
      }
    }
    if (!banked && probes >= 4000)
      out.report.push_back(format("budget %g: no candidate in window after %d probes", budget, probes));
  }

  for (size_t i = 0; i + 1 < out.rays.size(); ++i)
    out.gaps.push_back(out.rays[i + 1].sojourn - out.rays[i].sojourn);
  return out;
}

TrappedApproxSequence nondegenerate_filter(const Scene& scene, const TrappedApproxSequence& seq,
                                           double threshold) {
  TrappedApproxSequence out;
  out.report = seq.report;
  for (size_t i = 0; i < seq.rays.size(); ++i) {
    const ReflectingRay& ray = seq.rays[i];
    double det = 0.0;
    bool have_det = false;
    try {
      det = jacobian_linearized(scene, ray).det;
      have_det = true;
    } catch (const Error&) {
    }
    if (have_det && std::abs(det) > threshold) {
      out.rays.push_back(ray);
      out.directions.push_back(seq.directions[i]);
      out.reflections.push_back(ray.m());
      continue;
    }

    // Repair attempt: nudge the exit direction and re-solve from the same
    // impact points; accept if the sojourn barely moves and the Jacobian
    // becomes invertible.
    bool repaired = false;
    Vec3 e1, e2;
    tangent_frame(ray.theta, e1, e2);
    for (int k = 0; k < 8 && !repaired; ++k) {
      double ang = 1e-5;
      Vec3 tweak = std::cos(0.25 * M_PI * k) * e1 + std::sin(0.25 * M_PI * k) * e2;
      Vec3 theta2 = (ray.theta + ang * tweak).normalized();
      try {
        ReflectingRay r2 = refine_ray(scene, ray.omega, theta2, ray.points, ray.bodies);
        double det2 = jacobian_linearized(scene, r2).det;
        if (std::abs(det2) > threshold &&
            std::abs(r2.sojourn - ray.sojourn) <= 0.01 * std::max(1.0, std::abs(ray.sojourn))) {
          out.rays.push_back(r2);
          out.directions.emplace_back(r2.omega, r2.theta);
          out.reflections.push_back(r2.m());
          out.report.push_back(format("ray %zu repaired by exit-direction nudge", i));
          repaired = true;
        }
      } catch (const Error&) {
      }
    }
    if (!repaired)
      out.report.push_back(format("ray %zu dropped: |det dJ| below %g", i, threshold));
  }
  for (size_t i = 0; i + 1 < out.rays.size(); ++i)
    out.gaps.push_back(out.rays[i + 1].sojourn - out.rays[i].sojourn);
  return out;
}

WeakNdgEstimate weak_nondegeneracy_estimate(const Scene& scene, const PhasePoint& y_eta,
                                            double radius, int n_samples, uint64_t seed,
                                            double budget) {
  scene.validate();
  if (n_samples < 100) fail(Err::invalid_argument, "need at least 100 samples");
  if (!(radius > 0.0)) fail(Err::invalid_argument, "radius must be positive");
  if (!(budget > 0.0)) fail(Err::invalid_argument, "budget must be positive");
  if (y_eta.x.norm() > scene.a * (1.0 + 1e-9))
    fail(Err::invalid_argument, "base point lies outside the reference ball");
  if (inside_any_body(scene, y_eta.x))
    fail(Err::invalid_argument, "base point lies inside a body");
  Vec3 base_dir = y_eta.xi.normalized();

  std::mt19937_64 gen(seed);
  bool on_sphere = std::abs(y_eta.x.norm() - scene.a) <= 1e-9 * std::max(1.0, scene.a);
  double cap = std::min(radius, M_PI);
  double cos_cap = std::cos(cap);
  Vec3 e1, e2;
  tangent_frame(base_dir, e1, e2);

  int successes = 0;
  for (int s = 0; s < n_samples; ++s) {
    Vec3 x;
    bool ok_pos = false;
    for (int attempt = 0; attempt < 64 && !ok_pos; ++attempt) {
      if (on_sphere) {
        x = scene.a * (y_eta.x + radius * rng::unit_vector(gen)).normalized();
      } else {
        x = y_eta.x + radius * std::cbrt(rng::uniform01(gen)) * rng::unit_vector(gen);
      }
      ok_pos = !inside_any_body(scene, x) && x.norm() <= scene.a * (1.0 + 1e-12);
    }
    if (!ok_pos) continue;  // counts as a failure

    double ca = 1.0 - rng::uniform01(gen) * (1.0 - cos_cap);
    double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
    double phi = rng::uniform(gen, 0.0, 2.0 * M_PI);
    Vec3 d = sa * (std::cos(phi) * e1 + std::sin(phi) * e2) + ca * base_dir;

    EscapeResult fwd = escape_time(scene, {x, d}, budget);
    EscapeResult bwd = escape_time(scene, {x, -d}, budget);
    bool ordinary = !fwd.censored && !bwd.censored && !fwd.tangency && !bwd.tangency &&
                    (fwd.reflections + bwd.reflections >= 1);
    if (ordinary) ++successes;
  }

  WeakNdgEstimate est;
  est.successes = successes;
  est.samples = n_samples;
  est.fraction = static_cast<double>(successes) / n_samples;
  double p = est.fraction;
  est.ci_halfwidth = 1.96 * std::sqrt(std::max(0.0, p * (1.0 - p) / n_samples));
  return est;
}

}  // namespace rl
