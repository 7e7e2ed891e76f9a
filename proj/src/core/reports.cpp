#include "reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "scenetext.hpp"
#include "spectrum.hpp"
#include "trapscan.hpp"
#include "waveoracle.hpp"

namespace rl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON rejects non-finite numbers; encode them as strings.
json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

json jvec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);  // binary: no platform newline surprises
  if (!f) fail(Err::io, "cannot open output file: " + p.string());
  return f;
}

void write_manifest(const fs::path& dir, const RunConfig& cfg, const json& params,
                    const json& summary, const json& files) {
  json m;
  m["command"] = cfg.command;
  m["version"] = kVersion;
  m["scene"] = cfg.scene_path;
  m["seed"] = cfg.seed;
  m["parameters"] = params;
  m["outputs"] = files;
  m["summary"] = summary;
  auto f = open_out(dir / "manifest.json");
  f << m.dump(2) << "\n";
}

WindowKind window_kind(const std::string& w) {
  if (w == "gaussian") return WindowKind::gaussian;
  if (w == "hann") return WindowKind::hann;
  fail(Err::invalid_argument, "unknown window kind: " + w);
}

void write_kernel_csv(const fs::path& p, const FilteredKernel& k) {
  auto f = open_out(p);
  f << "t,re_s,im_s,abs_s\n";
  for (size_t i = 0; i < k.t.size(); ++i)
    f << num(k.t[i]) << ',' << num(k.s[i].real()) << ',' << num(k.s[i].imag()) << ','
      << num(std::abs(k.s[i])) << "\n";
}

int run_spectrum(const RunConfig& cfg, const Scene& scene, const fs::path& dir) {
  std::vector<ReflectingRay> rays;
  auto entries = length_spectrum(scene, cfg.omega.normalized(), cfg.theta.normalized(), cfg.m_max,
                                 cfg.grid_density, tol::min_gap, &rays);
  {
    auto f = open_out(dir / "spectrum.csv");
    f << "ray_id,m,t_singular,det_dJ,coeff_magnitude,separated\n";
    for (const auto& e : entries) {
      f << e.ray_id << ',' << e.m_gamma << ',' << num(e.t_singular) << ',' << num(e.det_dJ) << ',';
      if (e.coeff_magnitude) f << num(*e.coeff_magnitude);
      f << ',' << (e.separated ? 1 : 0) << "\n";
    }
  }
  json summary;
  summary["rays"] = entries.size();
  summary["separated"] = std::all_of(entries.begin(), entries.end(),
                                     [](const SpectrumEntry& e) { return e.separated; });
  json params{{"omega", jvec(cfg.omega)},
              {"theta", jvec(cfg.theta)},
              {"m_max", cfg.m_max},
              {"grid_density", cfg.grid_density}};
  write_manifest(dir, cfg, params, summary, json::array({"spectrum.csv"}));
  return 0;
}

// Trapped/free seed pair for scenes with a trapping body pair: the midpoint
// of the first two centers with the axis direction is exactly trapped by
// symmetry; the same point aimed across the axis leaves freely.
bool axis_seeds(const Scene& scene, PhasePoint& trapped, PhasePoint& free_seed) {
  if (scene.bodies.size() < 2) return false;
  Vec3 c0 = scene.bodies[0].center;
  Vec3 c1 = scene.bodies[1].center;
  Vec3 axis = (c1 - c0).normalized();
  Vec3 mid = 0.5 * (c0 + c1);
  Vec3 e1, e2;
  tangent_frame(axis, e1, e2);
  trapped = {mid, axis};
  free_seed = {mid, e1};
  return true;
}

int run_trapscan(const RunConfig& cfg, const Scene& scene, const fs::path& dir) {
  PhasePoint trapped, free_seed;
  bool have_pair = axis_seeds(scene, trapped, free_seed);

  std::vector<PhasePoint> extra;
  if (have_pair) extra.push_back(trapped);
  EscapeField field = escape_scan(scene, cfg.scan_density, cfg.budget, extra);
  {
    auto f = open_out(dir / "escape_field.csv");
    f << "x,y,z,dir_x,dir_y,dir_z,time,censored\n";
    for (const auto& s : field.samples)
      f << num(s.z.x.x()) << ',' << num(s.z.x.y()) << ',' << num(s.z.x.z()) << ','
        << num(s.z.xi.x()) << ',' << num(s.z.xi.y()) << ',' << num(s.z.xi.z()) << ','
        << num(s.time) << ',' << (s.censored ? 1 : 0) << "\n";
  }
  size_t censored = 0;
  for (const auto& s : field.samples) censored += s.censored ? 1 : 0;

  json summary;
  summary["scan_samples"] = field.samples.size();
  summary["scan_censored"] = censored;
  json files = json::array({"escape_field.csv"});

  if (have_pair) {
    std::vector<double> budgets;
    for (double b = 10.0; b <= cfg.budget * (1.0 + 1e-12); b *= 2.0) budgets.push_back(b);
    if (budgets.empty()) budgets.push_back(cfg.budget);

    TrappedApproxSequence seq = boundary_bisection(scene, trapped, free_seed, budgets);
    TrappedApproxSequence kept = nondegenerate_filter(scene, seq);
    {
      auto f = open_out(dir / "sequence.csv");
      f << "stage,omega_x,omega_y,omega_z,theta_x,theta_y,theta_z,sojourn,det_dJ\n";
      for (size_t i = 0; i < kept.rays.size(); ++i) {
        const auto& ray = kept.rays[i];
        double det = std::numeric_limits<double>::quiet_NaN();
        try {
          det = jacobian_linearized(scene, ray).det;
        } catch (const Error&) {
        }
        f << i + 1 << ',' << num(ray.omega.x()) << ',' << num(ray.omega.y()) << ','
          << num(ray.omega.z()) << ',' << num(ray.theta.x()) << ',' << num(ray.theta.y()) << ','
          << num(ray.theta.z()) << ',' << num(ray.sojourn) << ',' << num(det) << "\n";
      }
    }
    files.push_back("sequence.csv");

    json jseq;
    jseq["stages"] = kept.rays.size();
    jseq["sojourns"] = json::array();
    jseq["reflections"] = json::array();
    for (const auto& r : kept.rays) jseq["sojourns"].push_back(r.sojourn);
    for (int m : kept.reflections) jseq["reflections"].push_back(m);
    jseq["gaps"] = kept.gaps;
    json per_refl = json::array();
    for (size_t i = 0; i + 1 < kept.rays.size(); ++i) {
      double dm = kept.reflections[i + 1] - kept.reflections[i];
      if (dm > 0) per_refl.push_back((kept.rays[i + 1].sojourn - kept.rays[i].sojourn) / dm);
    }
    jseq["gap_per_reflection"] = per_refl;
    jseq["report"] = kept.report;
    summary["sequence"] = jseq;
  } else {
    summary["sequence"] = "scene has no trapping body pair";
  }

  json params{{"budget", cfg.budget}, {"scan_density", cfg.scan_density}};
  write_manifest(dir, cfg, params, summary, files);
  return 0;
}

int run_validate_sphere(const RunConfig& cfg, const Scene& scene, const fs::path& dir) {
  if (scene.bodies.size() != 1 || scene.bodies[0].kind != BodyKind::sphere)
    fail(Err::invalid_argument, "validate-sphere needs a single-sphere scene");
  double r1 = scene.bodies[0].radii.x();
  double r2 = 2.0 * r1;
  Vec3 omega = cfg.omega.normalized();
  Vec3 theta = cfg.theta.normalized();
  WindowKind wk = window_kind(cfg.window);

  PairCheck pc = cross_check(r1, r2, omega, theta, cfg.band_lo, cfg.band_hi, wk);

  // Predicted ratio through the geometric pipeline (single-reflection ray on
  // each sphere), not the closed form, so the check exercises both sides.
  auto coeff_for = [&](double R) {
    Scene s;
    s.bodies.push_back({BodyKind::sphere, Vec3::Zero(), Vec3(R, R, R)});
    s.rho = R;
    s.a = 2.0 * R;
    std::vector<ReflectingRay> rays;
    auto entries = length_spectrum(s, omega, theta, 1, 16, tol::min_gap, &rays);
    if (entries.size() != 1 || !entries.front().coeff_magnitude)
      fail(Err::validation, "sphere spectrum did not yield one nondegenerate ray");
    return *entries.front().coeff_magnitude;
  };
  double predicted_ratio = coeff_for(r1) / coeff_for(r2);

  write_kernel_csv(dir / "kernel_r1.csv", pc.first.kernel);
  write_kernel_csv(dir / "kernel_r2.csv", pc.second.kernel);
  {
    auto f = open_out(dir / "peaks.csv");
    f << "radius,predicted_t,measured_t,peak_error,peak_magnitude,spurious_peaks\n";
    for (const SphereValidation* v : {&pc.first, &pc.second}) {
      double R = (v == &pc.first) ? r1 : r2;
      f << num(R) << ',' << num(v->predicted_t) << ',' << num(v->measured_t) << ','
        << num(v->peak_error) << ',' << num(v->peak_magnitude) << ',' << v->spurious_peaks
        << "\n";
    }
  }

  json summary;
  summary["peak_error_r1"] = jnum(pc.first.peak_error);
  summary["peak_error_r2"] = jnum(pc.second.peak_error);
  summary["resolution_cell"] = 2.0 * M_PI / (cfg.band_hi - cfg.band_lo);
  summary["magnitude_ratio"] = jnum(pc.magnitude_ratio);
  summary["predicted_ratio"] = jnum(predicted_ratio);
  summary["ratio_error"] =
      jnum(std::abs(pc.magnitude_ratio - predicted_ratio) / predicted_ratio);
  summary["parseval_rel_r1"] = jnum(pc.first.kernel.parseval_rel);
  summary["parseval_rel_r2"] = jnum(pc.second.kernel.parseval_rel);
  json params{{"omega", jvec(cfg.omega)},
              {"theta", jvec(cfg.theta)},
              {"band", json::array({cfg.band_lo, cfg.band_hi})},
              {"window", cfg.window}};
  write_manifest(dir, cfg, params, summary,
                 json::array({"kernel_r1.csv", "kernel_r2.csv", "peaks.csv"}));
  return 0;
}

int run_cross_check(const RunConfig& cfg, const Scene& scene, const fs::path& dir) {
  std::vector<ReflectingRay> rays;
  length_spectrum(scene, cfg.omega.normalized(), cfg.theta.normalized(), cfg.m_max,
                  cfg.grid_density, tol::min_gap, &rays);
  double worst = 0.0;
  {
    auto f = open_out(dir / "crosscheck.csv");
    f << "ray_id,m,det_fd,det_linearized,rel_diff\n";
    for (size_t i = 0; i < rays.size(); ++i) {
      double dfd = jacobian_fd(scene, rays[i]).det;
      double dlin = jacobian_linearized(scene, rays[i]).det;
      double rel = std::abs(dfd - dlin) / std::max(std::abs(dlin), 1e-300);
      worst = std::max(worst, rel);
      f << i << ',' << rays[i].m() << ',' << num(dfd) << ',' << num(dlin) << ',' << num(rel)
        << "\n";
    }
  }
  json summary{{"rays", rays.size()}, {"worst_rel_diff", jnum(worst)}};
  json params{{"omega", jvec(cfg.omega)},
              {"theta", jvec(cfg.theta)},
              {"m_max", cfg.m_max},
              {"grid_density", cfg.grid_density}};
  write_manifest(dir, cfg, params, summary, json::array({"crosscheck.csv"}));
  return 0;
}

int run_weakndg(const RunConfig& cfg, const Scene& scene, const fs::path& dir) {
  PhasePoint trapped, free_seed;
  if (!axis_seeds(scene, trapped, free_seed))
    fail(Err::invalid_argument, "weakndg needs a scene with a trapping body pair");
  WeakNdgEstimate est =
      weak_nondegeneracy_estimate(scene, trapped, cfg.radius, cfg.samples, cfg.seed, cfg.budget);
  {
    auto f = open_out(dir / "weakndg.csv");
    f << "fraction,ci_halfwidth,successes,samples\n";
    f << num(est.fraction) << ',' << num(est.ci_halfwidth) << ',' << est.successes << ','
      << est.samples << "\n";
  }
  json summary{{"fraction", est.fraction},
               {"ci_halfwidth", est.ci_halfwidth},
               {"ci_excludes_zero", est.fraction - est.ci_halfwidth > 0.0}};
  json params{{"radius", cfg.radius}, {"samples", cfg.samples}, {"budget", cfg.budget}};
  write_manifest(dir, cfg, params, summary, json::array({"weakndg.csv"}));
  return 0;
}

}  // namespace

int run(const RunConfig& cfg) {
  Scene scene = load_scene(cfg.scene_path);
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Err::io, "cannot create output directory: " + dir.string());

  if (cfg.command == "spectrum") return run_spectrum(cfg, scene, dir);
  if (cfg.command == "trapscan") return run_trapscan(cfg, scene, dir);
  if (cfg.command == "validate-sphere") return run_validate_sphere(cfg, scene, dir);
  if (cfg.command == "cross-check") return run_cross_check(cfg, scene, dir);
  if (cfg.command == "weakndg") return run_weakndg(cfg, scene, dir);
  fail(Err::invalid_argument, "unknown command: " + cfg.command);
}

}  // namespace rl
