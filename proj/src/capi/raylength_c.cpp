#include "raylength.h"

#include <algorithm>
#include <cstring>
#include <string>

#include "core/reports.hpp"
#include "core/scenetext.hpp"

namespace {

thread_local std::string g_last_error;

rl_status to_status(rl::Err code) {
  // The enums mirror each other value for value.
  return static_cast<rl_status>(static_cast<int>(code));
}

template <typename F>
rl_status guarded(F&& f) {
  try {
    f();
    return RL_OK;
  } catch (const rl::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RL_ERR_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown exception";
    return RL_ERR_UNKNOWN;
  }
}

rl_status bad_argument(const char* what) {
  g_last_error = what;
  return RL_ERR_INVALID_ARGUMENT;
}

}  // namespace

struct rl_scene {
  rl::Scene scene;
};

extern "C" {

const char* rl_version(void) { return rl::kVersion; }

const char* rl_last_error(void) { return g_last_error.c_str(); }

const char* rl_status_name(rl_status status) {
  switch (status) {
    case RL_OK: return "ok";
    case RL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RL_ERR_PARSE: return "parse";
    case RL_ERR_VALIDATION: return "validation";
    case RL_ERR_IO: return "io";
    case RL_ERR_NOT_ON_SURFACE: return "not_on_surface";
    case RL_ERR_DEGENERATE_SEGMENT: return "degenerate_segment";
    case RL_ERR_THETA_EQUALS_OMEGA: return "theta_equals_omega";
    case RL_ERR_NO_CONVERGENCE: return "no_convergence";
    case RL_ERR_OBSTRUCTED_PATH: return "obstructed_path";
    case RL_ERR_TANGENT_RAY: return "tangent_ray";
    case RL_ERR_WRONG_REFLECTION_COUNT: return "wrong_reflection_count";
    case RL_ERR_TANGENCY_ENCOUNTERED: return "tangency_encountered";
    case RL_ERR_SINGULAR_HIT: return "singular_hit";
    case RL_ERR_NOT_APPLICABLE: return "not_applicable";
    case RL_ERR_DEGENERATE_RAY: return "degenerate_ray";
    case RL_ERR_GRAZING_EXIT: return "grazing_exit";
    case RL_ERR_SINGULAR_HESSIAN: return "singular_hessian";
    case RL_ERR_TRUNCATION_NOT_CONVERGED: return "truncation_not_converged";
    case RL_ERR_RECURRENCE_OVERFLOW: return "recurrence_overflow";
    case RL_ERR_BAND_TOO_NARROW: return "band_too_narrow";
    case RL_ERR_SEED_NOT_TRAPPED: return "seed_not_trapped";
    case RL_ERR_SEED_NOT_FREE: return "seed_not_free";
    case RL_ERR_REFINEMENT_FAILED: return "refinement_failed";
    case RL_ERR_INTERNAL: return "internal";
    case RL_ERR_UNKNOWN: return "unknown";
  }
  return "unknown";
}

rl_status rl_scene_load(const char* path, rl_scene** out) {
  if (!path || !out) return bad_argument("path and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new rl_scene{rl::load_scene(path)}; });
}

rl_status rl_scene_parse(const char* text, rl_scene** out) {
  if (!text || !out) return bad_argument("text and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new rl_scene{rl::parse_scene(text)}; });
}

rl_status rl_scene_write(const rl_scene* scene, const char* path) {
  if (!scene || !path) return bad_argument("scene and path must be non-null");
  return guarded([&] { rl::save_scene(scene->scene, path); });
}

rl_status rl_scene_emit(const rl_scene* scene, char* buf, size_t cap, size_t* needed) {
  if (!scene || !needed) return bad_argument("scene and needed must be non-null");
  return guarded([&] {
    std::string text = rl::emit_scene(scene->scene);
    *needed = text.size() + 1;
    if (buf && cap > 0) {
      size_t n = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), n);
      buf[n] = '\0';
    }
  });
}

rl_status rl_scene_info(const rl_scene* scene, int* n_bodies, double* rho, double* a) {
  if (!scene) return bad_argument("scene must be non-null");
  if (n_bodies) *n_bodies = static_cast<int>(scene->scene.bodies.size());
  if (rho) *rho = scene->scene.rho;
  if (a) *a = scene->scene.a;
  return RL_OK;
}

rl_status rl_scene_body(const rl_scene* scene, int index, int* kind, double center[3],
                        double radii[3]) {
  if (!scene) return bad_argument("scene must be non-null");
  if (index < 0 || index >= static_cast<int>(scene->scene.bodies.size()))
    return bad_argument("body index out of range");
  const rl::Body& b = scene->scene.bodies[static_cast<size_t>(index)];
  if (kind) *kind = (b.kind == rl::BodyKind::sphere) ? 0 : 1;
  for (int i = 0; i < 3; ++i) {
    if (center) center[i] = b.center[i];
    if (radii) radii[i] = b.radii[i];
  }
  return RL_OK;
}

void rl_scene_free(rl_scene* scene) { delete scene; }

void rl_run_config_default(rl_run_config* cfg) {
  if (!cfg) return;
  std::memset(cfg, 0, sizeof(*cfg));
  cfg->command = "";
  cfg->scene_path = "";
  cfg->out_dir = ".";
  cfg->omega[0] = 0.0;
  cfg->omega[1] = 0.0;
  cfg->omega[2] = -1.0;
  cfg->theta[0] = 0.0;
  cfg->theta[1] = 0.0;
  cfg->theta[2] = 1.0;
  cfg->budget = 320.0;
  cfg->band_lo = 20.0;
  cfg->band_hi = 60.0;
  cfg->seed = 1;
  cfg->m_max = 3;
  cfg->grid_density = 24;
  cfg->scan_density = 10;
  cfg->samples = 10000;
  cfg->radius = 0.05;
  cfg->window = "gaussian";
}

rl_status rl_run(const rl_run_config* cfg) {
  if (!cfg || !cfg->command || !cfg->scene_path)
    return bad_argument("config with command and scene_path required");
  return guarded([&] {
    rl::RunConfig rc;
    rc.command = cfg->command;
    rc.scene_path = cfg->scene_path;
    rc.out_dir = cfg->out_dir ? cfg->out_dir : ".";
    rc.omega = rl::Vec3(cfg->omega[0], cfg->omega[1], cfg->omega[2]);
    rc.theta = rl::Vec3(cfg->theta[0], cfg->theta[1], cfg->theta[2]);
    rc.budget = cfg->budget;
    rc.band_lo = cfg->band_lo;
    rc.band_hi = cfg->band_hi;
    rc.seed = cfg->seed;
    rc.m_max = cfg->m_max;
    rc.grid_density = cfg->grid_density;
    rc.scan_density = cfg->scan_density;
    rc.samples = cfg->samples;
    rc.radius = cfg->radius;
    rc.window = cfg->window ? cfg->window : "gaussian";
    rl::run(rc);
  });
}

}  // extern "C"
