/* raylength: scattering length spectra of smooth obstacles.
 *
 * C interface over the core library: opaque handles, integer status codes,
 * no exceptions across the boundary. Every fallible call returns rl_status;
 * on failure rl_last_error() holds a thread-local description. */
#ifndef RAYLENGTH_H
#define RAYLENGTH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Mirrors the core error codes one-to-one (values must stay in sync). */
typedef enum rl_status {
  RL_OK = 0,
  RL_ERR_INVALID_ARGUMENT,
  RL_ERR_PARSE,
  RL_ERR_VALIDATION,
  RL_ERR_IO,
  RL_ERR_NOT_ON_SURFACE,
  RL_ERR_DEGENERATE_SEGMENT,
  RL_ERR_THETA_EQUALS_OMEGA,
  RL_ERR_NO_CONVERGENCE,
  RL_ERR_OBSTRUCTED_PATH,
  RL_ERR_TANGENT_RAY,
  RL_ERR_WRONG_REFLECTION_COUNT,
  RL_ERR_TANGENCY_ENCOUNTERED,
  RL_ERR_SINGULAR_HIT,
  RL_ERR_NOT_APPLICABLE,
  RL_ERR_DEGENERATE_RAY,
  RL_ERR_GRAZING_EXIT,
  RL_ERR_SINGULAR_HESSIAN,
  RL_ERR_TRUNCATION_NOT_CONVERGED,
  RL_ERR_RECURRENCE_OVERFLOW,
  RL_ERR_BAND_TOO_NARROW,
  RL_ERR_SEED_NOT_TRAPPED,
  RL_ERR_SEED_NOT_FREE,
  RL_ERR_REFINEMENT_FAILED,
  RL_ERR_INTERNAL,
  RL_ERR_UNKNOWN /* unexpected exception type crossed the core boundary */
} rl_status;

/* Library semantic version, e.g. "0.1.0". */
const char* rl_version(void);

/* Thread-local message describing the most recent failure in this thread. */
const char* rl_last_error(void);

/* Stable identifier for a status code ("ok", "parse", ...). */
const char* rl_status_name(rl_status status);

/* ---- Scenes ------------------------------------------------------------ */

typedef struct rl_scene rl_scene;

rl_status rl_scene_load(const char* path, rl_scene** out);
rl_status rl_scene_parse(const char* text, rl_scene** out);
rl_status rl_scene_write(const rl_scene* scene, const char* path);

/* Serializes the scene. Writes up to cap bytes (including the terminating
 * NUL) into buf; *needed receives the full size including the NUL. Returns
 * RL_OK even when truncated, so call with cap 0 to size a buffer. */
rl_status rl_scene_emit(const rl_scene* scene, char* buf, size_t cap, size_t* needed);

rl_status rl_scene_info(const rl_scene* scene, int* n_bodies, double* rho, double* a);

/* kind: 0 = sphere, 1 = ellipsoid. center and radii may be NULL. */
rl_status rl_scene_body(const rl_scene* scene, int index, int* kind, double center[3],
                        double radii[3]);

void rl_scene_free(rl_scene* scene);

/* ---- Runs -------------------------------------------------------------- */

/* One reproducible command invocation. Initialize with
 * rl_run_config_default, then override fields. Commands: "spectrum",
 * "trapscan", "validate-sphere", "cross-check", "weakndg". Outputs are CSV
 * files plus manifest.json in out_dir; identical configs produce
 * byte-identical CSV files. */
typedef struct rl_run_config {
  const char* command;
  const char* scene_path;
  const char* out_dir;
  double omega[3];
  double theta[3];
  double budget;
  double band_lo;
  double band_hi;
  uint64_t seed;
  int m_max;
  int grid_density;
  int scan_density;
  int samples;
  double radius;
  const char* window; /* "gaussian" or "hann" */
} rl_run_config;

void rl_run_config_default(rl_run_config* cfg);

rl_status rl_run(const rl_run_config* cfg);

#ifdef __cplusplus
}
#endif

#endif /* RAYLENGTH_H */
