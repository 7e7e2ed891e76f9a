#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rl {

inline constexpr const char* kVersion = "0.1.0";

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

// Error codes shared with the C API (values must stay in sync with raylength.h).
enum class Err : int {
  ok = 0,
  invalid_argument,
  parse,
  validation,
  io,
  not_on_surface,
  degenerate_segment,
  theta_equals_omega,
  no_convergence,
  obstructed_path,
  tangent_ray,
  wrong_reflection_count,
  tangency_encountered,
  singular_hit,
  not_applicable,
  degenerate_ray,
  grazing_exit,
  singular_hessian,
  truncation_not_converged,
  recurrence_overflow,
  band_too_narrow,
  seed_not_trapped,
  seed_not_free,
  refinement_failed,
  internal,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

// Default tolerances. Single source of truth for the numerical contracts.
namespace tol {
inline constexpr double surface = 1e-9;         // |f(x)| acceptance for on-surface points
inline constexpr double tangency = 1e-7;        // |<d,nu>| below this flags a grazing hit
inline constexpr double residual = 1e-9;        // reflection-law defect of a returned ray
inline constexpr double newton_grad = 1e-12;    // Fermat gradient sup-norm target
inline constexpr double merge = 1e-6;           // duplicate rays: max point distance
inline constexpr double min_gap = 1e-6;         // sojourn separation threshold
inline constexpr double nondegenerate = 1e-8;   // |det dJ| threshold
inline constexpr double hit_step = 1e-9;        // minimum advance for first_hit roots
}  // namespace tol

}  // namespace rl
