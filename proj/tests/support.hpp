#pragma once

#include <doctest.h>

#include <random>
#include <string>
#include <utility>

#include "core/rng.hpp"
#include "core/scenetext.hpp"

namespace ts {

inline rl::Scene load(const char* name) {
  return rl::load_scene(std::string(SCENES_DIR) + "/" + name);
}

inline rl::Scene sphere_scene() { return load("sphere_unit.scene"); }
inline rl::Scene two_sphere_scene() { return load("two_spheres.scene"); }
inline rl::Scene ellipsoid_scene() { return load("ellipsoid.scene"); }

// Random direction pair kept away from theta == omega.
inline std::pair<rl::Vec3, rl::Vec3> direction_pair(std::mt19937_64& gen) {
  rl::Vec3 om = rl::rng::unit_vector(gen);
  rl::Vec3 th = rl::rng::unit_vector(gen);
  while ((th - om).norm() < 1e-2) th = rl::rng::unit_vector(gen);
  return {om, th};
}

// Err::ok when f() does not throw, the thrown code otherwise.
template <typename F>
rl::Err error_code(F&& f) {
  try {
    f();
  } catch (const rl::Error& e) {
    return e.code();
  }
  return rl::Err::ok;
}

}  // namespace ts
