#pragma once

#include <string>

#include "geometry.hpp"

namespace rl {

// Scene text format: one key/value pair per line, bodies in blocks.
//
//   # comment
//   rho 3
//   a 4
//   body sphere
//     center -2 0 0
//     radius 1
//   end
//   body ellipsoid
//     center 0 0 0
//     radii 2 1 1
//   end
//
// Throws Error(Err::parse) with a line reference on malformed input and
// Error(Err::validation) when the parsed scene violates the scene invariants.
Scene parse_scene(const std::string& text);

// Inverse of parse_scene; numbers are emitted with enough digits that
// parse_scene(emit_scene(s)) reproduces every field bit-exactly.
std::string emit_scene(const Scene& scene);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

}  // namespace rl
