#include "scenetext.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace rl {

namespace {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int n = 0;
  while (std::getline(in, raw)) {
    ++n;
    if (auto pos = raw.find('#'); pos != std::string::npos) raw.erase(pos);
    std::istringstream ls(raw);
    Line line;
    line.number = n;
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
  fail(Err::parse, "line " + std::to_string(line) + ": " + what);
}

double parse_number(const Line& line, const std::string& tok) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) parse_fail(line.number, "trailing characters in number '" + tok + "'");
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    parse_fail(line.number, "expected a number, got '" + tok + "'");
  }
}

Vec3 parse_vec3(const Line& line, size_t from) {
  if (line.tokens.size() != from + 3)
    parse_fail(line.number, "expected three numbers after '" + line.tokens[0] + "'");
  return Vec3(parse_number(line, line.tokens[from]), parse_number(line, line.tokens[from + 1]),
              parse_number(line, line.tokens[from + 2]));
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Scene parse_scene(const std::string& text) {
  Scene scene;
  bool have_rho = false, have_a = false;
  auto lines = tokenize(text);
  size_t i = 0;
  while (i < lines.size()) {
    const Line& line = lines[i];
    const std::string& key = line.tokens[0];
    if (key == "rho" || key == "a") {
      if (line.tokens.size() != 2) parse_fail(line.number, "expected one number after '" + key + "'");
      double v = parse_number(line, line.tokens[1]);
      (key == "rho" ? scene.rho : scene.a) = v;
      (key == "rho" ? have_rho : have_a) = true;
      ++i;
    } else if (key == "body") {
      if (line.tokens.size() != 2) parse_fail(line.number, "expected a body kind after 'body'");
      Body body;
      if (line.tokens[1] == "sphere")
        body.kind = BodyKind::sphere;
      else if (line.tokens[1] == "ellipsoid")
        body.kind = BodyKind::ellipsoid;
      else
        parse_fail(line.number, "unknown body kind '" + line.tokens[1] + "'");
      ++i;
      bool have_center = false, have_size = false, closed = false;
      while (i < lines.size()) {
        const Line& bl = lines[i];
        const std::string& bk = bl.tokens[0];
        if (bk == "end") {
          if (bl.tokens.size() != 1) parse_fail(bl.number, "'end' takes no arguments");
          closed = true;
          ++i;
          break;
        } else if (bk == "center") {
          body.center = parse_vec3(bl, 1);
          have_center = true;
          ++i;
        } else if (bk == "radius") {
          if (body.kind != BodyKind::sphere) parse_fail(bl.number, "'radius' is for spheres");
          if (bl.tokens.size() != 2) parse_fail(bl.number, "expected one number after 'radius'");
          double r = parse_number(bl, bl.tokens[1]);
          body.radii = Vec3(r, r, r);
          have_size = true;
          ++i;
        } else if (bk == "radii") {
          if (body.kind != BodyKind::ellipsoid) parse_fail(bl.number, "'radii' is for ellipsoids");
          body.radii = parse_vec3(bl, 1);
          have_size = true;
          ++i;
        } else {
          parse_fail(bl.number, "unknown body key '" + bk + "'");
        }
      }
      if (!closed) parse_fail(lines.back().number, "body block without 'end'");
      if (!have_center) parse_fail(line.number, "body block missing 'center'");
      if (!have_size)
        parse_fail(line.number, body.kind == BodyKind::sphere ? "body block missing 'radius'"
                                                              : "body block missing 'radii'");
      scene.bodies.push_back(body);
    } else {
      parse_fail(line.number, "unknown key '" + key + "'");
    }
  }
  if (!have_rho) fail(Err::parse, "scene is missing 'rho'");
  if (!have_a) fail(Err::parse, "scene is missing 'a'");
  scene.validate();
  return scene;
}

std::string emit_scene(const Scene& scene) {
  std::ostringstream out;
  out << "rho " << format_number(scene.rho) << "\n";
  out << "a " << format_number(scene.a) << "\n";
  for (const Body& b : scene.bodies) {
    out << "body " << (b.kind == BodyKind::sphere ? "sphere" : "ellipsoid") << "\n";
    out << "  center " << format_number(b.center.x()) << " " << format_number(b.center.y()) << " "
        << format_number(b.center.z()) << "\n";
    if (b.kind == BodyKind::sphere)
      out << "  radius " << format_number(b.radii.x()) << "\n";
    else
      out << "  radii " << format_number(b.radii.x()) << " " << format_number(b.radii.y()) << " "
          << format_number(b.radii.z()) << "\n";
    out << "end\n";
  }
  return out.str();
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::io, "cannot open scene file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

void save_scene(const Scene& scene, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Err::io, "cannot write scene file '" + path + "'");
  out << emit_scene(scene);
}

}  // namespace rl
