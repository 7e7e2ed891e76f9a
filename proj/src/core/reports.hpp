#pragma once

#include <cstdint>
#include <string>

#include "common.hpp"

namespace rl {

// Configuration for one reproducible run. Every command writes UTF-8 CSV
// files (header row, then rows; no timestamps, so identical configs produce
// byte-identical files) plus a manifest.json echoing the config, the library
// version, and a summary of the results.
struct RunConfig {
  std::string command;  // spectrum | trapscan | validate-sphere | cross-check | weakndg
  std::string scene_path;
  std::string out_dir = ".";
  Vec3 omega = Vec3(0.0, 0.0, -1.0);
  Vec3 theta = Vec3(0.0, 0.0, 1.0);
  double budget = 320.0;       // trapscan ladder cap / escape budget
  double band_lo = 20.0;       // wave band
  double band_hi = 60.0;
  std::uint64_t seed = 1;
  int m_max = 3;               // spectrum / cross-check reflection cap
  int grid_density = 24;       // shooting grid for ray finding
  int scan_density = 10;       // escape-scan grid (density^2 x density^2 samples)
  int samples = 10000;         // weakndg Monte Carlo size
  double radius = 0.05;        // weakndg neighborhood radius
  std::string window = "gaussian";  // gaussian | hann
};

// Executes the command, writing report files into cfg.out_dir. Returns 0 on
// success; failures surface as Error exceptions for the caller to map.
int run(const RunConfig& cfg);

}  // namespace rl
