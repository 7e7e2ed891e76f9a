// Command-line front end. Talks to the library exclusively through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "raylength.h"

namespace {

bool parse_triple(const std::string& text, double out[3]) {
  return std::sscanf(text.c_str(), "%lf,%lf,%lf", &out[0], &out[1], &out[2]) == 3;
}

bool parse_pair(const std::string& text, double& lo, double& hi) {
  return std::sscanf(text.c_str(), "%lf,%lf", &lo, &hi) == 2;
}

int fail_usage(const std::string& msg) {
  std::fprintf(stderr, "{\"error\":\"usage\",\"message\":\"%s\"}\n", msg.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scattering length spectrum toolkit"};
  app.require_subcommand(1);

  rl_run_config cfg;
  rl_run_config_default(&cfg);

  std::string scene_path, out_dir = ".", omega_text, theta_text, band_text, window = "gaussian";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scene", scene_path, "scene file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", cfg.seed, "RNG seed recorded in the manifest");
  };
  auto add_directions = [&](CLI::App* sub) {
    sub->add_option("--omega", omega_text, "incoming direction x,y,z");
    sub->add_option("--theta", theta_text, "outgoing direction x,y,z");
  };

  CLI::App* spectrum = app.add_subcommand("spectrum", "sojourn times and coefficients");
  add_common(spectrum);
  add_directions(spectrum);
  spectrum->add_option("--mmax", cfg.m_max, "max reflections");
  spectrum->add_option("--grid", cfg.grid_density, "shooting grid density");

  CLI::App* trapscan = app.add_subcommand("trapscan", "escape field and trapped-ray sequence");
  add_common(trapscan);
  trapscan->add_option("--budget", cfg.budget, "largest sojourn budget");
  trapscan->add_option("--density", cfg.scan_density, "escape-scan grid density");

  CLI::App* validate = app.add_subcommand("validate-sphere", "wave-oracle peak validation");
  add_common(validate);
  add_directions(validate);
  validate->add_option("--band", band_text, "frequency band lo,hi");
  validate->add_option("--window", window, "band window: gaussian|hann");

  CLI::App* crosschk = app.add_subcommand("cross-check", "FD vs linearized Jacobians");
  add_common(crosschk);
  add_directions(crosschk);
  crosschk->add_option("--mmax", cfg.m_max, "max reflections");
  crosschk->add_option("--grid", cfg.grid_density, "shooting grid density");

  CLI::App* weakndg = app.add_subcommand("weakndg", "trapping weak non-degeneracy estimate");
  add_common(weakndg);
  weakndg->add_option("--radius", cfg.radius, "phase-space neighborhood radius");
  weakndg->add_option("--samples", cfg.samples, "Monte Carlo sample count");
  weakndg->add_option("--budget", cfg.budget, "escape-time budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad usage is exit code 2; --help stays 0
  }

  if (!omega_text.empty() && !parse_triple(omega_text, cfg.omega))
    return fail_usage("--omega expects x,y,z");
  if (!theta_text.empty() && !parse_triple(theta_text, cfg.theta))
    return fail_usage("--theta expects x,y,z");
  if (!band_text.empty() && !parse_pair(band_text, cfg.band_lo, cfg.band_hi))
    return fail_usage("--band expects lo,hi");

  CLI::App* sub = app.get_subcommands().front();
  std::string command = sub->get_name();
  cfg.command = command.c_str();
  cfg.scene_path = scene_path.c_str();
  cfg.out_dir = out_dir.c_str();
  cfg.window = window.c_str();
  if (command == "weakndg" && !weakndg->count("--budget")) cfg.budget = 1000.0;

  rl_status st = rl_run(&cfg);
  if (st != RL_OK) {
    std::fprintf(stderr, "{\"error\":\"%s\",\"message\":\"%s\"}\n", rl_status_name(st),
                 rl_last_error());
    return 1;
  }
  return 0;
}
