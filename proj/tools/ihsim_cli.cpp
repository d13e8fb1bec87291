// Command-line front end over the C API.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ihsim/ihsim.h"

namespace {

constexpr double kMu0 = 1.25663706212e-6;

int report_error(int status) {
  std::fprintf(stderr, "error: %s: %s\n", ihsim_error_description(status), ihsim_last_error());
  return 2;
}

// Prints the report JSON and returns the process exit code.
int emit(ihsim_report_t report) {
  size_t len = 0;
  ihsim_report_json(report, nullptr, &len);
  std::string text(len, '\0');
  if (int rc = ihsim_report_json(report, text.data(), &len); rc != IHSIM_OK) return report_error(rc);
  text.resize(len - 1);
  std::printf("%s\n", text.c_str());
  int passed = 0;
  ihsim_report_passed(report, &passed);
  ihsim_report_destroy(report);
  return passed ? 0 : 1;
}

struct ConfigHandle {
  ihsim_config_t cfg = nullptr;
  ~ConfigHandle() { ihsim_config_destroy(cfg); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ihsim: multifrequency induction hardening simulator"};
  app.require_subcommand(1);
  bool quiet = false;
  bool seedless = false;
  app.add_flag("--quiet", quiet, "Suppress progress output");
  app.add_flag("--seedless", seedless, "Accepted for compatibility; the simulator uses no random numbers");

  std::string config;
  std::string out;

  CLI::App* run = app.add_subcommand("run", "Run a coupled simulation and write CSV/VTK/JSON outputs");
  run->add_option("--config", config, "Scenario INI file")->required();
  run->add_option("--out", out, "Output directory")->required();

  CLI::App* verify = app.add_subcommand("verify", "Run the built-in verification battery");

  double frequency = 1.0e4;
  double sigma = 1.0e6;
  double mu = kMu0;
  CLI::App* skin = app.add_subcommand("skin-depth", "Fitted versus analytic skin depth on a conducting strip");
  skin->add_option("--frequency", frequency, "Source frequency in Hz")->capture_default_str();
  skin->add_option("--sigma", sigma, "Conductivity in S/m")->capture_default_str();
  skin->add_option("--mu", mu, "Permeability in H/m")->capture_default_str();

  std::vector<double> eps{1e-2, 1e-3};
  bool theta0 = false;
  CLI::App* stab = app.add_subcommand("stability-probe", "Perturbation sensitivity of the final state");
  stab->add_option("--config", config, "Scenario INI file")->required();
  stab->add_option("--eps", eps, "Perturbation sizes")->capture_default_str();
  stab->add_flag("--theta0", theta0, "Perturb the initial temperature instead of the source amplitude");

  CLI::App* cmp = app.add_subcommand("compare-freq", "MF-only, HF-only and MF+HF runs on one geometry");
  cmp->add_option("--config", config, "Scenario INI file")->required();

  for (CLI::App* sub : {run, verify, skin, stab, cmp}) {
    sub->add_flag("--quiet", quiet, "Suppress progress output");
    sub->add_flag("--seedless", seedless, "Accepted for compatibility; the simulator uses no random numbers");
  }

  CLI11_PARSE(app, argc, argv);

  ConfigHandle cfg;
  if (!config.empty()) {
    if (int rc = ihsim_config_load(&cfg.cfg, config.c_str()); rc != IHSIM_OK) return report_error(rc);
  }

  ihsim_report_t report = nullptr;
  if (*run) {
    ihsim_simulation_t sim = nullptr;
    if (int rc = ihsim_simulation_create(&sim, cfg.cfg); rc != IHSIM_OK) return report_error(rc);
    const int rc = ihsim_simulation_run(sim, out.c_str(), quiet ? 1 : 0);
    ihsim_simulation_destroy(sim);
    if (rc == IHSIM_ERROR_CHECK_FAILED) {
      std::fprintf(stderr, "%s\n", ihsim_last_error());
      return 1;
    }
    if (rc != IHSIM_OK) return report_error(rc);
    if (!quiet) std::fprintf(stderr, "outputs written to %s\n", out.c_str());
    return 0;
  }
  int rc = IHSIM_OK;
  if (*verify) rc = ihsim_verify(&report);
  if (*skin) rc = ihsim_skin_depth(&report, frequency, sigma, mu);
  if (*stab) rc = ihsim_stability_probe(&report, cfg.cfg, eps.data(), eps.size(), theta0 ? 1 : 0);
  if (*cmp) rc = ihsim_compare_freq(&report, cfg.cfg, quiet ? 1 : 0);
  if (rc != IHSIM_OK) return report_error(rc);
  return emit(report);
}
