#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <string>

#include "ihsim/config.hpp"
#include "ihsim/error.hpp"

using namespace ihsim;

namespace {

const char* kMinimal = R"(
[domain]
box = 0, 0, 0.01, 0.02
workpiece = 0.002, 0.002; 0.008, 0.002; 0.008, 0.008; 0.002, 0.008
coil1 = 0.002, 0.01; 0.008, 0.01; 0.008, 0.012; 0.002, 0.012
)";

std::string with(const std::string& section, const std::string& line) {
  return std::string(kMinimal) + "\n[" + section + "]\n" + line + "\n";
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const RunConfig c = parse_config(kMinimal);
  const RunConfig d;
  CHECK(c.mesh.domain.workpiece.size() == 4);
  CHECK(c.mesh.domain.coils.size() == 1);
  CHECK(c.materials.sigma_coil == d.materials.sigma_coil);
  CHECK(c.thermal.kappa == d.thermal.kappa);
  CHECK(c.kinetics.tau0 == d.kinetics.tau0);
  CHECK(c.time.total == d.time.total);
  CHECK(c.source.f_mf == d.source.f_mf);
  CHECK(c.time.coarse_steps() == static_cast<int>(d.time.total / d.time.coarse_dt + 0.5));
}

TEST_CASE("validation cites the violated clause") {
  const std::string sigma = error_of(with("materials", "sigma_workpiece_z0 = -1"));
  CHECK(sigma.find("sigma_workpiece_z0") != std::string::npos);
  CHECK(sigma.find("assumption (i) conductivity bounds") != std::string::npos);

  const std::string freq = error_of(with("source", "f_mf = 1.0e4\nf_hf = 2.5e4"));
  CHECK(freq.find("f_HF must be an integer multiple of f_MF") != std::string::npos);

  CHECK(error_of(with("materials", "mu_coil = 0")).find("assumption (ii) permeability bounds") != std::string::npos);
  CHECK(error_of(with("source", "amp_mf = inf")).find("assumption (iii) source regularity") != std::string::npos);
  CHECK(error_of(with("phase", "tau0 = 0")).find("assumption (iv) phase kinetics bounds") != std::string::npos);
  CHECK(error_of(with("thermal", "g_ambient = -3")).find("assumption (v) boundary data") != std::string::npos);
  CHECK(error_of(with("thermal", "theta0 = -1")).find("assumption (vi) initial temperature") != std::string::npos);
  CHECK(error_of(with("time", "total = 1.0\ncoarse_dt = 0.3")).find("total") != std::string::npos);
  CHECK(error_of(with("output", "probes = 0.5, 0.5")).find("probes") != std::string::npos);

  // several violations are all listed
  const std::string both = error_of(with("thermal", "theta0 = -1\nkappa = 0"));
  CHECK(both.find("theta0") != std::string::npos);
  CHECK(both.find("kappa") != std::string::npos);
}

TEST_CASE("parse errors carry the line number") {
  CHECK(error_of("[domain]\nbox = 0, 0, 1\n").find("line 2") != std::string::npos);
  const std::string unknown = error_of(with("thermal", "kapa = 3"));
  CHECK(unknown.find("unknown key") != std::string::npos);
  CHECK(unknown.find("kapa") != std::string::npos);
  CHECK(error_of("[nowhere]\nx = 1\n").find("unknown section") != std::string::npos);
  CHECK(error_of("x = 1\n").find("line 1") != std::string::npos);
  CHECK(error_of("[domain\n").find("line 1") != std::string::npos);
  CHECK(error_of(with("materials", "sigma_coil = abc")).find("sigma_coil") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/ihsim.ini"), Error);
  try {
    load_config("/nonexistent/ihsim.ini");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}

TEST_CASE("canonical rendering round-trips") {
  for (const auto& entry : std::filesystem::directory_iterator(IHSIM_SCENARIO_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    const RunConfig c = load_config(entry.path());
    const std::string text = to_ini(c);
    const RunConfig again = parse_config(text);
    CHECK(to_ini(again) == text);
    CHECK(again.mesh.domain.workpiece.size() == c.mesh.domain.workpiece.size());
    CHECK(again.source.power_budget == c.source.power_budget);
    CHECK(again.thermal.g == c.thermal.g);
    CHECK(again.output.regions.size() == c.output.regions.size());
    CHECK(again.output.probes.size() == c.output.probes.size());
  }
}

TEST_CASE("skin depth formula") {
  const double mu0 = 1.25663706212e-6;
  const double d = skin_depth(1.0e4, mu0, 1.0e6);
  CHECK(d == doctest::Approx(std::sqrt(2.0 / (2.0 * 3.14159265358979323846 * 1.0e4 * mu0 * 1.0e6))));
  CHECK(skin_depth(4.0e4, mu0, 1.0e6) == doctest::Approx(d / 2.0));
}
