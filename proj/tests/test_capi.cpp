#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ihsim/ihsim.h"
#include "json.hpp"

namespace {

const char* kSmall = R"(
[domain]
box = 0, 0, 0.004, 0.02
side_bottom = symmetry
side_right = symmetry
side_top = outer
side_left = symmetry
workpiece = 0, 0; 0.004, 0; 0.004, 0.01; 0, 0.01
coil1 = 0, 0.011; 0.004, 0.011; 0.004, 0.013; 0, 0.013
h = 0.001
h_air = 0.002

[source]
f_mf = 1.0e3
f_hf = 2.0e3
power_budget = 2.0e5

[thermal]
theta0 = 900

[time]
total = 0.03
coarse_dt = 0.01
)";

std::string report_text(ihsim_report_t r) {
  size_t len = 0;
  REQUIRE(ihsim_report_json(r, nullptr, &len) == IHSIM_ERROR_INSUFFICIENT_BUFFER);
  std::string s(len, '\0');
  REQUIRE(ihsim_report_json(r, s.data(), &len) == IHSIM_OK);
  s.resize(len - 1);
  return s;
}

}  // namespace

TEST_CASE("status descriptions and null arguments") {
  CHECK(std::string(ihsim_error_description(IHSIM_OK)) == "ok");
  CHECK(std::string(ihsim_error_description(IHSIM_ERROR_PARSE)) == "parse error");
  CHECK(std::string(ihsim_error_description(12345)) == "unknown error");
  CHECK(ihsim_config_parse(nullptr, kSmall) == IHSIM_ERROR_NULL_POINTER);
  CHECK(std::string(ihsim_last_error()).find("null") != std::string::npos);
  ihsim_config_t cfg = nullptr;
  CHECK(ihsim_config_parse(&cfg, nullptr) == IHSIM_ERROR_NULL_POINTER);
  CHECK(ihsim_simulation_create(nullptr, nullptr) == IHSIM_ERROR_NULL_POINTER);
  CHECK(ihsim_verify(nullptr) == IHSIM_ERROR_NULL_POINTER);
  CHECK(ihsim_config_destroy(nullptr) == IHSIM_OK);
  CHECK(ihsim_simulation_destroy(nullptr) == IHSIM_OK);
  CHECK(ihsim_report_destroy(nullptr) == IHSIM_OK);
}

TEST_CASE("config errors map to status codes") {
  ihsim_config_t cfg = nullptr;
  CHECK(ihsim_config_parse(&cfg, "[domain]\nbox = 1, 2\n") == IHSIM_ERROR_PARSE);
  CHECK(std::string(ihsim_last_error()).find("line 2") != std::string::npos);
  CHECK(cfg == nullptr);
  const std::string bad = std::string(kSmall) + "[materials]\nsigma_workpiece_z0 = -1\n";
  CHECK(ihsim_config_parse(&cfg, bad.c_str()) == IHSIM_ERROR_VALIDATION);
  CHECK(std::string(ihsim_last_error()).find("assumption (i) conductivity bounds") != std::string::npos);
  CHECK(ihsim_config_load(&cfg, "/nonexistent/x.ini") == IHSIM_ERROR_IO);
  REQUIRE(ihsim_config_parse(&cfg, kSmall) == IHSIM_OK);
  CHECK(std::string(ihsim_last_error()).empty());
  CHECK(ihsim_config_destroy(cfg) == IHSIM_OK);
}

TEST_CASE("shipped scenarios load") {
  const char* dir = std::getenv("IHSIM_SCENARIO_DIR");
  REQUIRE(dir != nullptr);
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".ini") continue;
    ihsim_config_t cfg = nullptr;
    CAPTURE(e.path().string());
    CHECK(ihsim_config_load(&cfg, e.path().c_str()) == IHSIM_OK);
    ihsim_config_destroy(cfg);
    ++count;
  }
  CHECK(count >= 2);
}

TEST_CASE("stepping a simulation") {
  ihsim_config_t cfg = nullptr;
  REQUIRE(ihsim_config_parse(&cfg, kSmall) == IHSIM_OK);
  ihsim_simulation_t sim = nullptr;
  REQUIRE(ihsim_simulation_create(&sim, cfg) == IHSIM_OK);
  ihsim_config_destroy(cfg);  // the simulation keeps its own copy

  double t = -1.0;
  int step = -1, total = -1;
  REQUIRE(ihsim_simulation_time(sim, &t, &step, &total) == IHSIM_OK);
  CHECK(t == 0.0);
  CHECK(step == 0);
  CHECK(total == 3);

  size_t len = 0;
  REQUIRE(ihsim_simulation_field(sim, IHSIM_FIELD_THETA, nullptr, &len) == IHSIM_OK);
  REQUIRE(len > 0);
  std::vector<double> theta(len);
  size_t small = 1;
  CHECK(ihsim_simulation_field(sim, IHSIM_FIELD_THETA, theta.data(), &small) == IHSIM_ERROR_INSUFFICIENT_BUFFER);
  CHECK(small == len);
  REQUIRE(ihsim_simulation_field(sim, IHSIM_FIELD_THETA, theta.data(), &len) == IHSIM_OK);
  for (double v : theta) CHECK(v == 900.0);
  CHECK(ihsim_simulation_field(sim, 99, nullptr, &len) == IHSIM_ERROR_INVALID_ARGUMENT);

  while (step < total) {
    REQUIRE(ihsim_simulation_step(sim) == IHSIM_OK);
    ihsim_simulation_time(sim, &t, &step, nullptr);
  }
  CHECK(t == doctest::Approx(0.03));
  CHECK(ihsim_simulation_step(sim) == IHSIM_ERROR_INVALID_ARGUMENT);
  REQUIRE(ihsim_simulation_field(sim, IHSIM_FIELD_THETA, theta.data(), &len) == IHSIM_OK);
  for (double v : theta) CHECK(v > 900.0);

  ihsim_report_t rep = nullptr;
  REQUIRE(ihsim_simulation_summary(sim, &rep) == IHSIM_OK);
  int passed = 0;
  ihsim_report_passed(rep, &passed);
  CHECK(passed == 1);
  const auto j = nlohmann::json::parse(report_text(rep));
  CHECK(j["coarse_steps"] == 3);
  ihsim_report_destroy(rep);
  ihsim_simulation_destroy(sim);
}

TEST_CASE("run writes outputs") {
  ihsim_config_t cfg = nullptr;
  REQUIRE(ihsim_config_parse(&cfg, kSmall) == IHSIM_OK);
  ihsim_simulation_t sim = nullptr;
  REQUIRE(ihsim_simulation_create(&sim, cfg) == IHSIM_OK);
  const auto dir = std::filesystem::temp_directory_path() / "ihsim_test_capi";
  std::filesystem::remove_all(dir);
  CHECK(ihsim_simulation_run(sim, dir.c_str(), 1) == IHSIM_OK);
  CHECK(std::filesystem::exists(dir / "timeseries.csv"));
  CHECK(std::filesystem::exists(dir / "summary.json"));
  ihsim_simulation_destroy(sim);
  ihsim_config_destroy(cfg);
  std::filesystem::remove_all(dir);
}
