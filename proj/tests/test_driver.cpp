#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ihsim/driver.hpp"
#include "ihsim/eddy.hpp"
#include "ihsim/error.hpp"
#include "ihsim/output.hpp"
#include "ihsim/phase.hpp"
#include "json.hpp"

using namespace ihsim;

namespace {

// Low-frequency strip: the field penetrates the whole section, so a few
// coarse steps run in well under a second.
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
amp_mf = 1
amp_hf = 1
power_budget = 2.0e5
hf_power_fraction = 0.5

[thermal]
theta0 = 900
eta = 20
g_ambient = 5863

[phase]
tau0 = 0.02

[time]
total = 0.05
coarse_dt = 0.01

[output]
probes = 0.002, 0.0099; 0.002, 0.005
regions = surface: 0, 0.008, 0.004, 0.01; core: 0, 0, 0.004, 0.005
snapshot_every = 2
)";

RunConfig small(const std::string& extra = "") { return parse_config(std::string(kSmall) + extra); }

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("one coarse step equals the manual composition") {
  Simulation sim(small());
  const RunConfig& c = sim.config();
  const Mesh& mesh = sim.mesh();
  const Submesh& sub = sim.workpiece();
  const SimulationState before = sim.state();
  const std::vector<double> guess = sim.em_guess();

  const std::vector<double> zf = sub.prolong_field(before.z, std::vector<double>(mesh.num_vertices(), 0.0));
  const CoefficientField sigma = sigma_field(c.materials, mesh, zf);
  const CoefficientField inv_mu = inv_mu_field(c.materials, mesh, zf);
  const EddyOperators ops = assemble_eddy(mesh, sigma, inv_mu, source_density(c, mesh));
  const PeriodicSolveResult per = run_to_periodic(guess, sim.waveform(), ops, mesh, sim.fine_dt(), sim.window(),
                                                  c.time.periodic_tol, c.time.max_windows, c.time.solver_tol);
  const std::vector<double> q_full = averaged_joule(per, mesh, sigma);
  std::vector<double> q(sub.mesh.num_triangles());
  for (std::size_t t = 0; t < q.size(); ++t) q[t] = q_full[sub.parent_triangle[t]];
  const std::vector<double> z_next = step_phase(before.z, before.theta, c.time.coarse_dt, c.kinetics);
  const std::vector<double> theta_next =
      step_heat(sub.mesh, before.theta, c.time.coarse_dt, q, before.z, z_next, c.kinetics, c.thermal);

  sim.step();
  const SimulationState& after = sim.state();
  CHECK(after.t == c.time.coarse_dt);
  CHECK(after.a == per.samples.back());
  CHECK(after.joule == q);
  CHECK(after.z == z_next);
  CHECK(after.theta == theta_next);
}

TEST_CASE("loop identities") {
  SUBCASE("zero heating time") {
    Simulation sim(small("[time]\ntotal = 0\n"));
    run_simulation(sim);
    CHECK(sim.finished());
    CHECK(sim.state().step == 0);
    CHECK(sim.series().rows.size() == 1);
    for (double v : sim.state().theta) CHECK(v == 900.0);
  }
  SUBCASE("two steps") {
    const RunConfig c = small("[time]\ntotal = 0.02\n");
    Simulation looped(c);
    run_simulation(looped);
    Simulation manual(c);
    manual.step();
    manual.step();
    CHECK(manual.finished());
    CHECK(looped.series().rows == manual.series().rows);
    CHECK(looped.state().theta == manual.state().theta);
    CHECK(looped.state().a == manual.state().a);
    CHECK_THROWS_AS(manual.step(), Error);
  }
}

TEST_CASE("trivial equilibrium") {
  const RunConfig c = small("[source]\npower_budget = 0\namp_mf = 0\namp_hf = 0\n[thermal]\ntheta0 = 293.15\n");
  REQUIRE(c.thermal.g == doctest::Approx(c.thermal.eta * 293.15).epsilon(1e-3));
  RunConfig exact = c;
  exact.thermal.g = exact.thermal.eta * exact.thermal.theta0;
  Simulation sim(exact);
  run_simulation(sim);
  for (double v : sim.state().a) CHECK(v == 0.0);
  for (double v : sim.state().z) CHECK(v == 0.0);
  for (double v : sim.state().theta) CHECK(std::abs(v - 293.15) <= 1e-8);
  CHECK(sim.state().t == doctest::Approx(0.05));
}

TEST_CASE("below the austenitization start nothing transforms") {
  Simulation sim(small("[thermal]\ntheta0 = 293.15\n[source]\npower_budget = 1.0e3\n"));
  run_simulation(sim);
  double max_theta = 0.0;
  for (double v : sim.state().theta) max_theta = std::max(max_theta, v);
  REQUIRE(max_theta < sim.config().kinetics.austenite_start);
  for (double v : sim.state().z) CHECK(v == 0.0);
}

TEST_CASE("heating run keeps the invariants") {
  Simulation sim(small());
  run_simulation(sim);
  const RunAudit& a = sim.audit();
  CHECK(a.min_theta >= 0.0);
  CHECK(a.min_z >= 0.0);
  CHECK(a.max_z < 1.0);
  CHECK(a.max_z > 0.0);
  CHECK(a.min_z_increment >= 0.0);
  CHECK(a.min_joule >= -1e-12);
  CHECK(a.min_fourier >= -1e-12);
  CHECK(a.min_phase >= -1e-12);
  CHECK(a.hardened_set_monotone);
  CHECK(a.periodic_failures == 0);
  const auto& rows = sim.series().rows;
  CHECK(rows.size() == static_cast<std::size_t>(sim.steps_total()) + 1);
  for (std::size_t r = 1; r < rows.size(); ++r) CHECK(rows[r][0] > rows[r - 1][0]);
  // power calibration holds for the first step
  CHECK(rows[1][sim.series().columns.size() - 9] == doctest::Approx(2.0e5).epsilon(0.02));
}

TEST_CASE("determinism") {
  const RunConfig c = small();
  Simulation a(c), b(c);
  run_simulation(a);
  run_simulation(b);
  CHECK(a.series().rows == b.series().rows);
  CHECK(a.state().theta == b.state().theta);

  const auto root = std::filesystem::temp_directory_path() / "ihsim_test_driver";
  std::filesystem::remove_all(root);
  Simulation x(c), y(c);
  run_to_directory(x, root / "x");
  run_to_directory(y, root / "y");
  int files = 0;
  for (const auto& e : std::filesystem::directory_iterator(root / "x")) {
    CAPTURE(e.path().string());
    CHECK(slurp(e.path()) == slurp(root / "y" / e.path().filename()));
    ++files;
  }
  // csv, summary, and workpiece/domain snapshots at steps 0, 2, 4, 5
  CHECK(files == 2 + 2 * 4);
  std::ifstream csv(root / "x" / "timeseries.csv");
  const TimeSeries ts = read_timeseries_csv(csv);
  CHECK(ts.rows.size() == 6);
  CHECK(ts.columns == x.series().columns);
  const auto summary = nlohmann::json::parse(slurp(root / "x" / "summary.json"));
  CHECK(summary["coarse_steps"] == 5);
  CHECK(summary["bounds_pass"] == true);
  CHECK(summary["dissipation_pass"] == true);
  std::filesystem::remove_all(root);
}

TEST_CASE("warm start does not change the periodic state") {
  Simulation sim(small());
  sim.step();
  const RunConfig& c = sim.config();
  const Mesh& mesh = sim.mesh();
  const std::vector<double> zf = sim.z_full();
  const CoefficientField sigma = sigma_field(c.materials, mesh, zf);
  const EddyOperators ops =
      assemble_eddy(mesh, sigma, inv_mu_field(c.materials, mesh, zf), source_density(c, mesh));
  const std::vector<double> zero(mesh.num_vertices(), 0.0);
  const PeriodicSolveResult cold = run_to_periodic(zero, sim.waveform(), ops, mesh, sim.fine_dt(), sim.window(),
                                                   c.time.periodic_tol, c.time.max_windows, c.time.solver_tol);
  const PeriodicSolveResult warm = run_to_periodic(sim.em_guess(), sim.waveform(), ops, mesh, sim.fine_dt(),
                                                   sim.window(), c.time.periodic_tol, c.time.max_windows,
                                                   c.time.solver_tol);
  REQUIRE(cold.converged);
  REQUIRE(warm.converged);
  CHECK(warm.windows <= cold.windows);
  std::vector<double> wa, ca;
  for (std::size_t k = 0; k < cold.samples.size(); ++k) {
    wa.insert(wa.end(), warm.samples[k].begin(), warm.samples[k].end());
    ca.insert(ca.end(), cold.samples[k].begin(), cold.samples[k].end());
  }
  CHECK(rel_l2(wa, ca) <= c.time.periodic_tol);
}

TEST_CASE("stability probe") {
  const RunConfig c = small("[time]\ntotal = 0.03\n");
  Simulation a(c), b(c);
  run_simulation(a);
  run_simulation(b);
  CHECK(stability_distance(a, b, 0.0) == 0.0);
  CHECK(stability_distance(a, b, 1e-3) == 0.0);

  // low amplitude keeps the problem in its linear regime
  const StabilityReport r = stability_probe(small("[time]\ntotal = 0.03\n[thermal]\ntheta0 = 293.15\n"), {1e-2});
  REQUIRE(r.entries.size() == 1);
  CHECK(r.entries[0].d_eps > 0.0);
  CHECK(std::abs(r.entries[0].ratio - 1.0) <= 0.25);
  CHECK(r.pass);

  const RunConfig cool = small("[source]\npower_budget = 0\namp_mf = 0\namp_hf = 0\n[thermal]\ntheta0 = 500\n");
  Simulation base(cool), shifted(cool, Perturbation{1.0, 1.0});
  run_simulation(base);
  run_simulation(shifted);
  for (std::size_t i = 0; i < base.state().z.size(); ++i) CHECK(shifted.state().z[i] == 0.0);
  for (double v : shifted.state().a) CHECK(v == 0.0);
  double max_shift = 0.0;
  for (std::size_t i = 0; i < base.state().theta.size(); ++i) {
    max_shift = std::max(max_shift, std::abs(shifted.state().theta[i] - base.state().theta[i]));
  }
  CHECK(max_shift > 0.0);
  CHECK(max_shift < 1.0);
  CHECK_THROWS_AS(stability_probe(c, {}), Error);
  CHECK_THROWS_AS(stability_probe(c, {0.0}), Error);
}

TEST_CASE("halving the fine step barely moves the temperature") {
  Simulation coarse(small());
  Simulation fine(small("[time]\nsteps_per_hf_period = 40\n"));
  CHECK(fine.fine_dt() == doctest::Approx(0.5 * coarse.fine_dt()));
  run_simulation(coarse);
  run_simulation(fine);
  std::vector<double> rise_c = coarse.state().theta, rise_f = fine.state().theta;
  for (double& v : rise_c) v -= 900.0;
  for (double& v : rise_f) v -= 900.0;
  CHECK(rel_l2(rise_c, rise_f) <= 0.02);
}
