// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance <scenario dir>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ihsim/config.hpp"
#include "ihsim/driver.hpp"
#include "ihsim/output.hpp"
#include "ihsim/verification.hpp"

using namespace ihsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void line(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s  %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

bool is_tooth(const RunConfig& c) {
  bool root = false, tip = false;
  for (const NamedBox& b : c.output.regions) {
    root = root || b.name == "root";
    tip = tip || b.name == "tip";
  }
  return root && tip;
}

struct AuditTotals {
  double min_theta = 0.0, min_z = 0.0, max_z = 0.0, min_dz = 0.0;
  double min_joule = 0.0, min_fourier = 0.0, min_phase = 0.0;
  bool hardened_monotone = true;
  int runs = 0;

  void add(const RunAudit& a) {
    if (runs == 0) {
      min_theta = a.min_theta;
      min_z = a.min_z;
      max_z = a.max_z;
      min_dz = a.min_z_increment;
      min_joule = a.min_joule;
      min_fourier = a.min_fourier;
      min_phase = a.min_phase;
    }
    min_theta = std::min(min_theta, a.min_theta);
    min_z = std::min(min_z, a.min_z);
    max_z = std::max(max_z, a.max_z);
    min_dz = std::min(min_dz, a.min_z_increment);
    min_joule = std::min(min_joule, a.min_joule);
    min_fourier = std::min(min_fourier, a.min_fourier);
    min_phase = std::min(min_phase, a.min_phase);
    hardened_monotone = hardened_monotone && a.hardened_set_monotone;
    ++runs;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <scenario dir>\n", argv[0]);
    return 2;
  }
  const fs::path dir = argv[1];
  std::vector<fs::path> scenarios;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".ini") scenarios.push_back(e.path());
  }
  std::sort(scenarios.begin(), scenarios.end());

  // Phase ODE exactness
  {
    const double c = phase_constant_error();
    const double r = phase_rk4_error();
    line(c <= 1e-10 && r <= 1e-6, "phase ODE exactness",
         fmt("constant-theta rel err %.3g (<= 1e-10), substepped vs RK4 %.3g (<= 1e-6)", c, r));
  }

  // Averaged Joule heat
  {
    const double w = 2.0 * 3.14159265358979323846 * 1.0e4;
    const JouleCheck one = joule_single_tone(1.0e6, 1.0e-4, w, 64);
    const JouleCheck two = joule_two_tone(1.0e6, 1.0e-4, 2.0e-5, w, 10, 64);
    line(one.relative_error() <= 0.01 && two.relative_error() <= 0.01, "averaged Joule heat",
         fmt("single tone rel err %.3g, two tone rel err %.3g (each <= 0.01)", one.relative_error(),
             two.relative_error()));
  }

  // Convergence orders
  {
    const OrderReport heat = manufactured_heat_order(4);
    const OrderReport em = manufactured_em_order(4);
    const OrderReport cn = cn_temporal_order(5);
    const bool ok = heat.order >= 1.8 && heat.order <= 2.2 && em.order >= 1.8 && em.order <= 2.2 &&
                    cn.order >= 1.9 && cn.order <= 2.1;
    line(ok, "convergence orders",
         fmt("heat spatial %.3f, EM spatial %.3f (in [1.8, 2.2]); CN temporal %.3f (in [1.9, 2.1])", heat.order,
             em.order, cn.order));
  }

  // Skin depth
  {
    const double mu0 = 1.25663706212e-6;
    const SkinDepthResult base = skin_depth_case(1.0e4, 1.0e6, mu0);
    const SkinDepthResult quad = skin_depth_case(4.0e4, 1.0e6, mu0, base.analytic);
    const double halving = std::abs(quad.fitted / base.fitted - 0.5) / 0.5;
    line(base.relative_error() <= 0.05 && halving <= 0.10, "skin depth",
         fmt("fitted %.4g m vs analytic %.4g m, rel err %.3g (<= 0.05); f->4f ratio deviation %.3g (<= 0.10)",
             base.fitted, base.analytic, base.relative_error(), halving));
  }

  // Scenario runs: bounds, dissipation, determinism, selectivity
  AuditTotals totals;
  bool deterministic = true;
  std::string det_detail;
  const fs::path scratch = fs::temp_directory_path() / "ihsim_acceptance";
  fs::remove_all(scratch);
  const RunConfig* strip = nullptr;
  std::vector<RunConfig> configs;
  configs.reserve(scenarios.size());
  for (const fs::path& p : scenarios) configs.push_back(load_config(p));

  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const RunConfig& cfg = configs[i];
    const std::string name = scenarios[i].stem().string();
    if (is_tooth(cfg)) {
      const auto t0 = std::chrono::steady_clock::now();
      const FrequencyComparison cmp = compare_frequencies(cfg);
      const double secs = seconds_since(t0);
      for (const FrequencyRun* r : {&cmp.mf, &cmp.hf, &cmp.both}) totals.add(r->audit);
      const bool ok = cmp.pass() && secs <= 1800.0;
      std::string detail =
          fmt("MF root %.3g tip %.3g; HF root %.3g tip %.3g; ", cmp.mf.root, cmp.mf.tip, cmp.hf.root, cmp.hf.tip);
      detail += fmt("MF+HF root %.3g tip %.3g; triple %.0f s (<= 1800 s); ", cmp.both.root, cmp.both.tip, secs);
      detail += std::string("MF root>2tip ") + (cmp.mf_root_selective ? "yes" : "no") + ", HF tip>2root " +
                (cmp.hf_tip_selective ? "yes" : "no") + ", MF+HF >50% of best " +
                (cmp.combined_covers ? "yes" : "no") + " (2x and 50% are artifact thresholds)";
      line(ok, "multifrequency selectivity (" + name + ")", detail);
    } else {
      Simulation a(cfg), b(cfg);
      run_to_directory(a, scratch / name / "a");
      run_to_directory(b, scratch / name / "b");
      totals.add(a.audit());
      int files = 0;
      for (const auto& e : fs::directory_iterator(scratch / name / "a")) {
        ++files;
        if (slurp(e.path()) != slurp(scratch / name / "b" / e.path().filename())) {
          deterministic = false;
          det_detail += " " + name + "/" + e.path().filename().string() + " differs;";
        }
      }
      det_detail += " " + name + ": " + std::to_string(files) + " files compared;";
      if (name == "strip") strip = &cfg;
    }
  }
  fs::remove_all(scratch);

  line(totals.min_theta >= -1e-12 && totals.min_z >= -1e-12 && totals.max_z < 1.0 && totals.min_dz >= -1e-12 &&
           totals.hardened_monotone && totals.runs > 0,
       "bounds and monotonicity",
       fmt("%g runs: min theta %.6g, min z %.3g, 1 - max z %.3g", totals.runs, totals.min_theta, totals.min_z,
           1.0 - totals.max_z) +
           fmt(", min z increment %.3g (tolerance -1e-12)", totals.min_dz));
  line(totals.min_joule >= -1e-12 && totals.min_fourier >= -1e-12 && totals.min_phase >= -1e-12 && totals.runs > 0,
       "Clausius-Duhem audit",
       fmt("min joule %.3g, min fourier %.3g, min phase %.3g (each >= -1e-12)", totals.min_joule, totals.min_fourier,
           totals.min_phase));
  line(deterministic && !det_detail.empty(), "determinism", "byte-identical repeated runs:" + det_detail);

  // Stability probe on the strip
  if (strip) {
    const StabilityReport r = stability_probe(*strip, {1e-2, 1e-3});
    std::string detail;
    for (const StabilityEntry& e : r.entries) {
      detail += fmt("eps %.0e: D %.4g, D(eps/2) %.4g, ratio %.4f; ", e.eps, e.d_eps, e.d_half, e.ratio);
    }
    line(r.pass, "stability probe", detail + "ratios in [0.5, 2]");
  } else {
    line(false, "stability probe", "strip scenario missing");
  }

  std::printf("%s: %d criteria failed\n", g_failures ? "FAILED" : "ALL PASSED", g_failures);
  return g_failures ? 1 : 0;
}
