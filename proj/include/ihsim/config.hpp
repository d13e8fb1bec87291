#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ihsim/geometry.hpp"
#include "ihsim/materials.hpp"
#include "ihsim/phase.hpp"
#include "ihsim/thermal.hpp"

namespace ihsim {

struct NamedBox {
  std::string name;
  Point lo;
  Point hi;

  bool contains(Point p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

struct MeshSettings {
  DomainSpec domain;
  /// Boundary-layer refinement around the workpiece surface. A nonpositive
  /// depth means three skin depths at the highest frequency; a negative level
  /// count means "enough levels to reach a third of that skin depth".
  double refine_depth = 0.0;
  int refine_levels = 0;
  bool symmetry_dirichlet = false;
};

struct SourceSettings {
  std::vector<double> j0{1.0e7};  ///< A/m^2, one value for all coils or one per coil
  double amp_mf = 1.0;
  double amp_hf = 0.0;
  double f_mf = 1.0e4;
  double f_hf = 1.0e5;
  /// When positive, amplitudes are rescaled so that the initial-state
  /// averaged Joule power in the workpiece equals this value (W/m).
  double power_budget = 0.0;
  /// Share of the budget carried by the HF component when both are active.
  double hf_power_fraction = 0.5;
};

struct TimeSettings {
  double total = 1.0;
  double coarse_dt = 0.1;
  int steps_per_hf_period = 20;
  double periodic_tol = 1e-3;
  int max_windows = 200;
  double solver_tol = 1e-10;

  double fine_dt(double f_hf) const { return 1.0 / (f_hf * steps_per_hf_period); }
  int coarse_steps() const;
};

struct OutputSettings {
  std::vector<Point> probes;
  std::vector<NamedBox> regions;
  int snapshot_every = 0;  ///< coarse steps between VTK snapshots; 0 = none
};

struct RunConfig {
  MeshSettings mesh;
  MaterialModel materials;
  PhaseKinetics kinetics;
  ThermalParams thermal;
  SourceSettings source;
  TimeSettings time;
  OutputSettings output;
};

struct ConfigViolation {
  std::string key;
  std::string clause;
  std::string message;
};

/// All modelling-assumption and module-constraint violations; empty when valid.
std::vector<ConfigViolation> check_config(const RunConfig& cfg);

/// Throws Error(Validation) listing every violation.
void validate(const RunConfig& cfg);

/// Parses INI text (sections, `key = value`, `#` comments) and validates it.
/// Parse errors cite the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical INI rendering; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const RunConfig& cfg);

double skin_depth(double frequency, double mu, double sigma);

}  // namespace ihsim
