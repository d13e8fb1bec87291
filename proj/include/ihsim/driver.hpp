#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ihsim/config.hpp"
#include "ihsim/eddy.hpp"
#include "ihsim/fem.hpp"
#include "ihsim/geometry.hpp"
#include "ihsim/thermal.hpp"

namespace ihsim {

/// Mesh of the configured domain with the configured boundary-layer refinement.
Mesh build_mesh(const RunConfig& cfg);

/// Per-triangle J0 from the per-coil densities.
CoefficientField source_density(const RunConfig& cfg, const Mesh& mesh);

struct StepDiagnostics {
  int windows = 0;
  double periodic_change = 0.0;
  bool periodic_converged = true;
  long em_iterations = 0;
  int heat_iterations = 0;
  double joule_power = 0.0;  ///< int over the workpiece of the averaged Joule heat, W/m
  double min_joule = 0.0;
  double min_fourier = 0.0;
  double min_phase = 0.0;
  int skipped_nodes = 0;
};

/// Solution triple plus bookkeeping. A lives on the full mesh; theta and z
/// on the workpiece submesh.
struct SimulationState {
  double t = 0.0;
  int step = 0;
  std::vector<double> a;
  std::vector<double> a_t;    ///< last midpoint rate of the final window
  std::vector<double> theta;
  std::vector<double> z;
  std::vector<double> joule;  ///< averaged Joule heat per workpiece triangle
  StepDiagnostics diag;
};

/// Extremes gathered over every coarse step of a run.
struct RunAudit {
  double min_theta = 0.0;
  double min_z = 0.0;
  double max_z = 0.0;
  double min_z_increment = 0.0;
  double min_joule = 0.0;
  double min_fourier = 0.0;
  double min_phase = 0.0;
  int skipped_nodes = 0;
  int periodic_failures = 0;
  bool hardened_set_monotone = true;  ///< {z >= 0.5} never shrinks
};

/// Data perturbations for the stability probe.
struct Perturbation {
  double source_scale = 1.0;
  double theta0_shift = 0.0;
  /// Periodic windows per coarse step, replayed instead of the tolerance test.
  /// Empty runs every step to periodic_tol.
  std::vector<int> windows;
};

struct TimeSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

class Simulation {
 public:
  explicit Simulation(RunConfig cfg, Perturbation perturbation = {});
  Simulation(RunConfig cfg, Mesh mesh, Perturbation perturbation = {});

  const RunConfig& config() const { return cfg_; }
  const Mesh& mesh() const { return mesh_; }
  const Submesh& workpiece() const { return sub_; }
  const SimulationState& state() const { return state_; }
  const RunAudit& audit() const { return audit_; }
  const TimeSeries& series() const { return series_; }

  /// Source with calibrated amplitudes (perturbation applied).
  const SourceWaveform& waveform() const { return wave_; }
  double fine_dt() const { return fine_dt_; }
  double window() const { return window_; }
  /// Initial guess handed to the next periodic solve.
  const std::vector<double>& em_guess() const { return guess_; }

  /// One coarse step: materials from z, periodic EM solve, averaged Joule
  /// heat, phase step with frozen theta, heat step.
  void step();
  int steps_total() const { return cfg_.time.coarse_steps(); }
  bool finished() const { return state_.step >= steps_total(); }

  /// z on the full mesh (zero off the workpiece).
  std::vector<double> z_full() const;
  /// Value of a workpiece nodal field at a point (linear interpolation).
  double sample(const std::vector<double>& field, Point p) const;
  /// int z over workpiece triangles whose centroid lies in the box.
  double region_integral(const std::vector<double>& field, const NamedBox& box) const;

 private:
  void init(Perturbation perturbation);
  void calibrate_power();
  void record_row();

  RunConfig cfg_;
  Mesh mesh_;
  Submesh sub_;
  CoefficientField j0_;
  SourceWaveform wave_;
  double fine_dt_ = 0.0;
  double window_ = 0.0;
  std::vector<double> guess_;
  std::vector<int> probe_triangles_;
  SimulationState state_;
  RunAudit audit_;
  TimeSeries series_;
  std::unique_ptr<HeatSolver> heat_;
  std::vector<char> hardened_;
  std::vector<int> fixed_windows_;
};

/// Runs to completion. `on_step` is called after the initial state and after
/// every coarse step.
void run_simulation(Simulation& sim, const std::function<void(const Simulation&)>& on_step = {});

struct StabilityEntry {
  double eps = 0.0;
  double d_eps = 0.0;
  double d_half = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

struct StabilityReport {
  std::vector<StabilityEntry> entries;
  bool pass = false;
};

/// D(eps) = (|d theta(T)|_L2 + |d A_t(T)|_L2 + |d z(T)|_H1) / eps for data
/// perturbations of relative size eps (source) or absolute size eps (theta0).
double stability_distance(const Simulation& base, const Simulation& perturbed, double eps);

StabilityReport stability_probe(const RunConfig& cfg, const std::vector<double>& eps_list,
                                bool perturb_theta0 = false);

struct FrequencyRun {
  std::string label;
  double root = 0.0;
  double tip = 0.0;
  double amp_mf = 0.0;
  double amp_hf = 0.0;
  double seconds = 0.0;
  RunAudit audit;
};

struct FrequencyComparison {
  FrequencyRun mf;
  FrequencyRun hf;
  FrequencyRun both;
  bool mf_root_selective = false;  ///< root > 2 tip
  bool hf_tip_selective = false;   ///< tip > 2 root
  bool combined_covers = false;    ///< both above 50% of the single-frequency best
  bool pass() const { return mf_root_selective && hf_tip_selective && combined_covers; }
};

/// MF-only, HF-only and MF+HF runs at the configured power budget, compared
/// on the output regions named "root" and "tip".
/// `on_step` receives the run label.
FrequencyComparison compare_frequencies(
    const RunConfig& cfg, const std::function<void(const std::string&, const Simulation&)>& on_step = {});

}  // namespace ihsim
