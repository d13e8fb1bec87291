#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ihsim/fem.hpp"
#include "ihsim/geometry.hpp"
#include "ihsim/phase.hpp"

namespace ihsim {

struct ThermalParams {
  double c_v = 3.6e6;        ///< J/(m^3 K)
  double kappa = 40.0;       ///< W/(m K)
  double eta = 20.0;         ///< W/(m^2 K)
  double g = 20.0 * 293.15;  ///< W/m^2
  double theta0 = 293.15;    ///< K
};

void validate(const ThermalParams& p);

/// Implicit Euler for c_v theta_t - kappa lap theta = Q - f(theta, z) z_t on
/// the workpiece submesh, Robin on OUTER edges, insulated SYMMETRY edges.
/// Uses the lumped mass and lumped Robin matrices.
class HeatSolver {
 public:
  HeatSolver(const Mesh& workpiece, const ThermalParams& params, double dt, double solver_tol = 1e-12);

  /// `q` is the per-triangle heat source (>= 0), `z_next` the phase after
  /// the step. The latent term uses f(theta_n, z_n).
  std::vector<double> step(std::span<const double> theta_n, std::span<const double> q,
                           std::span<const double> z_n, std::span<const double> z_next,
                           const PhaseKinetics& kinetics);

  /// Variant with a signed per-vertex source density (no sign check),
  /// integrated with the lumped mass.
  std::vector<double> step_with_nodal_source(std::span<const double> theta_n, std::span<const double> nodal_source);

  /// Replaces the Robin data by a space-dependent g (no sign check).
  void set_boundary_data(const std::function<double(Point)>& g);

  const SparseMatrix& lumped_mass() const { return mass_; }
  double dt() const { return dt_; }
  int last_iterations() const { return last_iterations_; }

 private:
  std::vector<double> solve(std::vector<double> rhs, std::span<const double> guess);

  const Mesh* mesh_;
  ThermalParams params_;
  double dt_;
  double tol_;
  SparseMatrix mass_;
  SparseMatrix lhs_;
  std::vector<double> boundary_load_;
  int last_iterations_ = 0;
};

std::vector<double> step_heat(const Mesh& workpiece, std::span<const double> theta_n, double dt,
                              std::span<const double> q, std::span<const double> z_n,
                              std::span<const double> z_next, const PhaseKinetics& kinetics,
                              const ThermalParams& params);

struct DissipationTerms {
  std::vector<double> joule;    ///< sigma |A_t|^2
  std::vector<double> fourier;  ///< kappa |grad theta|^2 / theta
  std::vector<double> phase;    ///< L (z_eq - z)^+ z_t
  int skipped = 0;              ///< nodes with theta <= theta_floor
};

inline constexpr double kThetaFloor = 1e-6;

/// Per-vertex Clausius-Duhem terms on the workpiece submesh. `joule` is the
/// period-averaged sigma |A_t|^2 per vertex; |grad theta|^2 at a vertex is the
/// area-weighted mean over its triangles; z_t = (z_next - z_n) / dt and the
/// phase term evaluates z_eq at `theta_phase`, the temperature the phase step saw.
DissipationTerms dissipation_terms(const Mesh& workpiece, std::span<const double> joule,
                                   std::span<const double> theta, std::span<const double> theta_phase,
                                   std::span<const double> z_n,
                                   std::span<const double> z_next, double dt, double kappa,
                                   const PhaseKinetics& kinetics);

}  // namespace ihsim
