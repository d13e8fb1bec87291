#pragma once

#include <span>
#include <vector>

#include "ihsim/fem.hpp"
#include "ihsim/geometry.hpp"

namespace ihsim {

/// Source current J(x, t) = u(t) J0(x) with
/// u(t) = amp_mf sin(2 pi f_mf t) + amp_hf sin(2 pi f_hf t).
struct SourceWaveform {
  CoefficientField j0;  ///< A/m^2 per triangle, zero off the coil
  double amp_mf = 1.0;
  double amp_hf = 0.0;
  double f_mf = 1.0e4;
  double f_hf = 1.0e5;

  double u(double t) const;
};

double u_eval(const SourceWaveform& w, double t);

/// Throws unless f_mf > 0, f_hf is an integer multiple of f_mf, amplitudes
/// are finite and J0 vanishes off the coil.
void validate(const SourceWaveform& w, const Mesh& mesh);

struct EddyOperators {
  SparseMatrix mass;       ///< M_sigma
  SparseMatrix stiffness;  ///< K with 1/mu
  std::vector<double> unit_load;  ///< int J0 phi_i
  std::vector<int> dirichlet;     ///< nodes pinned to A = 0
};

/// `symmetry_dirichlet` pins SYMMETRY edges as well (default: flux-free).
EddyOperators assemble_eddy(const Mesh& mesh, const CoefficientField& sigma,
                            const CoefficientField& inv_mu, const CoefficientField& j0,
                            bool symmetry_dirichlet = false);

/// Crank-Nicolson stepper for sigma A_t - div(1/mu grad A) = u(t) J0 with a
/// fixed step. The system matrix is built once.
class CnStepper {
 public:
  CnStepper(const EddyOperators& ops, double dt, double solver_tol = 1e-11);

  /// A_{n+1} from A_n at time t_n. `guess` seeds the iterative solve.
  std::vector<double> step(std::span<const double> a_n, double t_n, const SourceWaveform& src,
                           std::span<const double> guess = {});

  double dt() const { return dt_; }
  int last_iterations() const { return last_iterations_; }
  long total_iterations() const { return total_iterations_; }

 private:
  const EddyOperators* ops_;
  double dt_;
  double tol_;
  SparseMatrix lhs_;
  SparseMatrix rhs_op_;
  DirichletConstraints bc_;
  int last_iterations_ = 0;
  long total_iterations_ = 0;
};

std::vector<double> step_cn(std::span<const double> a_n, double t_n, double dt, const EddyOperators& ops,
                            const SourceWaveform& src);

struct PeriodicSolveResult {
  double dt = 0.0;
  double window = 0.0;
  std::vector<std::vector<double>> samples;  ///< window/dt + 1 fine samples
  int windows = 0;
  double change = 0.0;
  bool converged = false;
  long solver_iterations = 0;

  std::size_t steps() const { return samples.empty() ? 0 : samples.size() - 1; }
  /// (A_{k+1} - A_k) / dt at the midpoint of step k.
  std::vector<double> rate(std::size_t k) const;
};

/// Integrates whole windows from `a_init` (window start at t = 0) until the
/// relative L2(time; L2(D)) change between consecutive windows is <= tol.
PeriodicSolveResult run_to_periodic(std::span<const double> a_init, const SourceWaveform& src,
                                    const EddyOperators& ops, const Mesh& mesh, double dt, double window,
                                    double tol, int max_windows, double solver_tol = 1e-11);

/// Window-averaged Joule heat per triangle: (1/window) sum_k dt sigma_T
/// mean_T(A_t^2), with the exact element mean of the squared P1 rate.
std::vector<double> averaged_joule(const PeriodicSolveResult& result, const Mesh& mesh,
                                   const CoefficientField& sigma);

/// Window average of A_t^2 per vertex.
std::vector<double> averaged_rate_squared(const PeriodicSolveResult& result);

/// B = (dA/dy, -dA/dx) per triangle.
std::vector<Point> compute_B(const Mesh& mesh, std::span<const double> a);

/// Mean of the squared P1 interpolant on a triangle from its vertex values.
inline double p1_square_mean(double a, double b, double c) {
  return (a * a + b * b + c * c + a * b + b * c + c * a) / 6.0;
}

}  // namespace ihsim
