#include "ihsim/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ihsim/error.hpp"

namespace ihsim {

void validate(const ThermalParams& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.c_v) || !(p.c_v > 0.0)) fail(ErrorKind::Validation, "c_v must be positive");
  if (!finite(p.kappa) || !(p.kappa > 0.0)) fail(ErrorKind::Validation, "kappa must be positive");
  if (!finite(p.eta) || p.eta < 0.0) fail(ErrorKind::Validation, "eta must be nonnegative");
  if (!finite(p.g) || p.g < 0.0) fail(ErrorKind::Validation, "g must be nonnegative");
  if (!finite(p.theta0) || p.theta0 < 0.0) fail(ErrorKind::Validation, "theta0 must be nonnegative");
}

HeatSolver::HeatSolver(const Mesh& workpiece, const ThermalParams& params, double dt, double solver_tol)
    : mesh_(&workpiece), params_(params), dt_(dt), tol_(solver_tol) {
  validate(params);
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "coarse step must be positive");
  mass_ = assemble_mass(workpiece, CoefficientField::constant(workpiece, 1.0), true);
  const SparseMatrix k = assemble_stiffness(workpiece, CoefficientField::constant(workpiece, params.kappa));
  lhs_ = SparseMatrix::combine(params.c_v / dt, mass_, 1.0, k);
  boundary_load_.assign(workpiece.num_vertices(), 0.0);
  if (workpiece.has_tag(EdgeTag::Outer)) {
    RobinSystem robin = assemble_robin(workpiece, EdgeTag::Outer, params.eta, params.g, true);
    lhs_ = SparseMatrix::combine(1.0, lhs_, 1.0, robin.matrix);
    boundary_load_ = std::move(robin.load);
  }
}

void HeatSolver::set_boundary_data(const std::function<double(Point)>& g) {
  if (!mesh_->has_tag(EdgeTag::Outer)) return;
  boundary_load_ = assemble_robin(*mesh_, EdgeTag::Outer, params_.eta, g, true).load;
}

std::vector<double> HeatSolver::solve(std::vector<double> rhs, std::span<const double> guess) {
  const int maxit = 20 * static_cast<int>(rhs.size()) + 100;
  SolveResult res = solve_spd(lhs_, rhs, tol_, maxit, guess);
  if (!res.converged) {
    fail(ErrorKind::Solver, "heat solve did not converge (residual " + std::to_string(res.relative_residual) + ")");
  }
  last_iterations_ = res.iterations;
  return std::move(res.x);
}

std::vector<double> HeatSolver::step(std::span<const double> theta_n, std::span<const double> q,
                                     std::span<const double> z_n, std::span<const double> z_next,
                                     const PhaseKinetics& kinetics) {
  const std::size_t n = mesh_->num_vertices();
  if (theta_n.size() != n || z_n.size() != n || z_next.size() != n) {
    fail(ErrorKind::InvalidArgument, "nodal field length differs from vertex count");
  }
  if (q.size() != mesh_->num_triangles()) fail(ErrorKind::InvalidArgument, "heat source length differs from triangle count");
  for (double v : q) {
    if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorKind::InvalidArgument, "heat source must be finite and nonnegative");
  }
  std::vector<double> rhs = assemble_load(*mesh_, CoefficientField{std::vector<double>(q.begin(), q.end())});
  const std::span<const double> m = mass_.values();
  const auto offsets = mass_.row_offsets();
  const auto cols = mass_.columns();
  for (std::size_t i = 0; i < n; ++i) {
    double mi = 0.0;
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) {
      if (static_cast<std::size_t>(cols[p]) == i) mi = m[p];
    }
    const double latent = latent_coeff(theta_n[i], z_n[i], kinetics) * (z_next[i] - z_n[i]) / dt_;
    rhs[i] += params_.c_v * mi * theta_n[i] / dt_ + boundary_load_[i] - mi * latent;
  }
  return solve(std::move(rhs), theta_n);
}

std::vector<double> HeatSolver::step_with_nodal_source(std::span<const double> theta_n,
                                                       std::span<const double> nodal_source) {
  const std::size_t n = mesh_->num_vertices();
  if (theta_n.size() != n || nodal_source.size() != n) {
    fail(ErrorKind::InvalidArgument, "nodal field length differs from vertex count");
  }
  const std::vector<double> diag = mass_.diagonal();
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = params_.c_v * diag[i] * theta_n[i] / dt_ + boundary_load_[i] + diag[i] * nodal_source[i];
  }
  return solve(std::move(rhs), theta_n);
}

std::vector<double> step_heat(const Mesh& workpiece, std::span<const double> theta_n, double dt,
                              std::span<const double> q, std::span<const double> z_n,
                              std::span<const double> z_next, const PhaseKinetics& kinetics,
                              const ThermalParams& params) {
  HeatSolver solver(workpiece, params, dt);
  return solver.step(theta_n, q, z_n, z_next, kinetics);
}

DissipationTerms dissipation_terms(const Mesh& workpiece, std::span<const double> joule,
                                   std::span<const double> theta, std::span<const double> theta_phase,
                                   std::span<const double> z_n, std::span<const double> z_next, double dt,
                                   double kappa, const PhaseKinetics& kinetics) {
  const std::size_t n = workpiece.num_vertices();
  if (joule.size() != n || theta.size() != n || theta_phase.size() != n || z_n.size() != n ||
      z_next.size() != n) {
    fail(ErrorKind::InvalidArgument, "nodal field length differs from vertex count");
  }
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "step must be positive");
  std::vector<double> grad2(n, 0.0);
  std::vector<double> area(n, 0.0);
  for (std::size_t t = 0; t < workpiece.num_triangles(); ++t) {
    const auto g = basis_gradients(workpiece, t);
    const Triangle& tr = workpiece.triangles[t];
    Point grad{};
    for (int i = 0; i < 3; ++i) grad = grad + theta[tr[i]] * g[i];
    const double a = workpiece.signed_area(t);
    for (int v : tr) {
      grad2[v] += a * dot(grad, grad);
      area[v] += a;
    }
  }
  DissipationTerms out;
  out.joule.assign(n, 0.0);
  out.fourier.assign(n, 0.0);
  out.phase.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(theta[i] > kThetaFloor)) {
      ++out.skipped;
      continue;
    }
    out.joule[i] = joule[i];
    out.fourier[i] = area[i] > 0.0 ? kappa * grad2[i] / area[i] / theta[i] : 0.0;
    const double z_t = (z_next[i] - z_n[i]) / dt;
    out.phase[i] = kinetics.latent * std::max(kinetics.z_eq(theta_phase[i]) - z_n[i], 0.0) * z_t;
  }
  return out;
}

}  // namespace ihsim
