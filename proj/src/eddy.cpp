#include "ihsim/eddy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ihsim/error.hpp"

namespace ihsim {

double SourceWaveform::u(double t) const {
  const double w = 2.0 * std::numbers::pi;
  return amp_mf * std::sin(w * f_mf * t) + amp_hf * std::sin(w * f_hf * t);
}

double u_eval(const SourceWaveform& w, double t) { return w.u(t); }

void validate(const SourceWaveform& w, const Mesh& mesh) {
  if (!std::isfinite(w.f_mf) || !(w.f_mf > 0.0)) fail(ErrorKind::Validation, "f_mf must be positive");
  if (!std::isfinite(w.f_hf) || !(w.f_hf > 0.0)) fail(ErrorKind::Validation, "f_hf must be positive");
  const double k = w.f_hf / w.f_mf;
  if (std::round(k) < 1.0 || std::abs(k - std::round(k)) > 1e-9 * k) {
    fail(ErrorKind::Validation, "f_hf must be an integer multiple of f_mf");
  }
  if (!std::isfinite(w.amp_mf) || !std::isfinite(w.amp_hf)) {
    fail(ErrorKind::Validation, "source amplitudes must be finite");
  }
  if (w.j0.size() != mesh.num_triangles()) fail(ErrorKind::InvalidArgument, "J0 length differs from triangle count");
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!std::isfinite(w.j0[t])) fail(ErrorKind::Validation, "J0 must be finite");
    if (w.j0[t] != 0.0 && mesh.regions[t] != Region::Coil) {
      fail(ErrorKind::Validation, "J0 must vanish outside the coil");
    }
  }
}

EddyOperators assemble_eddy(const Mesh& mesh, const CoefficientField& sigma, const CoefficientField& inv_mu,
                            const CoefficientField& j0, bool symmetry_dirichlet) {
  if (sigma.size() != mesh.num_triangles() || inv_mu.size() != mesh.num_triangles() ||
      j0.size() != mesh.num_triangles()) {
    fail(ErrorKind::InvalidArgument, "coefficient length differs from triangle count");
  }
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!std::isfinite(sigma[t]) || sigma[t] < 0.0) fail(ErrorKind::InvalidArgument, "conductivity must be >= 0");
    if (mesh.regions[t] == Region::Air && sigma[t] != 0.0) {
      fail(ErrorKind::InvalidArgument, "conductivity must vanish in air");
    }
  }
  EddyOperators ops;
  ops.mass = assemble_mass(mesh, sigma);
  ops.stiffness = assemble_stiffness(mesh, inv_mu);
  ops.unit_load = assemble_load(mesh, j0);
  ops.dirichlet = mesh.tagged_nodes(EdgeTag::Outer);
  if (symmetry_dirichlet) {
    const std::vector<int> sym = mesh.tagged_nodes(EdgeTag::Symmetry);
    ops.dirichlet.insert(ops.dirichlet.end(), sym.begin(), sym.end());
    std::sort(ops.dirichlet.begin(), ops.dirichlet.end());
    ops.dirichlet.erase(std::unique(ops.dirichlet.begin(), ops.dirichlet.end()), ops.dirichlet.end());
  }
  if (ops.dirichlet.empty()) fail(ErrorKind::InvalidArgument, "potential needs at least one OUTER boundary edge");
  return ops;
}

CnStepper::CnStepper(const EddyOperators& ops, double dt, double solver_tol)
    : ops_(&ops), dt_(dt), tol_(solver_tol) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "fine step must be positive");
  lhs_ = SparseMatrix::combine(1.0 / dt, ops.mass, 0.5, ops.stiffness);
  rhs_op_ = SparseMatrix::combine(1.0 / dt, ops.mass, -0.5, ops.stiffness);
  bc_ = DirichletConstraints(lhs_.size(), ops.dirichlet, 0.0);
  lhs_ = bc_.apply_matrix(lhs_);
}

std::vector<double> CnStepper::step(std::span<const double> a_n, double t_n, const SourceWaveform& src,
                                    std::span<const double> guess) {
  const std::size_t n = lhs_.size();
  if (a_n.size() != n) fail(ErrorKind::InvalidArgument, "potential length differs from operator size");
  std::vector<double> rhs = rhs_op_.multiply(a_n);
  const double u_mid = 0.5 * (src.u(t_n) + src.u(t_n + dt_));
  if (u_mid != 0.0) {
    for (std::size_t i = 0; i < n; ++i) rhs[i] += u_mid * ops_->unit_load[i];
  }
  bc_.apply_rhs(rhs);
  SolveResult res = solve_spd(lhs_, rhs, tol_, 20 * static_cast<int>(n) + 100, guess.empty() ? a_n : guess);
  if (!res.converged) {
    fail(ErrorKind::Solver, "Crank-Nicolson solve did not converge (residual " +
                                std::to_string(res.relative_residual) + ")");
  }
  bc_.impose(res.x);
  last_iterations_ = res.iterations;
  total_iterations_ += res.iterations;
  return std::move(res.x);
}

std::vector<double> step_cn(std::span<const double> a_n, double t_n, double dt, const EddyOperators& ops,
                            const SourceWaveform& src) {
  CnStepper stepper(ops, dt);
  return stepper.step(a_n, t_n, src);
}

std::vector<double> PeriodicSolveResult::rate(std::size_t k) const {
  const std::vector<double>& a = samples.at(k);
  const std::vector<double>& b = samples.at(k + 1);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = (b[i] - a[i]) / dt;
  return out;
}

namespace {

double quad_form(const SparseMatrix& m, std::span<const double> x, std::vector<double>& work) {
  m.multiply(x, work);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * work[i];
  return s;
}

}  // namespace

PeriodicSolveResult run_to_periodic(std::span<const double> a_init, const SourceWaveform& src,
                                    const EddyOperators& ops, const Mesh& mesh, double dt, double window,
                                    double tol, int max_windows, double solver_tol) {
  if (!(window > 0.0) || !(dt > 0.0)) fail(ErrorKind::InvalidArgument, "window and fine step must be positive");
  if (max_windows < 1) fail(ErrorKind::InvalidArgument, "max_windows must be at least 1");
  const double steps_real = window / dt;
  const long steps = std::lround(steps_real);
  if (steps < 1 || std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * steps_real) {
    fail(ErrorKind::InvalidArgument, "fine step must divide the averaging window");
  }
  const std::size_t n = ops.mass.size();
  if (a_init.size() != n) fail(ErrorKind::InvalidArgument, "initial potential length differs from operator size");

  const SparseMatrix l2 = assemble_mass(mesh, CoefficientField::constant(mesh, 1.0));
  std::vector<double> work(n);
  CnStepper stepper(ops, dt, solver_tol);

  PeriodicSolveResult res;
  res.dt = window / static_cast<double>(steps);
  res.window = window;
  std::vector<std::vector<double>> previous(static_cast<std::size_t>(steps) + 1,
                                            std::vector<double>(a_init.begin(), a_init.end()));
  std::vector<double> before(a_init.begin(), a_init.end());  // sample preceding the window start
  std::vector<double> start(a_init.begin(), a_init.end());
  std::vector<double> guess(n), diff(n);
  for (int w = 1; w <= max_windows; ++w) {
    std::vector<std::vector<double>> current;
    current.reserve(static_cast<std::size_t>(steps) + 1);
    current.push_back(start);
    for (long k = 0; k < steps; ++k) {
      const std::vector<double>& a_n = current.back();
      if (w == 1) {
        const std::vector<double>& a_prev = k == 0 ? before : current[current.size() - 2];
        for (std::size_t i = 0; i < n; ++i) guess[i] = 2.0 * a_n[i] - a_prev[i];
      } else {
        // the previous window shifted by the current offset is nearly periodic
        const auto& p0 = previous[static_cast<std::size_t>(k)];
        const auto& p1 = previous[static_cast<std::size_t>(k) + 1];
        for (std::size_t i = 0; i < n; ++i) guess[i] = p1[i] + (a_n[i] - p0[i]);
      }
      current.push_back(stepper.step(a_n, static_cast<double>(k) * res.dt, src, guess));
    }
    double num = 0.0;
    double den = 0.0;
    for (long k = 1; k <= steps; ++k) {
      const auto& c = current[static_cast<std::size_t>(k)];
      const auto& p = previous[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < n; ++i) diff[i] = c[i] - p[i];
      num += quad_form(l2, diff, work);
      den += quad_form(l2, c, work);
    }
    res.change = den > 0.0 ? std::sqrt(num / den) : (num > 0.0 ? 1.0 : 0.0);
    res.windows = w;
    before = current[current.size() - 2];
    start = current.back();
    previous = std::move(current);
    if (res.change <= tol) {
      res.converged = true;
      break;
    }
  }
  res.samples = std::move(previous);
  res.solver_iterations = stepper.total_iterations();
  return res;
}

std::vector<double> averaged_joule(const PeriodicSolveResult& result, const Mesh& mesh,
                                   const CoefficientField& sigma) {
  if (result.steps() == 0) fail(ErrorKind::InvalidArgument, "periodic result has no samples");
  if (sigma.size() != mesh.num_triangles()) fail(ErrorKind::InvalidArgument, "conductivity length mismatch");
  std::vector<double> q(mesh.num_triangles(), 0.0);
  for (std::size_t k = 0; k < result.steps(); ++k) {
    const std::vector<double> r = result.rate(k);
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      if (sigma[t] == 0.0) continue;
      const Triangle& tr = mesh.triangles[t];
      q[t] += sigma[t] * p1_square_mean(r[tr[0]], r[tr[1]], r[tr[2]]) * result.dt;
    }
  }
  for (double& v : q) v /= result.window;
  return q;
}

std::vector<double> averaged_rate_squared(const PeriodicSolveResult& result) {
  if (result.steps() == 0) fail(ErrorKind::InvalidArgument, "periodic result has no samples");
  std::vector<double> out(result.samples.front().size(), 0.0);
  for (std::size_t k = 0; k < result.steps(); ++k) {
    const std::vector<double> r = result.rate(k);
    for (std::size_t i = 0; i < r.size(); ++i) out[i] += r[i] * r[i] * result.dt;
  }
  for (double& v : out) v /= result.window;
  return out;
}

std::vector<Point> compute_B(const Mesh& mesh, std::span<const double> a) {
  if (a.size() != mesh.num_vertices()) fail(ErrorKind::InvalidArgument, "potential length differs from vertex count");
  std::vector<Point> out(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto g = basis_gradients(mesh, t);
    Point grad{};
    for (int i = 0; i < 3; ++i) grad = grad + a[mesh.triangles[t][i]] * g[i];
    out[t] = {grad.y, -grad.x};
  }
  return out;
}

}  // namespace ihsim
