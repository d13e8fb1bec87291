#include "ihsim/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "ihsim/error.hpp"
#include "ihsim/materials.hpp"
#include "ihsim/phase.hpp"

namespace ihsim {

namespace {

double workpiece_mu_max(const MaterialModel& m) { return m.mu_workpiece.max(); }
double workpiece_sigma_max(const MaterialModel& m) { return m.sigma_workpiece.max(); }

// Barycentric containment with a small tolerance.
bool contains(const Mesh& mesh, std::size_t t, Point p, std::array<double, 3>& lambda) {
  const Triangle& tr = mesh.triangles[t];
  const Point a = mesh.vertices[tr[0]];
  const Point b = mesh.vertices[tr[1]];
  const Point c = mesh.vertices[tr[2]];
  const double area = cross(b - a, c - a);
  lambda[0] = cross(b - p, c - p) / area;
  lambda[1] = cross(c - p, a - p) / area;
  lambda[2] = 1.0 - lambda[0] - lambda[1];
  const double tol = -1e-10;
  return lambda[0] >= tol && lambda[1] >= tol && lambda[2] >= tol;
}

double l2_norm(const SparseMatrix& mass, const std::vector<double>& v) {
  const std::vector<double> mv = mass.multiply(v);
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * mv[i];
  return std::sqrt(std::max(s, 0.0));
}

std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

Mesh build_mesh(const RunConfig& cfg) {
  Mesh mesh = build_domain(cfg.mesh.domain);
  if (cfg.mesh.refine_levels == 0) return mesh;
  const double delta = skin_depth(cfg.source.f_hf, workpiece_mu_max(cfg.materials), workpiece_sigma_max(cfg.materials));
  const double depth = cfg.mesh.refine_depth > 0.0 ? cfg.mesh.refine_depth : 3.0 * delta;
  int levels = cfg.mesh.refine_levels;
  if (levels < 0) {
    levels = 0;
    const double edge = max_edge_near(mesh, EdgeTag::WorkpieceSurface, 0.0);
    while (levels < 6 && edge / std::pow(2.0, levels) > delta / 3.0) ++levels;
  }
  return refine_boundary_layer(mesh, EdgeTag::WorkpieceSurface, depth, levels);
}

CoefficientField source_density(const RunConfig& cfg, const Mesh& mesh) {
  const auto& coils = cfg.mesh.domain.coils;
  CoefficientField j0{std::vector<double>(mesh.num_triangles(), 0.0)};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.regions[t] != Region::Coil) continue;
    const Point c = mesh.centroid(t);
    for (std::size_t i = 0; i < coils.size(); ++i) {
      if (point_in_polygon(c, coils[i])) {
        const auto& j = cfg.source.j0;
        j0.values[t] = j.empty() ? 0.0 : (j.size() == 1 ? j[0] : j[i]);
        break;
      }
    }
  }
  return j0;
}

Simulation::Simulation(RunConfig cfg, Perturbation perturbation) : cfg_(std::move(cfg)) {
  validate(cfg_);
  mesh_ = build_mesh(cfg_);
  init(perturbation);
}

Simulation::Simulation(RunConfig cfg, Mesh mesh, Perturbation perturbation)
    : cfg_(std::move(cfg)), mesh_(std::move(mesh)) {
  validate(cfg_);
  validate(mesh_);
  init(perturbation);
}

void Simulation::init(Perturbation perturbation) {
  sub_ = submesh(mesh_, Region::Workpiece);
  j0_ = source_density(cfg_, mesh_);

  const SourceSettings& s = cfg_.source;
  wave_.j0 = j0_;
  wave_.amp_mf = s.amp_mf;
  wave_.amp_hf = s.amp_hf;
  wave_.f_mf = s.f_mf;
  wave_.f_hf = s.f_hf;
  validate(wave_, mesh_);
  // Fine step resolves the highest active frequency; the window is the
  // common period of the active components.
  const double f_top = s.amp_hf != 0.0 ? s.f_hf : s.f_mf;
  fine_dt_ = 1.0 / (f_top * cfg_.time.steps_per_hf_period);
  window_ = (s.amp_mf != 0.0 || s.amp_hf == 0.0) ? 1.0 / s.f_mf : 1.0 / s.f_hf;
  if (cfg_.time.coarse_dt / fine_dt_ < 100.0 * (1.0 - 1e-12)) {
    fail(ErrorKind::Validation, "coarse_dt must be at least 100 fine steps");
  }

  const std::size_t n = mesh_.num_vertices();
  const std::size_t nw = sub_.mesh.num_vertices();
  state_.a.assign(n, 0.0);
  state_.a_t.assign(n, 0.0);
  state_.theta.assign(nw, cfg_.thermal.theta0 + perturbation.theta0_shift);
  fixed_windows_ = std::move(perturbation.windows);
  state_.z.assign(nw, 0.0);
  state_.joule.assign(sub_.mesh.num_triangles(), 0.0);
  guess_ = state_.a;

  if (s.power_budget > 0.0) calibrate_power();
  if (perturbation.source_scale != 1.0) {
    wave_.amp_mf *= perturbation.source_scale;
    wave_.amp_hf *= perturbation.source_scale;
    for (double& v : guess_) v *= perturbation.source_scale;
  }

  heat_ = std::make_unique<HeatSolver>(sub_.mesh, cfg_.thermal, cfg_.time.coarse_dt);

  for (const Point& p : cfg_.output.probes) {
    int found = -1;
    std::array<double, 3> lambda{};
    for (std::size_t t = 0; t < sub_.mesh.num_triangles() && found < 0; ++t) {
      if (contains(sub_.mesh, t, p, lambda)) found = static_cast<int>(t);
    }
    if (found < 0) fail(ErrorKind::Validation, "probe point outside the workpiece mesh");
    probe_triangles_.push_back(found);
  }

  audit_.min_theta = *std::min_element(state_.theta.begin(), state_.theta.end());
  audit_.min_z = 0.0;
  audit_.max_z = 0.0;
  hardened_.assign(nw, 0);

  auto& cols = series_.columns;
  cols = {"t"};
  for (std::size_t i = 0; i < cfg_.output.probes.size(); ++i) cols.push_back("theta_p" + std::to_string(i + 1));
  for (std::size_t i = 0; i < cfg_.output.probes.size(); ++i) cols.push_back("z_p" + std::to_string(i + 1));
  for (const NamedBox& b : cfg_.output.regions) cols.push_back("zint_" + b.name);
  for (const char* c : {"joule_power", "min_d_joule", "min_d_fourier", "min_d_phase", "em_windows", "em_change",
                        "em_iterations", "theta_max", "z_max"}) {
    cols.emplace_back(c);
  }
  record_row();
}

void Simulation::calibrate_power() {
  const SourceSettings& s = cfg_.source;
  const bool mf = s.amp_mf != 0.0;
  const bool hf = s.amp_hf != 0.0;
  if (!mf && !hf) return;
  const std::vector<double> zf = z_full();
  const CoefficientField sigma = sigma_field(cfg_.materials, mesh_, zf);
  const CoefficientField inv_mu = inv_mu_field(cfg_.materials, mesh_, zf);
  const EddyOperators ops = assemble_eddy(mesh_, sigma, inv_mu, j0_, cfg_.mesh.symmetry_dirichlet);

  auto component_power = [&](bool high, std::vector<double>& window_end) {
    SourceWaveform w = wave_;
    w.amp_mf = high ? 0.0 : 1.0;
    w.amp_hf = high ? 1.0 : 0.0;
    const double window = high ? 1.0 / s.f_hf : 1.0 / s.f_mf;
    const std::vector<double> zero(mesh_.num_vertices(), 0.0);
    const PeriodicSolveResult r = run_to_periodic(zero, w, ops, mesh_, fine_dt_, window, cfg_.time.periodic_tol,
                                                  cfg_.time.max_windows, cfg_.time.solver_tol);
    const std::vector<double> q = averaged_joule(r, mesh_, sigma);
    double p = 0.0;
    for (std::size_t t = 0; t < mesh_.num_triangles(); ++t) {
      if (mesh_.regions[t] == Region::Workpiece) p += q[t] * mesh_.signed_area(t);
    }
    window_end = r.samples.back();
    return p;
  };

  std::vector<double> guess(mesh_.num_vertices(), 0.0);
  std::vector<double> end;
  const double frac = (mf && hf) ? s.hf_power_fraction : (hf ? 1.0 : 0.0);
  double amp_mf = 0.0;
  double amp_hf = 0.0;
  if (mf) {
    const double p = component_power(false, end);
    if (!(p > 0.0)) fail(ErrorKind::Validation, "MF source deposits no power in the workpiece");
    amp_mf = std::sqrt((1.0 - frac) * s.power_budget / p);
    for (std::size_t i = 0; i < guess.size(); ++i) guess[i] += amp_mf * end[i];
  }
  if (hf) {
    const double p = component_power(true, end);
    if (!(p > 0.0)) fail(ErrorKind::Validation, "HF source deposits no power in the workpiece");
    amp_hf = std::sqrt(frac * s.power_budget / p);
    for (std::size_t i = 0; i < guess.size(); ++i) guess[i] += amp_hf * end[i];
  }
  wave_.amp_mf = amp_mf;
  wave_.amp_hf = amp_hf;
  guess_ = std::move(guess);
}

std::vector<double> Simulation::z_full() const {
  return sub_.prolong_field(state_.z, std::vector<double>(mesh_.num_vertices(), 0.0));
}

double Simulation::sample(const std::vector<double>& field, Point p) const {
  std::array<double, 3> lambda{};
  for (std::size_t t = 0; t < sub_.mesh.num_triangles(); ++t) {
    if (contains(sub_.mesh, t, p, lambda)) {
      const Triangle& tr = sub_.mesh.triangles[t];
      return lambda[0] * field[tr[0]] + lambda[1] * field[tr[1]] + lambda[2] * field[tr[2]];
    }
  }
  fail(ErrorKind::InvalidArgument, "point outside the workpiece mesh");
}

double Simulation::region_integral(const std::vector<double>& field, const NamedBox& box) const {
  double s = 0.0;
  for (std::size_t t = 0; t < sub_.mesh.num_triangles(); ++t) {
    if (!box.contains(sub_.mesh.centroid(t))) continue;
    const Triangle& tr = sub_.mesh.triangles[t];
    s += sub_.mesh.signed_area(t) * (field[tr[0]] + field[tr[1]] + field[tr[2]]) / 3.0;
  }
  return s;
}

void Simulation::record_row() {
  std::vector<double> row{state_.t};
  std::array<double, 3> lambda{};
  for (std::size_t i = 0; i < probe_triangles_.size(); ++i) {
    contains(sub_.mesh, probe_triangles_[i], cfg_.output.probes[i], lambda);
    const Triangle& tr = sub_.mesh.triangles[probe_triangles_[i]];
    row.push_back(lambda[0] * state_.theta[tr[0]] + lambda[1] * state_.theta[tr[1]] + lambda[2] * state_.theta[tr[2]]);
  }
  for (std::size_t i = 0; i < probe_triangles_.size(); ++i) {
    contains(sub_.mesh, probe_triangles_[i], cfg_.output.probes[i], lambda);
    const Triangle& tr = sub_.mesh.triangles[probe_triangles_[i]];
    row.push_back(lambda[0] * state_.z[tr[0]] + lambda[1] * state_.z[tr[1]] + lambda[2] * state_.z[tr[2]]);
  }
  for (const NamedBox& b : cfg_.output.regions) row.push_back(region_integral(state_.z, b));
  const StepDiagnostics& d = state_.diag;
  row.push_back(d.joule_power);
  row.push_back(d.min_joule);
  row.push_back(d.min_fourier);
  row.push_back(d.min_phase);
  row.push_back(d.windows);
  row.push_back(d.periodic_change);
  row.push_back(static_cast<double>(d.em_iterations));
  row.push_back(*std::max_element(state_.theta.begin(), state_.theta.end()));
  row.push_back(*std::max_element(state_.z.begin(), state_.z.end()));
  series_.rows.push_back(std::move(row));
}

void Simulation::step() {
  if (finished()) fail(ErrorKind::InvalidArgument, "simulation already reached the final time");
  const double dt = cfg_.time.coarse_dt;

  // (1) coefficients from the current phase
  const std::vector<double> zf = z_full();
  const CoefficientField sigma = sigma_field(cfg_.materials, mesh_, zf);
  const CoefficientField inv_mu = inv_mu_field(cfg_.materials, mesh_, zf);
  const EddyOperators ops = assemble_eddy(mesh_, sigma, inv_mu, j0_, cfg_.mesh.symmetry_dirichlet);

  // (2) periodic state, (3) averaged Joule heat
  const bool replay = !fixed_windows_.empty();
  if (replay && static_cast<std::size_t>(state_.step) >= fixed_windows_.size()) {
    fail(ErrorKind::InvalidArgument, "window schedule shorter than the run");
  }
  PeriodicSolveResult per =
      replay ? run_to_periodic(guess_, wave_, ops, mesh_, fine_dt_, window_, 0.0, fixed_windows_[state_.step],
                               cfg_.time.solver_tol)
             : run_to_periodic(guess_, wave_, ops, mesh_, fine_dt_, window_, cfg_.time.periodic_tol,
                               cfg_.time.max_windows, cfg_.time.solver_tol);
  if (replay) per.converged = per.change <= cfg_.time.periodic_tol;
  const std::vector<double> q_full = averaged_joule(per, mesh_, sigma);
  std::vector<double> q(sub_.mesh.num_triangles());
  for (std::size_t t = 0; t < q.size(); ++t) q[t] = q_full[sub_.parent_triangle[t]];

  // (4) phase with frozen temperature, (5) heat with the phase increment
  const std::vector<double> z_next = step_phase(state_.z, state_.theta, dt, cfg_.kinetics);
  std::vector<double> theta_next = heat_->step(state_.theta, q, state_.z, z_next, cfg_.kinetics);

  // diagnostics
  StepDiagnostics d;
  d.windows = per.windows;
  d.periodic_change = per.change;
  d.periodic_converged = per.converged;
  d.em_iterations = per.solver_iterations;
  d.heat_iterations = heat_->last_iterations();
  for (std::size_t t = 0; t < q.size(); ++t) d.joule_power += q[t] * sub_.mesh.signed_area(t);
  const std::vector<double> rate2 = sub_.restrict_field(averaged_rate_squared(per));
  std::vector<double> joule_nodes(rate2.size());
  for (std::size_t i = 0; i < rate2.size(); ++i) joule_nodes[i] = cfg_.materials.sigma_workpiece(state_.z[i]) * rate2[i];
  const DissipationTerms terms = dissipation_terms(sub_.mesh, joule_nodes, theta_next, state_.theta, state_.z, z_next,
                                                   dt, cfg_.thermal.kappa, cfg_.kinetics);
  auto min_of = [](const std::vector<double>& v) { return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end()); };
  d.min_joule = min_of(terms.joule);
  d.min_fourier = min_of(terms.fourier);
  d.min_phase = min_of(terms.phase);
  d.skipped_nodes = terms.skipped;

  RunAudit& au = audit_;
  au.min_theta = std::min(au.min_theta, min_of(theta_next));
  au.min_z = std::min(au.min_z, min_of(z_next));
  au.max_z = std::max(au.max_z, *std::max_element(z_next.begin(), z_next.end()));
  for (std::size_t i = 0; i < z_next.size(); ++i) {
    au.min_z_increment = std::min(au.min_z_increment, z_next[i] - state_.z[i]);
    const char hard = z_next[i] >= 0.5 ? 1 : 0;
    if (hardened_[i] && !hard) au.hardened_set_monotone = false;
    hardened_[i] = hard;
  }
  au.min_joule = std::min(au.min_joule, d.min_joule);
  au.min_fourier = std::min(au.min_fourier, d.min_fourier);
  au.min_phase = std::min(au.min_phase, d.min_phase);
  au.skipped_nodes += d.skipped_nodes;
  if (!per.converged) ++au.periodic_failures;

  state_.a = per.samples.back();
  state_.a_t = per.rate(per.steps() - 1);
  state_.theta = std::move(theta_next);
  state_.z = z_next;
  state_.joule = std::move(q);
  state_.diag = d;
  ++state_.step;
  state_.t = state_.step * dt;
  guess_ = state_.a;
  record_row();
}

void run_simulation(Simulation& sim, const std::function<void(const Simulation&)>& on_step) {
  if (on_step) on_step(sim);
  while (!sim.finished()) {
    sim.step();
    if (on_step) on_step(sim);
  }
}

double stability_distance(const Simulation& base, const Simulation& perturbed, double eps) {
  const Mesh& wp = base.workpiece().mesh;
  const SparseMatrix m_wp = assemble_mass(wp, CoefficientField::constant(wp, 1.0));
  const SparseMatrix k_wp = assemble_stiffness(wp, CoefficientField::constant(wp, 1.0));
  const SparseMatrix m_d = assemble_mass(base.mesh(), CoefficientField::constant(base.mesh(), 1.0));
  const std::vector<double> dtheta = difference(perturbed.state().theta, base.state().theta);
  const std::vector<double> dat = difference(perturbed.state().a_t, base.state().a_t);
  const std::vector<double> dz = difference(perturbed.state().z, base.state().z);
  const double z_l2 = l2_norm(m_wp, dz);
  const double z_grad = l2_norm(k_wp, dz);
  const double num = l2_norm(m_wp, dtheta) + l2_norm(m_d, dat) + std::sqrt(z_l2 * z_l2 + z_grad * z_grad);
  return eps > 0.0 ? num / eps : num;
}

StabilityReport stability_probe(const RunConfig& cfg, const std::vector<double>& eps_list, bool perturb_theta0) {
  if (eps_list.empty()) fail(ErrorKind::InvalidArgument, "no perturbation sizes given");
  RunConfig probe = cfg;
  const double eps_min = *std::min_element(eps_list.begin(), eps_list.end());
  if (!(eps_min > 0.0)) fail(ErrorKind::InvalidArgument, "perturbation sizes must be positive");
  Mesh mesh = build_mesh(probe);
  if (probe.source.power_budget > 0.0) {
    const Simulation calib(probe, mesh);
    probe.source.amp_mf = calib.waveform().amp_mf;
    probe.source.amp_hf = calib.waveform().amp_hf;
    probe.source.power_budget = 0.0;
  }
  // The base run picks the periodic window count per step; the perturbed runs
  // replay it, so a count that flips near the tolerance cannot masquerade as
  // data sensitivity.
  Simulation base(probe, mesh);
  std::vector<int> windows;
  run_simulation(base, [&](const Simulation& s) {
    if (s.state().step > 0) windows.push_back(s.state().diag.windows);
  });
  auto run = [&](double eps) {
    Perturbation p;
    if (perturb_theta0) p.theta0_shift = eps;
    else p.source_scale = 1.0 + eps;
    p.windows = windows;
    Simulation sim(probe, mesh, p);
    run_simulation(sim);
    return sim;
  };
  StabilityReport report;
  report.pass = true;
  for (double eps : eps_list) {
    StabilityEntry e;
    e.eps = eps;
    e.d_eps = stability_distance(base, run(eps), eps);
    e.d_half = stability_distance(base, run(0.5 * eps), 0.5 * eps);
    e.ratio = e.d_eps > 0.0 ? e.d_half / e.d_eps : std::numeric_limits<double>::quiet_NaN();
    e.pass = e.ratio >= 0.5 && e.ratio <= 2.0;
    report.pass = report.pass && e.pass;
    report.entries.push_back(e);
  }
  return report;
}

FrequencyComparison compare_frequencies(
    const RunConfig& cfg, const std::function<void(const std::string&, const Simulation&)>& on_step) {
  if (!(cfg.source.power_budget > 0.0)) fail(ErrorKind::Validation, "compare-freq needs power_budget > 0");
  const NamedBox* root = nullptr;
  const NamedBox* tip = nullptr;
  for (const NamedBox& b : cfg.output.regions) {
    if (b.name == "root") root = &b;
    if (b.name == "tip") tip = &b;
  }
  if (!root || !tip) fail(ErrorKind::Validation, "compare-freq needs output regions named root and tip");
  const Mesh mesh = build_mesh(cfg);

  auto run = [&](const std::string& label, double amp_mf, double amp_hf) {
    RunConfig c = cfg;
    c.source.amp_mf = amp_mf;
    c.source.amp_hf = amp_hf;
    const auto start = std::chrono::steady_clock::now();
    Simulation sim(c, mesh);
    run_simulation(sim, [&](const Simulation& s) {
      if (on_step) on_step(label, s);
    });
    FrequencyRun r;
    r.label = label;
    r.root = sim.region_integral(sim.state().z, *root);
    r.tip = sim.region_integral(sim.state().z, *tip);
    r.amp_mf = sim.waveform().amp_mf;
    r.amp_hf = sim.waveform().amp_hf;
    r.audit = sim.audit();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };

  FrequencyComparison out;
  out.mf = run("mf", 1.0, 0.0);
  out.hf = run("hf", 0.0, 1.0);
  out.both = run("mf+hf", 1.0, 1.0);
  out.mf_root_selective = out.mf.root > 2.0 * out.mf.tip;
  out.hf_tip_selective = out.hf.tip > 2.0 * out.hf.root;
  out.combined_covers = out.both.root > 0.5 * std::max(out.mf.root, out.hf.root) &&
                        out.both.tip > 0.5 * std::max(out.mf.tip, out.hf.tip);
  return out;
}

}  // namespace ihsim
