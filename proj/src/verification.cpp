#include "ihsim/verification.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "ihsim/config.hpp"
#include "ihsim/eddy.hpp"
#include "ihsim/error.hpp"
#include "ihsim/materials.hpp"
#include "ihsim/thermal.hpp"
#include "json.hpp"

namespace ihsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Degree-4 six-point rule on the reference triangle (weights sum to 1).
struct QuadPoint {
  double l0, l1, l2, w;
};
constexpr QuadPoint kRule[6] = {
    {0.445948490915965, 0.445948490915965, 0.108103018168070, 0.223381589678011},
    {0.445948490915965, 0.108103018168070, 0.445948490915965, 0.223381589678011},
    {0.108103018168070, 0.445948490915965, 0.445948490915965, 0.223381589678011},
    {0.091576213509771, 0.091576213509771, 0.816847572980459, 0.109951743655322},
    {0.091576213509771, 0.816847572980459, 0.091576213509771, 0.109951743655322},
    {0.816847572980459, 0.091576213509771, 0.091576213509771, 0.109951743655322},
};

}  // namespace

double fit_order(std::span<const double> sizes, std::span<const double> errors) {
  if (sizes.size() != errors.size() || sizes.size() < 2) fail(ErrorKind::InvalidArgument, "order fit needs >= 2 levels");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(sizes.size());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (!(sizes[i] > 0.0) || !(errors[i] > 0.0)) fail(ErrorKind::InvalidArgument, "order fit needs positive data");
    const double x = std::log(sizes[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double l2_error(const Mesh& mesh, std::span<const double> uh, const std::function<double(Point)>& exact) {
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const Triangle& tr = mesh.triangles[t];
    const Point a = mesh.vertices[tr[0]];
    const Point b = mesh.vertices[tr[1]];
    const Point c = mesh.vertices[tr[2]];
    const double area = mesh.signed_area(t);
    for (const QuadPoint& q : kRule) {
      const Point p = q.l0 * a + q.l1 * b + q.l2 * c;
      const double e = q.l0 * uh[tr[0]] + q.l1 * uh[tr[1]] + q.l2 * uh[tr[2]] - exact(p);
      s += q.w * area * e * e;
    }
  }
  return std::sqrt(s);
}

Mesh unit_square_mesh(int level, Region region) {
  DomainSpec spec;
  spec.box_min = {0.0, 0.0};
  spec.box_max = {1.0, 1.0};
  const Polygon square{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
  if (region == Region::Workpiece) spec.workpiece = square;
  if (region == Region::Coil) spec.coils.push_back(square);
  spec.h = 0.25;
  Mesh mesh = build_domain(spec);
  return refine_boundary_layer(mesh, EdgeTag::Outer, 10.0, level);
}

OrderReport manufactured_heat_order(int levels) {
  if (levels < 3) fail(ErrorKind::InvalidArgument, "order studies need >= 3 levels");
  OrderReport rep;
  rep.name = "heat_spatial";
  const double t_end = 0.1;
  for (int l = 0; l < levels; ++l) {
    const Mesh mesh = unit_square_mesh(l);
    const double h = 0.25 / std::pow(2.0, l);
    const int steps = 10 * (1 << (2 * l));
    const double dt = t_end / steps;
    ThermalParams params{1.0, 1.0, 1.0, 0.0, 0.0};
    HeatSolver solver(mesh, params, dt);
    auto exact = [](Point p, double t) { return std::exp(-t) * std::cos(kPi * p.x) * std::cos(kPi * p.y); };
    std::vector<double> theta(mesh.num_vertices());
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = exact(mesh.vertices[i], 0.0);
    std::vector<double> source(theta.size());
    for (int n = 1; n <= steps; ++n) {
      const double t = n * dt;
      for (std::size_t i = 0; i < theta.size(); ++i) source[i] = (2.0 * kPi * kPi - 1.0) * exact(mesh.vertices[i], t);
      solver.set_boundary_data([&](Point p) { return exact(p, t); });
      theta = solver.step_with_nodal_source(theta, source);
    }
    rep.sizes.push_back(h);
    rep.errors.push_back(l2_error(mesh, theta, [&](Point p) { return exact(p, t_end); }));
  }
  rep.order = fit_order(rep.sizes, rep.errors);
  return rep;
}

OrderReport manufactured_heat_temporal_order(int levels) {
  if (levels < 3) fail(ErrorKind::InvalidArgument, "order studies need >= 3 levels");
  OrderReport rep;
  rep.name = "heat_temporal";
  const Mesh mesh = unit_square_mesh(0);
  const double t_end = 1.0;
  for (int l = 0; l < levels; ++l) {
    const int steps = 10 * (1 << l);
    const double dt = t_end / steps;
    ThermalParams params{1.0, 1.0, 0.0, 0.0, 0.0};
    HeatSolver solver(mesh, params, dt);
    std::vector<double> theta(mesh.num_vertices(), 2.0);
    std::vector<double> source(theta.size());
    for (int n = 1; n <= steps; ++n) {
      std::fill(source.begin(), source.end(), -std::exp(-n * dt));
      theta = solver.step_with_nodal_source(theta, source);
    }
    rep.sizes.push_back(dt);
    rep.errors.push_back(l2_error(mesh, theta, [&](Point) { return 1.0 + std::exp(-t_end); }));
  }
  rep.order = fit_order(rep.sizes, rep.errors);
  return rep;
}

double linear_heat_error() {
  const Mesh mesh = unit_square_mesh(1);
  ThermalParams params{1.0, 1.0, 0.0, 0.0, 0.0};
  HeatSolver solver(mesh, params, 0.1);
  // kappa d(theta)/dn on each side of the square
  solver.set_boundary_data([](Point p) {
    const double tol = 1e-12;
    if (p.y < tol) return -2.0;
    if (p.y > 1.0 - tol) return 2.0;
    if (p.x < tol) return -1.0;
    return 1.0;
  });
  auto exact = [](Point p) { return 1.0 + p.x + 2.0 * p.y; };
  std::vector<double> theta(mesh.num_vertices());
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = exact(mesh.vertices[i]);
  const std::vector<double> zero(theta.size(), 0.0);
  for (int n = 0; n < 5; ++n) theta = solver.step_with_nodal_source(theta, zero);
  double err = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) err = std::max(err, std::abs(theta[i] - exact(mesh.vertices[i])));
  return err;
}

OrderReport manufactured_em_order(int levels) {
  if (levels < 3) fail(ErrorKind::InvalidArgument, "order studies need >= 3 levels");
  OrderReport rep;
  rep.name = "em_spatial";
  const double sigma = 1.0;
  const double lambda = 2.0 * kPi * kPi;  // 1/mu = 1
  const double omega = 2.0 * kPi;
  const double b = -sigma * omega / lambda;
  const double k = sigma * sigma * omega * omega / lambda + lambda;
  auto shape = [](Point p) { return std::sin(kPi * p.x) * std::sin(kPi * p.y); };
  for (int l = 0; l < levels; ++l) {
    const Mesh mesh = unit_square_mesh(l, Region::Coil);
    CoefficientField j0{std::vector<double>(mesh.num_triangles())};
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) j0.values[t] = k * shape(mesh.centroid(t));
    const EddyOperators ops = assemble_eddy(mesh, CoefficientField::constant(mesh, sigma),
                                            CoefficientField::constant(mesh, 1.0), j0);
    SourceWaveform src;
    src.j0 = j0;
    src.amp_mf = 1.0;
    src.amp_hf = 0.0;
    src.f_mf = 1.0;
    src.f_hf = 1.0;
    const int steps = 2000;
    CnStepper stepper(ops, 1.0 / steps, 1e-13);
    std::vector<double> a(mesh.num_vertices());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = b * shape(mesh.vertices[i]);
    for (int n = 0; n < steps; ++n) a = stepper.step(a, static_cast<double>(n) / steps, src);
    rep.sizes.push_back(0.25 / std::pow(2.0, l));
    rep.errors.push_back(l2_error(mesh, a, [&](Point p) { return b * shape(p); }));
  }
  rep.order = fit_order(rep.sizes, rep.errors);
  return rep;
}

OrderReport cn_temporal_order(int levels) {
  if (levels < 3) fail(ErrorKind::InvalidArgument, "order studies need >= 3 levels");
  OrderReport rep;
  rep.name = "cn_temporal";
  const double sigma = 1.0;
  const double k = 5.0;
  const double j = 1.0;
  const double omega = 2.0 * kPi;
  const double t_end = 1.0;
  // particular solution A sin + B cos plus the decaying homogeneous part
  const double amp = j / (k + sigma * sigma * omega * omega / k);
  const double bcos = -sigma * omega * amp / k;
  auto exact = [&](double t) {
    return amp * std::sin(omega * t) + bcos * std::cos(omega * t) + (0.0 - bcos) * std::exp(-k * t / sigma);
  };
  EddyOperators ops;
  const double ms[1] = {sigma};
  const double ks[1] = {k};
  ops.mass = SparseMatrix::from_dense(1, ms);
  ops.stiffness = SparseMatrix::from_dense(1, ks);
  ops.unit_load = {j};
  SourceWaveform src;
  src.amp_mf = 1.0;
  src.amp_hf = 0.0;
  src.f_mf = 1.0;
  src.f_hf = 1.0;
  for (int l = 0; l < levels; ++l) {
    const int steps = 10 * (1 << l);
    const double dt = t_end / steps;
    CnStepper stepper(ops, dt, 1e-15);
    std::vector<double> a{0.0};
    for (int n = 0; n < steps; ++n) a = stepper.step(a, n * dt, src);
    rep.sizes.push_back(dt);
    rep.errors.push_back(std::abs(a[0] - exact(t_end)));
  }
  rep.order = fit_order(rep.sizes, rep.errors);
  return rep;
}

SkinDepthResult skin_depth_case(double frequency, double sigma, double mu, double length) {
  SkinDepthResult res;
  res.frequency = frequency;
  res.analytic = skin_depth(frequency, mu, sigma);
  const double d = length > 0.0 ? length : res.analytic;
  const double thick = 8.0 * d;
  DomainSpec spec;
  spec.box_min = {0.0, 0.0};
  spec.box_max = {d, thick + 4.0 * d};
  spec.workpiece = {{0.0, 0.0}, {d, 0.0}, {d, thick}, {0.0, thick}};
  spec.coils = {{{0.0, thick + d}, {d, thick + d}, {d, thick + 2.0 * d}, {0.0, thick + 2.0 * d}}};
  spec.h = d / 4.0;
  spec.h_air = d / 2.0;
  spec.side_tags = {EdgeTag::Outer, EdgeTag::Symmetry, EdgeTag::Outer, EdgeTag::Symmetry};
  Mesh mesh = refine_boundary_layer(build_domain(spec), EdgeTag::WorkpieceSurface, 2.0 * d, 1);
  res.vertices = mesh.num_vertices();

  MaterialModel mat;
  mat.sigma_coil = sigma;
  mat.sigma_workpiece = {sigma, sigma};
  mat.mu_vacuum = mu;
  mat.mu_coil = mu;
  mat.mu_workpiece = {mu, mu};
  const std::vector<double> z(mesh.num_vertices(), 0.0);
  const CoefficientField sig = sigma_field(mat, mesh, z);
  CoefficientField j0{std::vector<double>(mesh.num_triangles(), 0.0)};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (mesh.regions[t] == Region::Coil) j0.values[t] = 1.0e6;
  }
  const EddyOperators ops = assemble_eddy(mesh, sig, inv_mu_field(mat, mesh, z), j0);
  SourceWaveform src;
  src.j0 = j0;
  src.amp_mf = 1.0;
  src.amp_hf = 0.0;
  src.f_mf = frequency;
  src.f_hf = frequency;
  const PeriodicSolveResult per = run_to_periodic(std::vector<double>(mesh.num_vertices(), 0.0), src, ops, mesh,
                                                  1.0 / (64.0 * frequency), 1.0 / frequency, 1e-4, 1000);
  res.windows = per.windows;
  const std::vector<double> rate2 = averaged_rate_squared(per);

  // depth -> mean log amplitude over the vertices at that depth
  std::map<double, std::pair<double, int>> profile;
  for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
    const double depth = thick - mesh.vertices[i].y;
    const double lo = 0.5 * res.analytic;
    const double hi = std::min(0.9 * thick, 5.0 * res.analytic);
    if (depth < lo - 1e-12 * thick || depth > hi + 1e-12 * thick) continue;
    if (!(rate2[i] > 0.0)) fail(ErrorKind::Solver, "skin-depth fit: zero amplitude inside the strip");
    auto& [sum, count] = profile[std::round(depth / d * 1e9) / 1e9];
    sum += 0.5 * std::log(rate2[i]);
    ++count;
  }
  if (profile.size() < 3) fail(ErrorKind::Solver, "skin-depth fit: too few depth levels");
  double prev = std::numeric_limits<double>::infinity();
  std::vector<double> xs, ys;
  for (const auto& [depth, acc] : profile) {
    const double y = acc.first / acc.second;
    if (y > prev + 1e-9) fail(ErrorKind::Solver, "skin-depth fit: amplitude profile is not monotone");
    prev = y;
    xs.push_back(depth * d);
    ys.push_back(y);
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  res.fitted = -1.0 / slope;
  return res;
}

namespace {

Mesh single_triangle() {
  Mesh m;
  m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
  m.triangles = {{0, 1, 2}};
  m.regions = {Region::Workpiece};
  m.boundary_edges = {{{0, 1}, EdgeTag::Outer}, {{1, 2}, EdgeTag::Outer}, {{2, 0}, EdgeTag::Outer}};
  return m;
}

double joule_from_signal(double sigma, const std::function<double(double)>& a, double period, int steps) {
  const Mesh m = single_triangle();
  PeriodicSolveResult r;
  r.window = period;
  r.dt = period / steps;
  for (int k = 0; k <= steps; ++k) {
    const double v = a(k * r.dt);
    r.samples.push_back({v, v, v});
  }
  return averaged_joule(r, m, CoefficientField::constant(m, sigma))[0];
}

}  // namespace

JouleCheck joule_single_tone(double sigma, double a0, double omega, int steps) {
  JouleCheck c;
  c.computed = joule_from_signal(sigma, [&](double t) { return a0 * std::sin(omega * t); }, 2.0 * kPi / omega, steps);
  c.expected = sigma * a0 * a0 * omega * omega / 2.0;
  return c;
}

JouleCheck joule_two_tone(double sigma, double a0, double b0, double omega, int k, int steps) {
  const double w2 = k * omega;
  const double period = 2.0 * kPi / omega;
  JouleCheck c;
  c.computed = joule_from_signal(
      sigma, [&](double t) { return a0 * std::sin(omega * t) + b0 * std::sin(w2 * t); }, period, steps * k);
  // composite Simpson on sigma A_t^2 over one period
  const int n = 20000;
  const double h = period / n;
  auto f = [&](double t) {
    const double at = a0 * omega * std::cos(omega * t) + b0 * w2 * std::cos(w2 * t);
    return sigma * at * at;
  };
  double s = f(0.0) + f(period);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  c.expected = s * h / 3.0 / period;
  return c;
}

double phase_constant_error() {
  PhaseKinetics k;
  k.austenite_start = 1000.0;
  k.austenite_finish = 1100.0;
  k.tau0 = 0.02;
  k.tau1 = 0.005;
  double worst = 0.0;
  for (double theta : {950.0, 1030.0, 1050.0, 1090.0, 1200.0}) {
    for (double z0 : {0.0, 0.2, 0.45}) {
      for (double span : {1e-3, 0.02, 0.1}) {
        const double zeq = k.z_eq(theta);
        const double closed = z0 < zeq ? zeq - (zeq - z0) * std::exp(-span / k.tau(theta)) : z0;
        for (int n : {1, 7, 50}) {
          double z = z0;
          for (int i = 0; i < n; ++i) z = advance_phase(z, theta, span / n, k);
          const double scale = std::max(std::abs(closed), 1e-300);
          worst = std::max(worst, closed == 0.0 ? std::abs(z) : std::abs(z - closed) / scale);
        }
      }
    }
  }
  return worst;
}

double phase_rk4_error() {
  PhaseKinetics k;
  k.austenite_start = 1000.0;
  k.austenite_finish = 1100.0;
  k.tau0 = 0.02;
  k.tau1 = 0.005;
  const double sub = k.tau_lower() / 10.0;
  const double temps[4] = {1020.0, 1050.0, 1080.0, 1120.0};
  double z = 0.0;
  double y = 0.0;
  double worst = 0.0;
  for (double theta : temps) {
    z = advance_phase(z, theta, sub, k);
    const int n = 400;
    const double h = sub / n;
    auto f = [&](double v) { return phase_rate(v, theta, k); };
    for (int i = 0; i < n; ++i) {
      const double k1 = f(y);
      const double k2 = f(y + 0.5 * h * k1);
      const double k3 = f(y + 0.5 * h * k2);
      const double k4 = f(y + h * k3);
      y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    worst = std::max(worst, std::abs(z - y));
  }
  return worst;
}

std::vector<CaseResult> run_battery() {
  std::vector<CaseResult> out;
  auto add = [&](std::string name, double metric, std::string threshold, bool pass) {
    out.push_back({std::move(name), metric, std::move(threshold), pass});
  };
  const double e1 = phase_constant_error();
  add("phase_constant_theta", e1, "relative error <= 1e-10", e1 <= 1e-10);
  const double e2 = phase_rk4_error();
  add("phase_rk4_oracle", e2, "abs error <= 1e-6", e2 <= 1e-6);

  const double mu0 = kVacuumPermeability;
  const SkinDepthResult s1 = skin_depth_case(1.0e4, 1.0e6, mu0);
  add("skin_depth_fit", s1.relative_error(), "relative error <= 0.05", s1.relative_error() <= 0.05);
  const SkinDepthResult s4 = skin_depth_case(4.0e4, 1.0e6, mu0, s1.analytic);
  const double halving = std::abs(s4.fitted / s1.fitted - 0.5) / 0.5;
  add("skin_depth_4f_halving", halving, "relative deviation from 1/2 <= 0.10", halving <= 0.10);

  const JouleCheck j1 = joule_single_tone(1.0e6, 1e-3, 2.0 * kPi * 1e4, 64);
  add("joule_single_tone", j1.relative_error(), "relative error <= 0.01", j1.relative_error() <= 0.01);
  const JouleCheck j2 = joule_two_tone(1.0e6, 1e-3, 2e-4, 2.0 * kPi * 1e4, 10, 64);
  add("joule_two_tone", j2.relative_error(), "relative error <= 0.01", j2.relative_error() <= 0.01);

  const OrderReport heat = manufactured_heat_order(4);
  add("heat_spatial_order", heat.order, "in [1.8, 2.2]", heat.order >= 1.8 && heat.order <= 2.2);
  const OrderReport em = manufactured_em_order(4);
  add("em_spatial_order", em.order, "in [1.8, 2.2]", em.order >= 1.8 && em.order <= 2.2);
  const OrderReport cn = cn_temporal_order(5);
  add("cn_temporal_order", cn.order, "in [1.9, 2.1]", cn.order >= 1.9 && cn.order <= 2.1);
  const OrderReport ie = manufactured_heat_temporal_order(4);
  add("heat_temporal_order", ie.order, ">= 0.9", ie.order >= 0.9);
  const double lin = linear_heat_error();
  add("heat_linear_exact", lin, "max error < 1e-10", lin < 1e-10);

  // auditor self-test: an injected negative phase rate must be flagged
  const Mesh tri = single_triangle();
  PhaseKinetics k;
  k.latent = 1.0;
  const std::vector<double> theta(3, 1200.0);
  const std::vector<double> z_n(3, 0.5);
  const std::vector<double> z_bad(3, 0.4);
  const DissipationTerms bad = dissipation_terms(tri, std::vector<double>(3, 0.0), theta, theta, z_n, z_bad, 1.0, 1.0, k);
  const double flagged = *std::min_element(bad.phase.begin(), bad.phase.end());
  add("dissipation_auditor_selftest", flagged, "injected violation < -1e-12", flagged < -1e-12);
  return out;
}

std::string battery_json(const std::vector<CaseResult>& cases) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const CaseResult& c : cases) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["metric"] = c.metric;
    j["threshold"] = c.threshold;
    j["pass"] = c.pass;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace ihsim
