#include "ihsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "ihsim/error.hpp"

namespace ihsim {

double skin_depth(double frequency, double mu, double sigma) {
  return std::sqrt(2.0 / (2.0 * std::numbers::pi * frequency * mu * sigma));
}

int TimeSettings::coarse_steps() const {
  if (!(coarse_dt > 0.0)) return 0;
  return static_cast<int>(std::lround(total / coarse_dt));
}

namespace {

constexpr const char* kClauseI = "assumption (i) conductivity bounds";
constexpr const char* kClauseII = "assumption (ii) permeability bounds";
constexpr const char* kClauseIII = "assumption (iii) source regularity";
constexpr const char* kClauseIV = "assumption (iv) phase kinetics bounds";
constexpr const char* kClauseV = "assumption (v) boundary data";
constexpr const char* kClauseVI = "assumption (vi) initial temperature";
constexpr const char* kModule = "module constraint";

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Parser {
  int line = 0;
  std::string key;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, "line " + std::to_string(line) + ": " + key + ": " + msg);
  }

  double number(const std::string& s) const {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) error("expected a number, got '" + s + "'");
    return v;
  }

  int integer(const std::string& s) const {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) error("expected an integer, got '" + s + "'");
    return v;
  }

  bool boolean(const std::string& s) const {
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    error("expected a boolean, got '" + s + "'");
  }

  std::vector<double> numbers(const std::string& s) const {
    std::vector<double> out;
    for (const std::string& part : split(s, ',')) out.push_back(number(part));
    return out;
  }

  Point point(const std::string& s) const {
    const std::vector<double> v = numbers(s);
    if (v.size() != 2) error("expected 'x, y'");
    return {v[0], v[1]};
  }

  std::vector<Point> points(const std::string& s) const {
    std::vector<Point> out;
    if (s.empty()) return out;
    for (const std::string& part : split(s, ';')) {
      if (!part.empty()) out.push_back(point(part));
    }
    return out;
  }

  EdgeTag tag(const std::string& s) const {
    if (s == "outer" || s == "OUTER") return EdgeTag::Outer;
    if (s == "symmetry" || s == "SYMMETRY") return EdgeTag::Symmetry;
    error("expected 'outer' or 'symmetry'");
  }

  std::vector<NamedBox> boxes(const std::string& s) const {
    std::vector<NamedBox> out;
    if (s.empty()) return out;
    for (const std::string& part : split(s, ';')) {
      if (part.empty()) continue;
      const auto colon = part.find(':');
      if (colon == std::string::npos) error("expected 'name: x0, y0, x1, y1'");
      const std::vector<double> v = numbers(trim(std::string_view(part).substr(colon + 1)));
      if (v.size() != 4) error("expected 'name: x0, y0, x1, y1'");
      out.push_back({trim(std::string_view(part).substr(0, colon)), {v[0], v[1]}, {v[2], v[3]}});
    }
    return out;
  }
};

void apply(RunConfig& c, const std::string& section, const std::string& key, const std::string& value,
           Parser& p, std::map<int, Polygon>& coils) {
  p.key = section + "." + key;
  if (section == "domain") {
    DomainSpec& d = c.mesh.domain;
    if (key == "box") {
      const std::vector<double> v = p.numbers(value);
      if (v.size() != 4) p.error("expected 'x0, y0, x1, y1'");
      d.box_min = {v[0], v[1]};
      d.box_max = {v[2], v[3]};
    } else if (key == "symmetry") {
      d.set_symmetry(p.boolean(value));
    } else if (key == "side_bottom") {
      d.side_tags[0] = p.tag(value);
    } else if (key == "side_right") {
      d.side_tags[1] = p.tag(value);
    } else if (key == "side_top") {
      d.side_tags[2] = p.tag(value);
    } else if (key == "side_left") {
      d.side_tags[3] = p.tag(value);
    } else if (key == "workpiece") {
      d.workpiece = p.points(value);
    } else if (key.rfind("coil", 0) == 0 && key.size() > 4 &&
               std::all_of(key.begin() + 4, key.end(), [](char ch) { return ch >= '0' && ch <= '9'; })) {
      coils[p.integer(key.substr(4))] = p.points(value);
    } else if (key == "h") {
      d.h = p.number(value);
    } else if (key == "h_air") {
      d.h_air = p.number(value);
    } else if (key == "refine_depth") {
      c.mesh.refine_depth = value == "auto" ? 0.0 : p.number(value);
    } else if (key == "refine_levels") {
      c.mesh.refine_levels = value == "auto" ? -1 : p.integer(value);
    } else if (key == "symmetry_dirichlet") {
      c.mesh.symmetry_dirichlet = p.boolean(value);
    } else {
      p.error("unknown key");
    }
  } else if (section == "materials") {
    MaterialModel& m = c.materials;
    if (key == "sigma_coil") m.sigma_coil = p.number(value);
    else if (key == "sigma_workpiece_z0") m.sigma_workpiece.at_z0 = p.number(value);
    else if (key == "sigma_workpiece_z1") m.sigma_workpiece.at_z1 = p.number(value);
    else if (key == "mu_vacuum") m.mu_vacuum = p.number(value);
    else if (key == "mu_coil") m.mu_coil = p.number(value);
    else if (key == "mu_workpiece_z0") m.mu_workpiece.at_z0 = p.number(value);
    else if (key == "mu_workpiece_z1") m.mu_workpiece.at_z1 = p.number(value);
    else if (key == "sigma_min") m.sigma_min = p.number(value);
    else if (key == "sigma_max") m.sigma_max = p.number(value);
    else if (key == "mu_min") m.mu_min = p.number(value);
    else if (key == "mu_max") m.mu_max = p.number(value);
    else p.error("unknown key");
  } else if (section == "phase") {
    PhaseKinetics& k = c.kinetics;
    if (key == "A_s") k.austenite_start = p.number(value);
    else if (key == "A_f") k.austenite_finish = p.number(value);
    else if (key == "tau0") k.tau0 = p.number(value);
    else if (key == "tau1") k.tau1 = p.number(value);
    else if (key == "latent_L") k.latent = p.number(value);
    else if (key == "M") k.bound = p.number(value);
    else p.error("unknown key");
  } else if (section == "thermal") {
    ThermalParams& t = c.thermal;
    if (key == "c_v") t.c_v = p.number(value);
    else if (key == "kappa") t.kappa = p.number(value);
    else if (key == "eta") t.eta = p.number(value);
    else if (key == "g_ambient") t.g = p.number(value);
    else if (key == "theta0") t.theta0 = p.number(value);
    else p.error("unknown key");
  } else if (section == "source") {
    SourceSettings& s = c.source;
    if (key == "j0") s.j0 = p.numbers(value);
    else if (key == "amp_mf") s.amp_mf = p.number(value);
    else if (key == "amp_hf") s.amp_hf = p.number(value);
    else if (key == "f_mf") s.f_mf = p.number(value);
    else if (key == "f_hf") s.f_hf = p.number(value);
    else if (key == "power_budget") s.power_budget = p.number(value);
    else if (key == "hf_power_fraction") s.hf_power_fraction = p.number(value);
    else p.error("unknown key");
  } else if (section == "time") {
    TimeSettings& t = c.time;
    if (key == "total") t.total = p.number(value);
    else if (key == "coarse_dt") t.coarse_dt = p.number(value);
    else if (key == "steps_per_hf_period") t.steps_per_hf_period = p.integer(value);
    else if (key == "periodic_tol") t.periodic_tol = p.number(value);
    else if (key == "max_windows") t.max_windows = p.integer(value);
    else if (key == "solver_tol") t.solver_tol = p.number(value);
    else p.error("unknown key");
  } else if (section == "output") {
    OutputSettings& o = c.output;
    if (key == "probes") o.probes = p.points(value);
    else if (key == "regions") o.regions = p.boxes(value);
    else if (key == "snapshot_every") o.snapshot_every = p.integer(value);
    else p.error("unknown key");
  } else {
    p.error("unknown section [" + section + "]");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_points(const std::vector<Point>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += "; ";
    out += fmt(pts[i].x) + ", " + fmt(pts[i].y);
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  Parser p;
  std::map<int, Polygon> coils;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++p.line;
    p.key.clear();
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.error("unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) p.error("expected 'key = value'");
    if (section.empty()) p.error("key outside of a section");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) p.error("empty key");
    apply(cfg, section, key, value, p, coils);
  }
  for (auto& [index, poly] : coils) cfg.mesh.domain.coils.push_back(std::move(poly));
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::vector<ConfigViolation> check_config(const RunConfig& c) {
  std::vector<ConfigViolation> out;
  auto add = [&](const std::string& key, const char* clause, const std::string& msg) {
    out.push_back({key, clause, msg});
  };
  auto finite = [](double v) { return std::isfinite(v); };

  for (const MaterialViolation& v : check_material(c.materials)) add(v.key, v.clause.c_str(), v.message);

  const SourceSettings& s = c.source;
  if (!finite(s.f_mf) || !(s.f_mf > 0.0)) add("f_mf", kClauseIII, "f_mf must be positive and finite");
  if (!finite(s.f_hf) || !(s.f_hf > 0.0)) add("f_hf", kClauseIII, "f_hf must be positive and finite");
  if (!finite(s.amp_mf)) add("amp_mf", kClauseIII, "amp_mf must be finite");
  if (!finite(s.amp_hf)) add("amp_hf", kClauseIII, "amp_hf must be finite");
  if (s.f_mf > 0.0 && s.f_hf > 0.0 && finite(s.f_mf) && finite(s.f_hf)) {
    const double k = s.f_hf / s.f_mf;
    if (std::round(k) < 1.0 || std::abs(k - std::round(k)) > 1e-9 * k) {
      add("f_hf", kModule, "f_HF must be an integer multiple of f_MF");
    }
  }
  const std::size_t ncoils = c.mesh.domain.coils.size();
  if (ncoils > 0 && s.j0.size() != ncoils && s.j0.size() != 1) {
    add("j0", kClauseIII, "j0 needs one value or one value per coil");
  }
  for (double v : s.j0) {
    if (!finite(v)) add("j0", kClauseIII, "j0 must be finite");
  }
  if (!finite(s.power_budget) || s.power_budget < 0.0) add("power_budget", kModule, "power_budget must be >= 0");
  if (!(s.hf_power_fraction >= 0.0 && s.hf_power_fraction <= 1.0)) {
    add("hf_power_fraction", kModule, "hf_power_fraction must lie in [0, 1]");
  }

  const PhaseKinetics& k = c.kinetics;
  if (!finite(k.tau0) || !(k.tau0 > 0.0)) add("tau0", kClauseIV, "tau0 must be positive (tau_* > 0)");
  if (!finite(k.tau1) || k.tau1 < 0.0) add("tau1", kClauseIV, "tau1 must be >= 0 (0 keeps tau constant)");
  if (!finite(k.austenite_start) || !finite(k.austenite_finish) || !(k.austenite_start < k.austenite_finish)) {
    add("A_s", kClauseIV, "A_s must be below A_f");
  } else if (k.tau0 > 0.0 && k.tau1 >= 0.0) {
    for (int i = 0; i <= 1000; ++i) {
      const double th = 2.0 * k.austenite_finish * i / 1000.0;
      const double z = k.z_eq(th);
      if (!(z >= 0.0 && z <= 1.0)) {
        add("A_s", kClauseIV, "z_eq leaves [0, 1]");
        break;
      }
    }
    if (k.bound > 0.0 && k.c2_bound() > k.bound) add("M", kClauseIV, "C2 bounds of z_eq and tau exceed M");
  }
  if (!finite(k.latent) || k.latent < 0.0) add("latent_L", kClauseIV, "latent_L must be >= 0");

  const ThermalParams& t = c.thermal;
  if (!finite(t.g) || t.g < 0.0) add("g_ambient", kClauseV, "g_ambient must be nonnegative and bounded");
  if (!finite(t.theta0) || t.theta0 < 0.0) add("theta0", kClauseVI, "theta0 must be nonnegative");
  if (!finite(t.c_v) || !(t.c_v > 0.0)) add("c_v", kModule, "c_v must be positive");
  if (!finite(t.kappa) || !(t.kappa > 0.0)) add("kappa", kModule, "kappa must be positive");
  if (!finite(t.eta) || t.eta < 0.0) add("eta", kModule, "eta must be nonnegative");

  const TimeSettings& tm = c.time;
  if (!finite(tm.total) || tm.total < 0.0) add("total", kModule, "total must be >= 0");
  if (!finite(tm.coarse_dt) || !(tm.coarse_dt > 0.0)) {
    add("coarse_dt", kModule, "coarse_dt must be positive");
  } else if (tm.total > 0.0) {
    const double n = tm.total / tm.coarse_dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
      add("total", kModule, "total must be an integer multiple of coarse_dt");
    }
  }
  if (tm.steps_per_hf_period < 20) add("steps_per_hf_period", kModule, "at least 20 fine steps per HF period");
  if (tm.coarse_dt > 0.0 && s.f_hf > 0.0 && tm.steps_per_hf_period > 0 &&
      tm.coarse_dt / tm.fine_dt(s.f_hf) < 100.0 * (1.0 - 1e-12)) {
    add("coarse_dt", kModule, "coarse step must be at least 100 fine steps");
  }
  if (!(tm.periodic_tol > 0.0)) add("periodic_tol", kModule, "periodic_tol must be positive");
  if (tm.max_windows < 1) add("max_windows", kModule, "max_windows must be >= 1");
  if (!(tm.solver_tol > 0.0 && tm.solver_tol < 1.0)) add("solver_tol", kModule, "solver_tol must lie in (0, 1)");

  try {
    validate(c.mesh.domain);
  } catch (const Error& e) {
    add("workpiece", kModule, e.what());
  }
  if (c.mesh.domain.workpiece.empty()) add("workpiece", kModule, "a workpiece polygon is required");
  if (c.mesh.refine_depth < 0.0 || !finite(c.mesh.refine_depth)) add("refine_depth", kModule, "refine_depth must be >= 0");
  for (const Point& pt : c.output.probes) {
    if (c.mesh.domain.workpiece.empty() || !point_in_polygon(pt, c.mesh.domain.workpiece)) {
      add("probes", kModule, "probe points must lie inside the workpiece");
      break;
    }
  }
  for (const NamedBox& b : c.output.regions) {
    if (b.name.empty() || !(b.lo.x < b.hi.x) || !(b.lo.y < b.hi.y)) {
      add("regions", kModule, "regions need a name and x0 < x1, y0 < y1");
    }
  }
  if (c.output.snapshot_every < 0) add("snapshot_every", kModule, "snapshot_every must be >= 0");
  return out;
}

void validate(const RunConfig& cfg) {
  const std::vector<ConfigViolation> v = check_config(cfg);
  if (v.empty()) return;
  std::string msg = "invalid configuration:";
  for (const ConfigViolation& e : v) msg += "\n  " + e.key + " [" + e.clause + "]: " + e.message;
  fail(ErrorKind::Validation, msg);
}

std::string to_ini(const RunConfig& c) {
  std::ostringstream os;
  const DomainSpec& d = c.mesh.domain;
  const char* side_names[4] = {"side_bottom", "side_right", "side_top", "side_left"};
  os << "[domain]\n";
  os << "box = " << fmt(d.box_min.x) << ", " << fmt(d.box_min.y) << ", " << fmt(d.box_max.x) << ", "
     << fmt(d.box_max.y) << "\n";
  for (int i = 0; i < 4; ++i) {
    os << side_names[i] << " = " << (d.side_tags[i] == EdgeTag::Symmetry ? "symmetry" : "outer") << "\n";
  }
  os << "workpiece = " << fmt_points(d.workpiece) << "\n";
  for (std::size_t i = 0; i < d.coils.size(); ++i) os << "coil" << i + 1 << " = " << fmt_points(d.coils[i]) << "\n";
  os << "h = " << fmt(d.h) << "\nh_air = " << fmt(d.h_air) << "\n";
  os << "refine_depth = " << fmt(c.mesh.refine_depth) << "\nrefine_levels = " << c.mesh.refine_levels << "\n";
  os << "symmetry_dirichlet = " << (c.mesh.symmetry_dirichlet ? "true" : "false") << "\n";
  const MaterialModel& m = c.materials;
  os << "\n[materials]\n";
  os << "sigma_coil = " << fmt(m.sigma_coil) << "\n";
  os << "sigma_workpiece_z0 = " << fmt(m.sigma_workpiece.at_z0) << "\n";
  os << "sigma_workpiece_z1 = " << fmt(m.sigma_workpiece.at_z1) << "\n";
  os << "mu_vacuum = " << fmt(m.mu_vacuum) << "\nmu_coil = " << fmt(m.mu_coil) << "\n";
  os << "mu_workpiece_z0 = " << fmt(m.mu_workpiece.at_z0) << "\n";
  os << "mu_workpiece_z1 = " << fmt(m.mu_workpiece.at_z1) << "\n";
  os << "sigma_min = " << fmt(m.sigma_min) << "\nsigma_max = " << fmt(m.sigma_max) << "\n";
  os << "mu_min = " << fmt(m.mu_min) << "\nmu_max = " << fmt(m.mu_max) << "\n";
  const PhaseKinetics& k = c.kinetics;
  os << "\n[phase]\n";
  os << "A_s = " << fmt(k.austenite_start) << "\nA_f = " << fmt(k.austenite_finish) << "\n";
  os << "tau0 = " << fmt(k.tau0) << "\ntau1 = " << fmt(k.tau1) << "\n";
  os << "latent_L = " << fmt(k.latent) << "\nM = " << fmt(k.bound) << "\n";
  const ThermalParams& t = c.thermal;
  os << "\n[thermal]\n";
  os << "c_v = " << fmt(t.c_v) << "\nkappa = " << fmt(t.kappa) << "\neta = " << fmt(t.eta) << "\n";
  os << "g_ambient = " << fmt(t.g) << "\ntheta0 = " << fmt(t.theta0) << "\n";
  const SourceSettings& s = c.source;
  os << "\n[source]\n";
  if (!s.j0.empty()) {
    os << "j0 = ";
    for (std::size_t i = 0; i < s.j0.size(); ++i) os << (i ? ", " : "") << fmt(s.j0[i]);
    os << "\n";
  }
  os << "amp_mf = " << fmt(s.amp_mf) << "\namp_hf = " << fmt(s.amp_hf) << "\n";
  os << "f_mf = " << fmt(s.f_mf) << "\nf_hf = " << fmt(s.f_hf) << "\n";
  os << "power_budget = " << fmt(s.power_budget) << "\nhf_power_fraction = " << fmt(s.hf_power_fraction) << "\n";
  const TimeSettings& tm = c.time;
  os << "\n[time]\n";
  os << "total = " << fmt(tm.total) << "\ncoarse_dt = " << fmt(tm.coarse_dt) << "\n";
  os << "steps_per_hf_period = " << tm.steps_per_hf_period << "\nperiodic_tol = " << fmt(tm.periodic_tol) << "\n";
  os << "max_windows = " << tm.max_windows << "\nsolver_tol = " << fmt(tm.solver_tol) << "\n";
  const OutputSettings& o = c.output;
  os << "\n[output]\n";
  os << "probes = " << fmt_points(o.probes) << "\n";
  os << "regions = ";
  for (std::size_t i = 0; i < o.regions.size(); ++i) {
    const NamedBox& b = o.regions[i];
    os << (i ? "; " : "") << b.name << ": " << fmt(b.lo.x) << ", " << fmt(b.lo.y) << ", " << fmt(b.hi.x) << ", "
       << fmt(b.hi.y);
  }
  os << "\nsnapshot_every = " << o.snapshot_every << "\n";
  return os.str();
}

}  // namespace ihsim
