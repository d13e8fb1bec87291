#include "ihsim/materials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ihsim/error.hpp"

namespace ihsim {

double MaterialModel::sigma_lower() const {
  return sigma_min > 0.0 ? sigma_min : std::min(sigma_coil, sigma_workpiece.min());
}
double MaterialModel::sigma_upper() const {
  return sigma_max > 0.0 ? sigma_max : std::max(sigma_coil, sigma_workpiece.max());
}
double MaterialModel::mu_lower() const {
  return mu_min > 0.0 ? mu_min : std::min({mu_vacuum, mu_coil, mu_workpiece.min()});
}
double MaterialModel::mu_upper() const {
  return mu_max > 0.0 ? mu_max : std::max({mu_vacuum, mu_coil, mu_workpiece.max()});
}

std::vector<MaterialViolation> check_material(const MaterialModel& m) {
  std::vector<MaterialViolation> out;
  auto finite_positive = [&](double v, const char* key, const char* clause) {
    if (!std::isfinite(v) || !(v > 0.0)) {
      out.push_back({key, clause, std::string(key) + " must be positive and finite"});
      return false;
    }
    return true;
  };
  const char* hs = "assumption (i) conductivity bounds";
  const char* hm = "assumption (ii) permeability bounds";
  const bool s_ok = finite_positive(m.sigma_coil, "sigma_coil", hs) &
                    finite_positive(m.sigma_workpiece.at_z0, "sigma_workpiece_z0", hs) &
                    finite_positive(m.sigma_workpiece.at_z1, "sigma_workpiece_z1", hs);
  const bool m_ok = finite_positive(m.mu_vacuum, "mu_vacuum", hm) & finite_positive(m.mu_coil, "mu_coil", hm) &
                    finite_positive(m.mu_workpiece.at_z0, "mu_workpiece_z0", hm) &
                    finite_positive(m.mu_workpiece.at_z1, "mu_workpiece_z1", hm);
  if (s_ok) {
    const double lo = m.sigma_lower();
    const double hi = m.sigma_upper();
    if (!(lo > 0.0) || !(lo <= hi)) {
      out.push_back({"sigma_min", hs, "conductivity bounds must satisfy 0 < sigma_min <= sigma_max"});
    } else {
      // affine laws attain their extrema at z = 0 and z = 1
      for (auto [v, key] : {std::pair{m.sigma_coil, "sigma_coil"},
                            std::pair{m.sigma_workpiece.at_z0, "sigma_workpiece_z0"},
                            std::pair{m.sigma_workpiece.at_z1, "sigma_workpiece_z1"}}) {
        if (v < lo || v > hi) out.push_back({key, hs, std::string(key) + " outside [sigma_min, sigma_max]"});
      }
    }
  }
  if (m_ok) {
    const double lo = m.mu_lower();
    const double hi = m.mu_upper();
    if (!(lo > 0.0) || !(lo <= hi)) {
      out.push_back({"mu_min", hm, "permeability bounds must satisfy 0 < mu_min <= mu_max"});
    } else {
      for (auto [v, key] : {std::pair{m.mu_vacuum, "mu_vacuum"}, std::pair{m.mu_coil, "mu_coil"},
                            std::pair{m.mu_workpiece.at_z0, "mu_workpiece_z0"},
                            std::pair{m.mu_workpiece.at_z1, "mu_workpiece_z1"}}) {
        if (v < lo || v > hi) out.push_back({key, hm, std::string(key) + " outside [mu_min, mu_max]"});
      }
    }
  }
  return out;
}

namespace {

double workpiece_mean_z(const Mesh& mesh, std::size_t t, std::span<const double> z) {
  const Triangle& tr = mesh.triangles[t];
  double s = 0.0;
  for (int v : tr) {
    const double zv = z[v];
    if (!(zv >= 0.0 && zv <= 1.0)) {
      fail(ErrorKind::InvalidArgument, "austenite fraction outside [0, 1] at vertex " + std::to_string(v));
    }
    s += zv;
  }
  return s / 3.0;
}

void check_sizes(const Mesh& mesh, std::span<const double> z) {
  if (z.size() != mesh.num_vertices()) {
    fail(ErrorKind::InvalidArgument, "phase field length differs from vertex count");
  }
}

}  // namespace

CoefficientField sigma_field(const MaterialModel& model, const Mesh& mesh, std::span<const double> z) {
  check_sizes(mesh, z);
  CoefficientField out{std::vector<double>(mesh.num_triangles(), 0.0)};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    switch (mesh.regions[t]) {
      case Region::Air: out.values[t] = 0.0; break;
      case Region::Coil: out.values[t] = model.sigma_coil; break;
      case Region::Workpiece: out.values[t] = model.sigma_workpiece(workpiece_mean_z(mesh, t, z)); break;
    }
  }
  return out;
}

CoefficientField inv_mu_field(const MaterialModel& model, const Mesh& mesh, std::span<const double> z) {
  check_sizes(mesh, z);
  CoefficientField out{std::vector<double>(mesh.num_triangles(), 0.0)};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    switch (mesh.regions[t]) {
      case Region::Air: out.values[t] = 1.0 / model.mu_vacuum; break;
      case Region::Coil: out.values[t] = 1.0 / model.mu_coil; break;
      case Region::Workpiece: out.values[t] = 1.0 / model.mu_workpiece(workpiece_mean_z(mesh, t, z)); break;
    }
  }
  return out;
}

}  // namespace ihsim
