#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ihsim/fem.hpp"
#include "ihsim/geometry.hpp"

namespace ihsim {

/// Affine law in the austenite fraction: v(z) = at_z0 + (at_z1 - at_z0) z.
struct ZLinearLaw {
  double at_z0 = 0.0;
  double at_z1 = 0.0;

  double operator()(double z) const { return at_z0 + (at_z1 - at_z0) * z; }
  double derivative() const { return at_z1 - at_z0; }
  double min() const { return at_z0 < at_z1 ? at_z0 : at_z1; }
  double max() const { return at_z0 < at_z1 ? at_z1 : at_z0; }
};

inline constexpr double kVacuumPermeability = 1.25663706212e-6;

/// Piecewise conductivity and permeability: vacuum values in air, constants
/// in the coil, z-dependent laws in the workpiece.
struct MaterialModel {
  double sigma_coil = 5.8e7;
  ZLinearLaw sigma_workpiece{5.0e6, 5.0e6};
  double mu_vacuum = kVacuumPermeability;
  double mu_coil = kVacuumPermeability;
  ZLinearLaw mu_workpiece{kVacuumPermeability, kVacuumPermeability};
  /// Declared bounds; a nonpositive value means "derive from the laws".
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  double mu_min = 0.0;
  double mu_max = 0.0;

  double sigma_lower() const;
  double sigma_upper() const;
  double mu_lower() const;
  double mu_upper() const;
  /// Lipschitz constant of sigma_field with respect to z.
  double sigma_lipschitz() const { return std::abs(sigma_workpiece.derivative()); }
};

struct MaterialViolation {
  std::string key;
  std::string clause;
  std::string message;
};

/// Conductivity and permeability bound checks; empty when valid.
std::vector<MaterialViolation> check_material(const MaterialModel& model);

/// Per-triangle conductivity. `z` is a nodal field on the full mesh; only
/// values at workpiece vertices are read, each in [0, 1].
CoefficientField sigma_field(const MaterialModel& model, const Mesh& mesh, std::span<const double> z);

/// Per-triangle reciprocal permeability, strictly positive.
CoefficientField inv_mu_field(const MaterialModel& model, const Mesh& mesh, std::span<const double> z);

}  // namespace ihsim
