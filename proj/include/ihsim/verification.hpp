#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ihsim/driver.hpp"
#include "ihsim/geometry.hpp"
#include "ihsim/phase.hpp"

namespace ihsim {

struct OrderReport {
  std::string name;
  std::vector<double> sizes;
  std::vector<double> errors;
  double order = 0.0;
};

/// Least-squares slope of log(error) against log(size).
double fit_order(std::span<const double> sizes, std::span<const double> errors);

/// L2 norm of (uh - exact) on a mesh with a degree-4 triangle rule.
double l2_error(const Mesh& mesh, std::span<const double> uh, const std::function<double(Point)>& exact);

/// Unit square meshed at size 1/4 and red-refined `level` times.
Mesh unit_square_mesh(int level, Region region = Region::Workpiece);

/// e^{-t} cos(pi x) cos(pi y) with c_v = kappa = eta = 1 and Robin data g = theta.
/// Time step proportional to h^2; error in L2 at t = 0.1.
OrderReport manufactured_heat_order(int levels);
/// Spatially uniform heat solution 1 + e^{-t} under dt halving (implicit Euler).
OrderReport manufactured_heat_temporal_order(int levels);
/// Steady linear temperature 1 + x + 2y with Neumann data: max nodal error.
double linear_heat_error();

/// A = sin(pi x) sin(pi y) (sin wt - (sigma w / lambda) cos wt) on the unit
/// square (all conductor, A = 0 on the boundary) after one period.
OrderReport manufactured_em_order(int levels);
/// Crank-Nicolson on sigma a' + k a = j sin(w t) against the closed form.
OrderReport cn_temporal_order(int levels);

struct SkinDepthResult {
  double frequency = 0.0;
  double analytic = 0.0;
  double fitted = 0.0;
  int windows = 0;
  std::size_t vertices = 0;
  double relative_error() const { return std::abs(fitted - analytic) / analytic; }
};

/// Conductor strip of thickness 8 L with symmetry sides and a coil layer above,
/// meshed at L/4 with one refinement level near the surface. L defaults to the
/// analytic delta; pass the delta of another frequency to reuse its mesh.
/// Periodic solve, log-linear fit of the A_t amplitude against depth between
/// 0.5 and 5 delta.
SkinDepthResult skin_depth_case(double frequency, double sigma, double mu, double length = 0.0);

struct JouleCheck {
  double computed = 0.0;
  double expected = 0.0;
  double relative_error() const { return std::abs(computed - expected) / std::abs(expected); }
};
/// A(t) = a0 sin(w t) sampled with `steps` per period on one triangle.
JouleCheck joule_single_tone(double sigma, double a0, double omega, int steps);
/// a0 sin(w t) + b0 sin(k w t) with `steps` per HF period; expected value from
/// a fine composite-Simpson quadrature of sigma A_t^2.
JouleCheck joule_two_tone(double sigma, double a0, double b0, double omega, int k, int steps);

/// Largest relative error of the exponential phase step against the closed
/// form for constant temperatures.
double phase_constant_error();
/// Largest absolute difference between exponential substeps with a
/// piecewise-constant temperature and a fine RK4 integration.
double phase_rk4_error();

struct CaseResult {
  std::string name;
  double metric = 0.0;
  std::string threshold;
  bool pass = false;
};

/// The hermetic battery behind `verify`.
std::vector<CaseResult> run_battery();

/// JSON array of case records.
std::string battery_json(const std::vector<CaseResult>& cases);

}  // namespace ihsim
