#pragma once

#include <span>
#include <vector>

namespace ihsim {

/// Austenite formation kinetics z_t = (z_eq(theta) - z)^+ / tau(theta).
///
/// z_eq is a quintic smoothstep between the austenitization start and finish
/// temperatures (C^2, values in [0, 1]). tau blends from tau0 at the start
/// temperature to tau1 at the finish temperature with the same smoothstep, so
/// it stays within [min(tau0, tau1), max(tau0, tau1)].
struct PhaseKinetics {
  double austenite_start = 1000.0;   ///< K
  double austenite_finish = 1100.0;  ///< K
  double tau0 = 0.01;                ///< s
  double tau1 = 0.0;                 ///< s; <= 0 means constant tau0
  double latent = 0.0;               ///< J/m^3
  double bound = 0.0;                ///< declared M; <= 0 means "not declared"

  double z_eq(double theta) const;
  double z_eq_prime(double theta) const;
  double z_eq_second(double theta) const;
  double tau(double theta) const;
  double tau_prime(double theta) const;
  double tau_second(double theta) const;
  double tau_lower() const;
  double tau_upper() const;

  /// Sampled bound M on the C^2 norms of tau and z_eq and on
  /// |-z_eq + theta z_eq'| and |theta z_eq''|.
  double c2_bound() const;
  /// Sampled bound on |f(theta, z)| over theta >= 0, z in [0, 1].
  double latent_bound() const;
};

/// max(z_eq(theta) - z, 0) / tau(theta)
double phase_rate(double z, double theta, const PhaseKinetics& k);

/// Exact exponential update for frozen theta. The result never decreases z
/// and stays strictly below 1.
double advance_phase(double z, double theta, double dt, const PhaseKinetics& k);

std::vector<double> step_phase(std::span<const double> z, std::span<const double> theta, double dt,
                               const PhaseKinetics& k);

/// f(theta, z) = -L (z_eq(theta) - z - theta z_eq'(theta))
double latent_coeff(double theta, double z, const PhaseKinetics& k);

/// Thermodynamic form with the Heaviside factor:
/// -L (z_eq - z)^+ + L theta z_eq' H(z_eq - z)
double latent_coeff_heaviside(double theta, double z, const PhaseKinetics& k);

}  // namespace ihsim
