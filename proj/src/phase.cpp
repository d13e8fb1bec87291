#include "ihsim/phase.hpp"

#include <algorithm>
#include <cmath>

#include "ihsim/error.hpp"

namespace ihsim {

namespace {

struct Ramp {
  double s;      // normalised position in [0, 1]
  double scale;  // 1 / (finish - start)
};

Ramp ramp(const PhaseKinetics& k, double theta) {
  const double width = k.austenite_finish - k.austenite_start;
  const double s = std::clamp((theta - k.austenite_start) / width, 0.0, 1.0);
  return {s, 1.0 / width};
}

double smooth(double s) { return s * s * s * (10.0 + s * (-15.0 + 6.0 * s)); }
double smooth_d1(double s) { return 30.0 * s * s * (1.0 - s) * (1.0 - s); }
double smooth_d2(double s) { return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s); }

double tau_hot(const PhaseKinetics& k) { return k.tau1 > 0.0 ? k.tau1 : k.tau0; }

}  // namespace

double PhaseKinetics::z_eq(double theta) const { return smooth(ramp(*this, theta).s); }

double PhaseKinetics::z_eq_prime(double theta) const {
  const Ramp r = ramp(*this, theta);
  return smooth_d1(r.s) * r.scale;
}

double PhaseKinetics::z_eq_second(double theta) const {
  const Ramp r = ramp(*this, theta);
  return smooth_d2(r.s) * r.scale * r.scale;
}

double PhaseKinetics::tau(double theta) const {
  return tau0 + (tau_hot(*this) - tau0) * smooth(ramp(*this, theta).s);
}

double PhaseKinetics::tau_prime(double theta) const {
  const Ramp r = ramp(*this, theta);
  return (tau_hot(*this) - tau0) * smooth_d1(r.s) * r.scale;
}

double PhaseKinetics::tau_second(double theta) const {
  const Ramp r = ramp(*this, theta);
  return (tau_hot(*this) - tau0) * smooth_d2(r.s) * r.scale * r.scale;
}

double PhaseKinetics::tau_lower() const { return std::min(tau0, tau_hot(*this)); }
double PhaseKinetics::tau_upper() const { return std::max(tau0, tau_hot(*this)); }

double PhaseKinetics::c2_bound() const {
  double m = 0.0;
  const double hi = 2.0 * austenite_finish;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double th = hi * i / n;
    m = std::max({m, std::abs(z_eq(th)), std::abs(z_eq_prime(th)), std::abs(z_eq_second(th)),
                  std::abs(tau(th)), std::abs(tau_prime(th)), std::abs(tau_second(th)),
                  std::abs(-z_eq(th) + th * z_eq_prime(th)), std::abs(th * z_eq_second(th))});
  }
  return m;
}

double PhaseKinetics::latent_bound() const {
  double m = 0.0;
  const double hi = 2.0 * austenite_finish;
  const int n = 20000;
  for (int i = 0; i <= n; ++i) {
    const double th = hi * i / n;
    const double g = z_eq(th) - th * z_eq_prime(th);
    // |g - z| over z in [0, 1] peaks at an endpoint
    m = std::max({m, std::abs(g), std::abs(g - 1.0)});
  }
  return latent * m;
}

double phase_rate(double z, double theta, const PhaseKinetics& k) {
  return std::max(k.z_eq(theta) - z, 0.0) / k.tau(theta);
}

double advance_phase(double z, double theta, double dt, const PhaseKinetics& k) {
  const double zeq = k.z_eq(theta);
  if (!(z < zeq)) return z;
  double next = zeq - (zeq - z) * std::exp(-dt / k.tau(theta));
  // The exact flow never reaches z_eq = 1; keep that in floating point too.
  if (next >= 1.0) next = std::nextafter(1.0, 0.0);
  return std::max(next, z);
}

std::vector<double> step_phase(std::span<const double> z, std::span<const double> theta, double dt,
                               const PhaseKinetics& k) {
  if (z.size() != theta.size()) fail(ErrorKind::InvalidArgument, "phase and temperature lengths differ");
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "phase step must be positive");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = advance_phase(z[i], theta[i], dt, k);
  return out;
}

double latent_coeff(double theta, double z, const PhaseKinetics& k) {
  return -k.latent * (k.z_eq(theta) - z - theta * k.z_eq_prime(theta));
}

double latent_coeff_heaviside(double theta, double z, const PhaseKinetics& k) {
  const double gap = k.z_eq(theta) - z;
  const double heaviside = gap > 0.0 ? 1.0 : 0.0;
  return -k.latent * std::max(gap, 0.0) + k.latent * theta * k.z_eq_prime(theta) * heaviside;
}

}  // namespace ihsim
