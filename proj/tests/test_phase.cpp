#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ihsim/error.hpp"
#include "ihsim/phase.hpp"

using namespace ihsim;

namespace {

PhaseKinetics kinetics() {
  PhaseKinetics k;
  k.austenite_start = 1000.0;
  k.austenite_finish = 1100.0;
  k.tau0 = 0.02;
  k.tau1 = 0.005;
  k.latent = 1.0e8;
  return k;
}

}  // namespace

TEST_CASE("rate law examples") {
  const PhaseKinetics k = kinetics();
  CHECK(phase_rate(k.z_eq(1050.0), 1050.0, k) == 0.0);
  CHECK(phase_rate(0.9, 1050.0, k) == 0.0);
  CHECK(phase_rate(0.0, 900.0, k) == 0.0);
  PhaseKinetics flat = k;
  flat.tau1 = 0.0;
  CHECK(phase_rate(0.0, 1200.0, flat) == doctest::Approx(1.0 / 0.02).epsilon(1e-15));
  CHECK(phase_rate(0.0, 1200.0, k) == doctest::Approx(1.0 / 0.005).epsilon(1e-15));
}

TEST_CASE("exponential update examples") {
  PhaseKinetics k;
  k.austenite_start = 0.0;
  k.austenite_finish = 1.0;
  k.tau0 = 1.0;
  CHECK(k.z_eq(5.0) == 1.0);
  CHECK(advance_phase(0.0, 5.0, std::log(2.0), k) == doctest::Approx(0.5).epsilon(1e-15));
  // z_eq(0.5) = 0.5 for the symmetric smoothstep
  CHECK(k.z_eq(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(advance_phase(0.8, 0.5, 0.3, k) == 0.8);
  CHECK_THROWS_AS(step_phase(std::vector<double>{0.0}, std::vector<double>{1.0, 2.0}, 0.1, k), Error);
  CHECK_THROWS_AS(step_phase(std::vector<double>{0.0}, std::vector<double>{1.0}, 0.0, k), Error);
}

TEST_CASE("ramp and time-scale shape") {
  const PhaseKinetics k = kinetics();
  CHECK(k.z_eq(k.austenite_start) == 0.0);
  CHECK(k.z_eq(k.austenite_finish) == 1.0);
  CHECK(k.z_eq_prime(900.0) == 0.0);
  CHECK(k.z_eq_prime(1200.0) == 0.0);
  for (double th = 0.0; th <= 2500.0; th += 0.5) {
    CHECK(k.z_eq(th) >= 0.0);
    CHECK(k.z_eq(th) <= 1.0);
    CHECK(k.tau(th) >= k.tau_lower());
    CHECK(k.tau(th) <= k.tau_upper());
  }
  // finite-difference oracle for the first and second derivatives
  const double h = 1e-3;
  for (double th = 1001.0; th < 1100.0; th += 7.0) {
    const double d1 = (k.z_eq(th + h) - k.z_eq(th - h)) / (2.0 * h);
    const double d2 = (k.z_eq(th + h) - 2.0 * k.z_eq(th) + k.z_eq(th - h)) / (h * h);
    CHECK(std::abs(k.z_eq_prime(th) - d1) <= 1e-8);
    CHECK(std::abs(k.z_eq_second(th) - d2) <= 1e-5);
    const double t1 = (k.tau(th + h) - k.tau(th - h)) / (2.0 * h);
    CHECK(std::abs(k.tau_prime(th) - t1) <= 1e-10);
  }
  CHECK(k.c2_bound() > 0.0);
  CHECK(std::isfinite(k.c2_bound()));
}

TEST_CASE("latent heat coefficient") {
  PhaseKinetics k = kinetics();
  const double mid = 0.5 * (k.austenite_start + k.austenite_finish);
  const double h = 1e-4;
  const double fd = (k.z_eq(mid + h) - k.z_eq(mid - h)) / (2.0 * h);
  const double oracle = -k.latent * (k.z_eq(mid) - mid * fd);
  CHECK(std::abs(latent_coeff(mid, 0.0, k) - oracle) <= 1e-6 * std::abs(oracle));
  CHECK(latent_coeff(1200.0, 1.0, k) == 0.0);
  CHECK(latent_coeff(900.0, 0.0, k) == 0.0);
  k.latent = 0.0;
  CHECK(latent_coeff(mid, 0.3, k) == 0.0);
}

TEST_CASE("exponential update properties") {
  const PhaseKinetics k = kinetics();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> temp(800.0, 1300.0);
  std::uniform_real_distribution<double> frac(0.0, 0.999);
  std::uniform_real_distribution<double> step(1e-5, 0.5);
  for (int i = 0; i < 20000; ++i) {
    const double z = frac(rng);
    const double th = temp(rng);
    const double dt = step(rng);
    const double next = advance_phase(z, th, dt, k);
    CHECK(next >= z);
    CHECK(next < 1.0);
    CHECK(next <= std::max(z, k.z_eq(th)));
    // the rate products with and without the Heaviside factor agree
    const double rate = phase_rate(z, th, k);
    CHECK(latent_coeff(th, z, k) * rate ==
          doctest::Approx(latent_coeff_heaviside(th, z, k) * rate).epsilon(1e-12).scale(1.0));
  }
  // huge steps at full austenitization never reach one
  double z = 0.0;
  for (int i = 0; i < 100; ++i) z = advance_phase(z, 1500.0, 1e3, k);
  CHECK(z < 1.0);
}

TEST_CASE("Lipschitz in temperature") {
  const PhaseKinetics k = kinetics();
  // |d next / d theta| <= dt (|z_eq'| + |tau'| / tau_lower) for the exact update
  const double c = k.c2_bound() * (1.0 + 1.0 / k.tau_lower());
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> temp(950.0, 1150.0);
  std::uniform_real_distribution<double> frac(0.0, 0.5);
  for (double dt : {1e-4, 1e-3, 1e-2}) {
    for (int i = 0; i < 2000; ++i) {
      const double z = frac(rng);
      const double t1 = temp(rng);
      const double t2 = t1 + 1e-3 * temp(rng) / 1000.0;
      const double d = std::abs(advance_phase(z, t1, dt, k) - advance_phase(z, t2, dt, k));
      CHECK(d <= c * dt * std::abs(t1 - t2) + 1e-15);
    }
  }
}
