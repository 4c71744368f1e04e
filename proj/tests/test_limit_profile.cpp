#include <cmath>
#include <vector>

#include "doctest.h"
#include "spike/error.hpp"
#include "spike/limit_profile.hpp"

using namespace spike;

TEST_CASE("homoclinic profile: value, decay and ODE residual") {
  CHECK(z0(0.0) == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-15));
  CHECK(z0(40.0) < 1e-16);
  CHECK(z0(-40.0) < 1e-16);
  CHECK(z0(1.3) == z0(-1.3));
  const double h = 1e-4;
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = -10.0 + 20.0 * i / 2000.0;
    const double d2 = (z0(s + h) - 2.0 * z0(s) + z0(s - h)) / (h * h);
    worst = std::max(worst, std::fabs(d2 + std::pow(z0(s), 5) - z0(s)));
    CHECK(z0_prime(s) == doctest::Approx((z0(s + h) - z0(s - h)) / (2 * h)).epsilon(1e-7));
  }
  MESSAGE("finite-difference residual " << worst);
  CHECK(worst < 1e-6);
}

TEST_CASE("homoclinic profile: residual from the analytic second derivative") {
  // Z0'' = Z0 - Z0^5 is checked on the closed form of Z0''.
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double s = -10.0 + 20.0 * i / 2000.0;
    const double c = std::cosh(2.0 * s), t = std::tanh(2.0 * s);
    // Z0 = sigma c^(-1/2): Z0' = -sigma t c^(-1/2), Z0'' = sigma c^(-1/2) (3 t^2 - 2).
    const double d2 = kSigma / std::sqrt(c) * (3.0 * t * t - 2.0);
    worst = std::max(worst, std::fabs(d2 + std::pow(z0(s), 5) - z0(s)));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("profile trichotomy") {
  for (double a : {0.2, 0.5, 0.9, 1.1, 1.3}) {
    const ProfileClass c = classify_profile(a);
    CHECK(c.kind == ProfileKind::Oscillatory);
    CHECK(c.energy_drift < 1e-9);
    CHECK(c.energy == doctest::Approx(std::pow(a, 6) / 6 - a * a / 2).epsilon(1e-15));
  }
  for (double a : {1.4, 1.5, 2.0}) {
    const ProfileClass c = classify_profile(a);
    CHECK(c.kind == ProfileKind::VanishesLeft);
    REQUIRE(c.event_s.has_value());
    CHECK(*c.event_s < 0.0);
    CHECK(c.energy_drift < 1e-9);
  }
  const ProfileClass h = classify_profile(kSigma);
  CHECK(h.kind == ProfileKind::Homoclinic);
  CHECK(h.window == doctest::Approx(kHomoclinicWindow));
  CHECK(h.energy_drift < 1e-9);
  CHECK_THROWS_AS(classify_profile(0.0), Error);
  try {
    classify_profile(1.0);
    FAIL("equilibrium has no decisive event");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Inconclusive);
  }
}

TEST_CASE("rescaling") {
  const ShootProfile eq = classify(Params::from_lambda(1.0, -25.0), integrate_ivp(Params::from_lambda(1.0, -25.0)));
  const RescaledTrajectory r = rescale(eq, 1.0);
  for (const RescaledSample& x : r.samples) CHECK(x.z == doctest::Approx(1.0).epsilon(1e-12));

  const ShootProfile p = spike_at(0.2, 1.0);
  const double t_ref = p.criticals[0].tau;
  const RescaledTrajectory z = rescale(p, t_ref);
  CHECK(z.epsilon == doctest::Approx(0.2));
  REQUIRE_FALSE(z.samples.empty());
  const RescaledSample& last = z.samples.back();
  CHECK(last.s == 0.0);
  CHECK(last.z == p.trajectory.u(t_ref));
  CHECK(std::fabs(last.dz) < 1e-8);
  CHECK(z.samples.front().s == doctest::Approx((kQuarterPi - t_ref) / 0.2).epsilon(1e-12));
  // Chain rule: dz matches the finite difference of z in s.
  const double h = 1e-5;
  for (std::size_t i = 10; i + 10 < z.samples.size(); i += 37) {
    const double s = z.samples[i].s;
    const double fd = (p.trajectory.u(t_ref + 0.2 * (s + h)) - p.trajectory.u(t_ref + 0.2 * (s - h))) / (2 * h);
    CHECK(std::fabs(z.samples[i].dz - fd) < 1e-6);
  }
  CHECK_THROWS_AS(rescale(p, t_ref + 0.01), Error);
}

TEST_CASE("one-spike solutions converge to the homoclinic profile") {
  std::vector<double> errs;
  for (double eps : {0.2, 0.1, 0.05}) {
    const ShootProfile s = spike_at(eps, 1.0);
    REQUIRE_FALSE(s.criticals.empty());
    CHECK(s.criticals[0].tau == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(s.criticals[0].kind == CriticalKind::Max);
    const double e = convergence_error(s, 3.0, 1.0);
    CHECK(std::fabs(s.trajectory.u(1.0) - kSigma) <= e + 1e-15);
    errs.push_back(e);
  }
  MESSAGE("errors " << errs[0] << " " << errs[1] << " " << errs[2]);
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
  CHECK(errs[2] < 0.05);
}

TEST_CASE("J2 / eps approaches its limit") {
  // Limit: eps^-1 J2 -> -2 cot(2 T0) int_{-inf}^0 Z0'^2 ds, and the integral
  // equals sqrt(3) pi / 8 for Z0 = sigma sech(2s)^(1/2).
  const double t0 = 1.0;
  const double limit = -friction(t0) * std::sqrt(3.0) * kPi / 8.0;
  std::vector<double> q;
  for (double eps : {0.2, 0.1, 0.05}) {
    const ShootProfile s = spike_at(eps, t0);
    const EnergySplit e = energy_split(s, t0);
    CHECK(e.j2 > 0.0);
    CHECK(std::fabs(e.residual()) < 1e-8);
    q.push_back(e.j2 / eps);
  }
  MESSAGE("J2/eps " << q[0] << " " << q[1] << " " << q[2] << " limit " << limit);
  for (double x : q) CHECK(x > 0.0);
  CHECK(std::fabs(limit - q[1]) < std::fabs(limit - q[0]));
  CHECK(std::fabs(limit - q[2]) < std::fabs(limit - q[1]));
  CHECK(std::fabs(q[2] - q[1]) < std::fabs(q[1] - q[0]));
}

TEST_CASE("critical placement") {
  const double a = alpha_for_critical(0.2, 1, 1.0);
  const ShootProfile p = shoot(Params::from_epsilon(a, 0.2));
  CHECK(p.criticals[0].tau == doctest::Approx(1.0).epsilon(1e-9));
  // tau_3 at eps = 0.2 never comes down to 1.0.
  CHECK_THROWS_AS(alpha_for_critical(0.2, 3, 1.0), Error);
}

TEST_CASE("barrier closed form and decay") {
  const double v = barrier_value({0.0, 1.0, 1.0, 0.1});
  CHECK(v == doctest::Approx(1.0 / (2.0 * std::cosh(10.0))).epsilon(1e-12));
  CHECK(v == doctest::Approx(4.54e-5).epsilon(1e-3));
  CHECK(barrier_value({0.0, 0.5, 1.0, 1e4}) == doctest::Approx(0.5).epsilon(1e-6));
  // K != 0 against the direct basis solve.
  const double K = 0.7, kappa = 0.4, delta = 0.6, eps = 0.15;
  const double r = std::sqrt(K * K + kappa / (eps * eps));
  const double c1 = K + r, c2 = K - r;
  // A e^{c1 x} + B e^{c2 x} = 1/2 at x = +-delta.
  const double det = std::exp(c1 * delta) * std::exp(-c2 * delta) - std::exp(-c1 * delta) * std::exp(c2 * delta);
  const double A = 0.5 * (std::exp(-c2 * delta) - std::exp(c2 * delta)) / det;
  const double B = 0.5 * (std::exp(c1 * delta) - std::exp(-c1 * delta)) / det;
  CHECK(barrier_value({K, kappa, delta, eps}) == doctest::Approx(A + B).epsilon(1e-10));

  std::vector<double> x, y;
  double prev = 1.0;
  for (double e : {0.2, 0.1, 0.05, 0.025}) {
    const double b = barrier_value({0.0, 0.5, 1.0, e});
    CHECK(b < prev);
    prev = b;
    x.push_back(1.0 / e);
    y.push_back(std::log(b));
  }
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope < 0.0);
  CHECK(f.r2 > 0.999);
  CHECK(f.slope == doctest::Approx(-std::sqrt(0.5)).epsilon(1e-2));
  CHECK_THROWS_AS(barrier_value({0.0, 0.0, 1.0, 0.1}), Error);
}

TEST_CASE("linear fit") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const LinearFit f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
  CHECK(f.r2 == doctest::Approx(1.0));
  const std::vector<double> one{1};
  CHECK_THROWS_AS(linear_fit(one, one), Error);
}

TEST_CASE("profile kind names") {
  CHECK(std::string(to_string(ProfileKind::Homoclinic)) == "Homoclinic");
  CHECK(std::string(to_string(ProfileKind::VanishesLeft)) == "VanishesLeft");
}
