#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "spike/error.hpp"
#include "spike/ode_core.hpp"

using namespace spike;

TEST_CASE("potential F values and sign") {
  CHECK(potential_F(0.0) == 0.0);
  CHECK(potential_F(1.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-15));
  CHECK(std::fabs(potential_F(kSigma)) < 1e-15);
  CHECK(kSigma == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-15));
  for (double u = 0.01; u < kSigma - 0.01; u += 0.01) CHECK(potential_F(u) < 0.0);
  for (double u = 1.0; u < 3.0; u += 0.05) CHECK(potential_F(u + 0.01) > potential_F(u));
}

TEST_CASE("energy at rest states") {
  const double f03 = std::pow(0.3, 6) / 6.0 - 0.09 / 2.0;
  CHECK(energy({0.0, 0.3, 0.0}, -25.0) == doctest::Approx(25.0 * f03).epsilon(1e-15));
  CHECK(energy({0.0, 0.3, 0.0}, -25.0) == doctest::Approx(-1.1219625).epsilon(1e-12));
  CHECK(energy({0.7, 1.0, 0.0}, -25.0) == doctest::Approx(-25.0 / 3.0).epsilon(1e-15));
  CHECK(energy({0.7, 0.0, 0.0}, -3.0) == 0.0);
}

TEST_CASE("rhs examples and domain") {
  CHECK(std::fabs(rhs(kQuarterPi, 1.0, 0.0, -25.0)) < 1e-14);
  CHECK(rhs(kQuarterPi, 0.3, 0.0, -25.0) == doctest::Approx(-25.0 * (std::pow(0.3, 5) - 0.3)).epsilon(1e-14));
  CHECK(rhs(kQuarterPi, 0.3, 0.0, -25.0) == doctest::Approx(7.43925).epsilon(1e-12));
  const double u = 0.77;
  CHECK(rhs(kPi / 8.0, u, 0.0, -9.0) == -9.0 * (std::pow(u, 5) - u));
  CHECK_THROWS_AS(rhs(0.0, 0.5, 0.0, -1.0), Error);
  CHECK_THROWS_AS(rhs(kHalfPi, 0.5, 0.0, -1.0), Error);
  CHECK_THROWS_AS(rhs(-0.1, 0.5, 0.0, -1.0), Error);
}

TEST_CASE("friction keeps precision next to pi/2") {
  // 2 cot(2 theta) = -1 / gap to leading order, gap = pi/2 - theta.
  for (double gap : {1e-3, 1e-6, 1e-8}) {
    const double th = kHalfPi - gap;
    const double exact_gap = (kHalfPi - th) + 6.123233995736766e-17;
    const double expected = -2.0 / std::tan(2.0 * exact_gap);
    CHECK(friction(th) == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(friction(kPi / 6.0) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("params derive lambda from epsilon and validate alpha") {
  const Params p = Params::from_epsilon(0.3, 0.2);
  CHECK(p.lambda() * p.epsilon() * p.epsilon() == doctest::Approx(-1.0).epsilon(1e-15));
  const Params q = Params::from_lambda(0.3, -100.0);
  CHECK(q.epsilon() == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_NOTHROW(Params::from_lambda(1.0, -25.0));
  CHECK_THROWS_AS(Params::from_lambda(0.0, -25.0), Error);
  CHECK_THROWS_AS(Params::from_lambda(1.5, -25.0), Error);
  CHECK_THROWS_AS(Params::from_lambda(0.5, 1.0), Error);
  CHECK_THROWS_AS(Params::from_epsilon(0.5, 0.0), Error);
}

TEST_CASE("tolerance invariants") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  CHECK(t.end_guard == doctest::Approx(1e-9 * kPi));
  Tolerances bad = t;
  bad.theta0 = 2e-2;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = t;
  bad.end_guard = 1e-5;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = t;
  bad.rel_tol = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  const Tolerances tt = t.tightened(1e-2);
  CHECK(tt.rel_tol == doctest::Approx(1e-12));
  CHECK(tt.abs_tol == doctest::Approx(1e-12));
}

TEST_CASE("taylor start") {
  const Params eq = Params::from_lambda(1.0, -25.0);
  const State s1 = taylor_start(eq, 1e-3);
  CHECK(s1.u == 1.0);
  CHECK(s1.du == 0.0);

  const Params p = Params::from_lambda(0.3, -25.0);
  const State s = taylor_start(p, 1e-3);
  const double c2 = -25.0 * (std::pow(0.3, 5) - 0.3) / 4.0;
  CHECK(s.u - 0.3 == doctest::Approx(c2 * 1e-6).epsilon(1e-5));
  CHECK(s.u - 0.3 == doctest::Approx(1.8598e-6).epsilon(1e-4));
  CHECK_THROWS_AS(taylor_start(p, 0.0), Error);

  // Against integration from 1e-6 at 1e-12.
  IntegrationTask task = ivp_task(p, Tolerances{}.tightened(1e-2), false);
  task.start = taylor_start(p, 1e-6);
  task.control.t_end = 1e-3;
  task.control.h_init = 1e-7;
  const Trajectory ref = integrate(task);
  CHECK(std::fabs(ref.nodes().back().u - s.u) < 1e-12);
  CHECK(std::fabs(ref.nodes().back().du - s.du) < 1e-10);
}

TEST_CASE("series truncation error shrinks by at least 2^4 when theta0 halves") {
  const Params p = Params::from_lambda(0.3, -25.0);
  auto reference = [&](double th) {
    IntegrationTask task = ivp_task(p, Tolerances{}.tightened(1e-3), false);
    task.start = taylor_start(p, 1e-4);
    task.control.t_end = th;
    task.control.h_init = 1e-5;
    return integrate(task).nodes().back();
  };
  const double big = 0.08, small = 0.04;
  const double e_big = std::fabs(taylor_start(p, big).u - reference(big).u);
  const double e_small = std::fabs(taylor_start(p, small).u - reference(small).u);
  MESSAGE("series error at 0.08: " << e_big << ", at 0.04: " << e_small);
  CHECK(e_big > 1e-10);
  CHECK(e_big / e_small >= 16.0);
}

TEST_CASE("equilibrium is preserved for every lambda") {
  const Tolerances tol;
  for (double lam : {-1.0, -6.0, -25.0, -100.0, -400.0}) {
    const Trajectory t = integrate_ivp(Params::from_lambda(1.0, lam), tol, true);
    CHECK(t.terminal_reason() == Terminal::ReachedEnd);
    double dev = 0.0;
    for (const State& s : t.nodes()) dev = std::max({dev, std::fabs(s.u - 1.0), std::fabs(s.du)});
    CHECK(dev < 10.0 * tol.abs_tol);
    CHECK(t.theta_end() == doctest::Approx(kHalfPi - tol.end_guard).epsilon(1e-15));
  }
}

TEST_CASE("two-spike shot vanishes inside (pi/4, pi/2)") {
  const Params p = Params::from_lambda(0.3, -25.0);
  const Trajectory t = integrate_ivp(p, {}, true);
  REQUIRE(t.terminal_reason() == Terminal::HitZero);
  const double z = t.theta_end();
  CHECK(z > kQuarterPi);
  CHECK(z < kHalfPi);
  const Trajectory ref = integrate_ivp(p, Tolerances{}.tightened(1e-2), true);
  CHECK(std::fabs(ref.theta_end() - z) < 1e-8);
  CHECK(std::fabs(t.nodes().back().u) < 1e-10);
}

TEST_CASE("small alpha below pi/4 is monotone") {
  const Params p = Params::from_lambda(0.05, -6.0).with_theta_end(kQuarterPi);
  const Trajectory t = integrate_ivp(p, {}, false);
  CHECK(t.theta_end() == doctest::Approx(kQuarterPi).epsilon(1e-15));
  for (std::size_t i = 1; i < t.nodes().size(); ++i) {
    CHECK(t.nodes()[i].u > t.nodes()[i - 1].u);
    CHECK(t.nodes()[i].du > 0.0);
  }
}

TEST_CASE("blowup guard") {
  // Far beyond the validated regime the solution leaves |u| <= 50.
  IntegrationTask task;
  task.eq = Equation::profile();
  task.eq.c5 = 1.0;
  task.start = {0.0, 2.0, 0.0};
  task.control.t_end = 10.0;
  const Trajectory t = integrate(task);
  CHECK(t.terminal_reason() == Terminal::Blowup);
  CHECK(std::fabs(t.nodes().back().u) > 50.0);
}

namespace {

double fd_energy_slope(const Trajectory& t, double th, double lam) {
  const double h = 1e-5;
  return (energy(t.eval(th + h), lam) - energy(t.eval(th - h), lam)) / (2.0 * h);
}

}  // namespace

TEST_CASE("energy derivative identity, monotonicity and boundary value") {
  for (double alpha : {0.3, 0.6, 0.9}) {
    for (double lam : {-10.0, -25.0}) {
      const Params p = Params::from_lambda(alpha, lam);
      const Trajectory t = integrate_ivp(p, {}, true);
      const double e0 = -lam * potential_F(alpha);
      // E(theta) - E(0) = O(theta^2) near the origin.
      double last = 1.0;
      for (double th : {1e-3, 1e-4, 1e-5, 1e-6}) {
        const double d = std::fabs(energy(t.eval(th), lam) - e0);
        CHECK(d < last);
        last = d;
      }
      CHECK(last < 1e-9 * std::max(1.0, std::fabs(e0)));
      CHECK(energy(t.eval(0.0), lam) == doctest::Approx(e0).epsilon(1e-12));

      const double end = t.theta_end() - 1e-3;
      for (int i = 1; i < 60; ++i) {
        const double th = 0.01 + (end - 0.01) * i / 60.0;
        const State s = t.eval(th);
        const double expected = -friction(th) * s.du * s.du;
        const double scale = 1.0 + std::fabs(expected) + std::fabs(lam * s.u * s.du);
        CHECK(std::fabs(fd_energy_slope(t, th, lam) - expected) < 1e-6 * scale);
      }

      double prev = energy(t.nodes().front(), lam);
      for (const State& s : t.nodes()) {
        const double e = energy(s, lam);
        const double slack = 1e-9 * std::max(1.0, std::fabs(e));
        if (s.theta <= kQuarterPi) CHECK(e <= prev + slack);
        prev = e;
      }
      prev = energy(t.eval(kQuarterPi), lam);
      for (const State& s : t.nodes()) {
        if (s.theta < kQuarterPi) continue;
        const double e = energy(s, lam);
        CHECK(e >= prev - 1e-9 * std::max(1.0, std::fabs(e)));
        prev = e;
      }
    }
  }
}

TEST_CASE("tightening tolerances converges at pi/4") {
  const Params p = Params::from_lambda(0.3, -25.0).with_theta_end(kQuarterPi);
  const Tolerances coarse = Tolerances{}.tightened(100.0);
  const Tolerances fine = coarse.tightened(0.5);
  const Tolerances ref = coarse.tightened(1e-4);
  const double uc = integrate_ivp(p, coarse).nodes().back().u;
  const double uf = integrate_ivp(p, fine).nodes().back().u;
  const double ur = integrate_ivp(p, ref).nodes().back().u;
  const double coarse_error = std::fabs(uc - ur);
  MESSAGE("coarse error " << coarse_error << ", coarse/fine change " << std::fabs(uc - uf));
  CHECK(std::fabs(uc - uf) < coarse_error);
  CHECK(std::fabs(uf - ur) < coarse_error);
}
