#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "spike/error.hpp"
#include "spike/kernels/dispatch.hpp"
#include "spike/ode_core.hpp"
#include "spike/shooting.hpp"

using namespace spike;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

Trajectory cosine_trajectory(double end, std::size_t n) {
  std::vector<double> th(n);
  for (std::size_t i = 0; i < n; ++i) th[i] = end * static_cast<double>(i) / (n - 1);
  return Trajectory::from_function(th, [](double t) {
    return Trajectory::Derivatives{std::cos(t), -std::sin(t), -std::cos(t)};
  });
}

bool same_trajectory(const Trajectory& a, const Trajectory& b) {
  if (a.nodes().size() != b.nodes().size() || a.segments().size() != b.segments().size()) return false;
  if (a.terminal_reason() != b.terminal_reason()) return false;
  for (std::size_t i = 0; i < a.nodes().size(); ++i) {
    const State& x = a.nodes()[i];
    const State& y = b.nodes()[i];
    if (!same_bits(x.theta, y.theta) || !same_bits(x.u, y.u) || !same_bits(x.du, y.du)) return false;
  }
  for (std::size_t i = 0; i < a.segments().size(); ++i) {
    const Segment& x = a.segments()[i];
    const Segment& y = b.segments()[i];
    for (int j = 0; j < 5; ++j) {
      if (!same_bits(x.u[j], y.u[j]) || !same_bits(x.du[j], y.du[j])) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("synthetic cosine: zero at pi/2 through the interpolant") {
  const Trajectory t = cosine_trajectory(1.6, 1601);
  const auto z = first_zero(t, 1e-14);
  REQUIRE(z.has_value());
  CHECK(std::fabs(*z - kHalfPi) < 1e-12);
  for (double th : {0.1, 0.7, 1.3}) {
    CHECK(t.u(th) == doctest::Approx(std::cos(th)).epsilon(1e-12));
    CHECK(t.du(th) == doctest::Approx(-std::sin(th)).epsilon(1e-10));
  }
  const auto cps = critical_points(t);
  CHECK(cps.empty());
}

TEST_CASE("trajectory span and lookups") {
  const Trajectory t = cosine_trajectory(1.0, 11);
  CHECK(t.theta_begin() == 0.0);
  CHECK(t.theta_end() == 1.0);
  CHECK(t.covers(0.5));
  CHECK_FALSE(t.covers(1.0 + 1e-12));
  CHECK_THROWS_AS(t.eval(1.5), Error);
  CHECK(t.segment_index(0.0) == 0);
  CHECK(t.segment_index(0.95) == 9);
  CHECK(t.u(0.3) == t.segments()[3].u_at(0.3));
  std::vector<State> bad{{0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}};
  CHECK_THROWS_AS(Trajectory(bad, {}, Terminal::ReachedEnd), Error);
}

TEST_CASE("mirror and concatenation") {
  const Trajectory t = integrate_ivp(Params::from_lambda(0.5, -15.0).with_theta_end(kQuarterPi));
  const Trajectory m = t.mirrored();
  CHECK(m.theta_begin() == doctest::Approx(kQuarterPi).epsilon(1e-15));
  for (double th : {0.3, 0.5, 0.7}) {
    CHECK(m.u(kHalfPi - th) == doctest::Approx(t.u(th)).epsilon(1e-12));
    CHECK(m.du(kHalfPi - th) == doctest::Approx(-t.du(th)).epsilon(1e-10));
  }
  const Trajectory c = concatenate(t, m);
  CHECK(c.theta_end() == m.theta_end());
  CHECK(c.u(1.2) == m.u(1.2));
  CHECK_THROWS_AS(concatenate(m, t), Error);
}

TEST_CASE("shifted clock past pi/4") {
  const Trajectory t = integrate_ivp(Params::from_lambda(0.3, -25.0));
  bool shifted = false;
  for (const Segment& s : t.segments()) {
    if (s.shift != 0.0) {
      shifted = true;
      CHECK(s.t0 >= kQuarterPi);
      CHECK(s.tau0 + s.shift == doctest::Approx(s.t0).epsilon(1e-15));
      CHECK(s.tau0 < 0.0);
    } else {
      CHECK(s.tau0 == s.t0);
    }
  }
  CHECK(shifted);
  // Segment ends agree in both clocks.
  for (std::size_t i = 1; i < t.segments().size(); ++i) {
    CHECK(t.segments()[i].t0 == t.segments()[i - 1].t1);
  }
}

TEST_CASE("dopri step kernels agree bitwise") {
  if (kernels::detected_isa() != kernels::Isa::Avx2) {
    MESSAGE("AVX2 not available; scalar path only");
    return;
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 500; ++rep) {
    kernels::DopriBatch a;
    for (std::size_t l = 0; l < kernels::kLanes; ++l) {
      a.t[l] = 0.05 + 1.5 * (0.5 + 0.5 * U(rng));
      a.h[l] = 1e-3 * (1.0 + U(rng));
      a.u[l] = 1.5 * U(rng);
      a.du[l] = 10.0 * U(rng);
      a.c5[l] = -100.0 * (0.5 + 0.5 * U(rng));
      a.c1[l] = -a.c5[l];
      a.fric[l] = rep % 3 == 0 ? 0.0 : 1.0;
      a.rtol[l] = 1e-10;
      a.atol[l] = 1e-10;
      a.ku[0][l] = a.du[l];
      a.kdu[0][l] = kernels::lane_accel(a.t[l], a.u[l], a.du[l], a.c5[l], a.c1[l], a.fric[l]);
    }
    if (rep % 7 == 0) a.idle(rep % kernels::kLanes);
    kernels::DopriBatch b = a;
    kernels::dopri_step_scalar(a);
    kernels::dopri_step_avx2(b);
    for (std::size_t l = 0; l < kernels::kLanes; ++l) {
      CHECK(same_bits(a.u5[l], b.u5[l]));
      CHECK(same_bits(a.du5[l], b.du5[l]));
      CHECK(same_bits(a.err[l], b.err[l]));
      for (int k = 1; k < 7; ++k) {
        CHECK(same_bits(a.ku[k][l], b.ku[k][l]));
        CHECK(same_bits(a.kdu[k][l], b.kdu[k][l]));
      }
    }
  }
}

TEST_CASE("horner kernels agree bitwise") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t m : {1u, 2u, 5u, 9u}) {
    std::vector<double> c(m);
    for (double& x : c) x = U(rng);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 33u}) {
      std::vector<double> t(n), a(n), b(n);
      for (double& x : t) x = U(rng);
      for (int parity : {0, 1}) {
        kernels::horner_parity_scalar(c, parity, t, a);
        if (kernels::detected_isa() == kernels::Isa::Avx2) {
          kernels::horner_parity_avx2(c, parity, t, b);
          for (std::size_t i = 0; i < n; ++i) CHECK(same_bits(a[i], b[i]));
        }
        for (std::size_t i = 0; i < n; ++i) {
          double ref = 0.0;
          for (std::size_t j = 0; j < m; ++j) ref += c[j] * std::pow(t[i], 2.0 * (m - 1 - j) + parity);
          CHECK(a[i] == doctest::Approx(ref).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("batched integration reproduces the scalar engine exactly") {
  std::vector<IntegrationTask> tasks;
  for (double a : {0.05, 0.2, 0.3, 0.45, 0.61, 0.8, 0.95}) {
    tasks.push_back(ivp_task(Params::from_lambda(a, -25.0), {}, true));
  }
  tasks.push_back(ivp_task(Params::from_lambda(1.0, -25.0), {}, true));
  for (kernels::Isa isa : {kernels::Isa::Scalar, kernels::Isa::Avx2}) {
    if (isa == kernels::Isa::Avx2 && kernels::detected_isa() != kernels::Isa::Avx2) continue;
    kernels::force_isa(isa);
    const auto batch = integrate_batch(tasks);
    REQUIRE(batch.size() == tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      REQUIRE_FALSE(batch[i].error.has_value());
      CHECK(same_trajectory(batch[i].trajectory, integrate(tasks[i])));
    }
  }
  kernels::reset_isa();
  CHECK(integrate_batch({}).empty());
}

TEST_CASE("isa names") {
  CHECK(std::string(kernels::to_string(kernels::Isa::Scalar)) == "scalar");
  CHECK(std::string(kernels::to_string(kernels::Isa::Avx2)) == "avx2");
}
