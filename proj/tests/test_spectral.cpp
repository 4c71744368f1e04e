#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/roots.hpp>

#include "doctest.h"
#include "spike/error.hpp"
#include "spike/spectral.hpp"

using namespace spike;

namespace {

// Solution of the linearized problem for general lambda < 0: with
// t = cos 2theta it solves Legendre's equation of degree nu,
// nu (nu + 1) = -lambda, so w = 2F1(-nu, nu + 1; 1; (1 - t) / 2).
double legendre_function(double lambda, double theta) {
  const double nu = (-1.0 + std::sqrt(1.0 - 4.0 * lambda)) / 2.0;
  const double x = (1.0 - std::cos(2.0 * theta)) / 2.0;
  return boost::math::hypergeometric_pFq({-nu, nu + 1.0}, {1.0}, x);
}

}  // namespace

TEST_CASE("spectral index") {
  CHECK(lambda_n(0) == 0.0);
  CHECK(lambda_n(3) == -12.0);
  const SpectralIndex s = SpectralIndex::of(5);
  CHECK(s.n == 5);
  CHECK(s.lambda_n == -30.0);
}

TEST_CASE("low-order eigen-polynomials") {
  const CosPoly p0 = eigen_poly(0);
  REQUIRE(p0.coeffs.size() == 1);
  CHECK(p0.coeffs[0] == 1.0);
  const CosPoly p1 = eigen_poly(1);
  REQUIRE(p1.coeffs.size() == 1);
  CHECK(p1.coeffs[0] == 1.0);
  CHECK(eval_cospoly(p1, kHalfPi) == -1.0);
  const ExactCosPoly e2 = eigen_poly_exact(2);
  REQUIRE(e2.coeffs.size() == 2);
  CHECK(e2.coeffs[0] == Rational(3, 2));
  CHECK(e2.coeffs[1] == Rational(-1, 2));
  CHECK(eval_exact(e2, Rational(-1)) == 1);
  CHECK_THROWS_AS(eigen_poly_exact(-1), Error);
}

TEST_CASE("evaluation at pi/4 and at the origin") {
  CHECK(std::fabs(eval_cospoly(eigen_poly(1), kQuarterPi)) < 1e-16);
  CHECK(eval_cospoly(eigen_poly(2), kQuarterPi) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(std::fabs(eval_cospoly_derivative(eigen_poly(2), kQuarterPi)) < 1e-15);
  for (int n = 0; n <= 12; ++n) CHECK(eval_cospoly(eigen_poly(n), 0.0) == doctest::Approx(1.0).epsilon(1e-13));
  // Odd degrees vanish at pi/4, even degrees are critical there.
  for (int n = 1; n <= 11; n += 2) CHECK(std::fabs(eval_cospoly(eigen_poly(n), kQuarterPi)) < 1e-14);
  for (int n = 2; n <= 12; n += 2) CHECK(std::fabs(eval_cospoly_derivative(eigen_poly(n), kQuarterPi)) < 1e-12);
}

TEST_CASE("eigen-polynomials are Legendre polynomials of cos 2theta") {
  for (int n = 0; n <= 12; ++n) {
    const CosPoly p = eigen_poly(n);
    for (int i = 0; i <= 40; ++i) {
      const double th = kHalfPi * i / 40.0;
      CHECK(eval_cospoly(p, th) ==
            doctest::Approx(boost::math::legendre_p(n, std::cos(2.0 * th))).epsilon(1e-12));
    }
  }
}

TEST_CASE("operator residual: exact zero and floating point below 1e-12") {
  for (int n = 0; n <= 12; ++n) {
    const ExactCosPoly e = eigen_poly_exact(n);
    Rational sum = 0;
    for (const Rational& r : e.coeffs) sum += r;
    CHECK(sum == 1);
    for (const Rational& r : apply_operator_exact(e, Rational(4 * static_cast<long long>(lambda_n(n))))) CHECK(r == 0);
    double worst = 0.0;
    for (double r : apply_operator(eigen_poly(n), 4.0 * lambda_n(n))) worst = std::max(worst, std::fabs(r));
    CHECK(worst < 1e-12);
    CHECK(eval_exact(e, Rational(-1)) == Rational(n % 2 ? -1 : 1));
    CHECK(eval_cospoly(eigen_poly(n), kHalfPi) == doctest::Approx(n % 2 ? -1.0 : 1.0).epsilon(1e-13));
  }
  // A wrong eigenvalue leaves a non-zero remainder.
  bool nonzero = false;
  for (const Rational& r : apply_operator_exact(eigen_poly_exact(3), Rational(-40))) nonzero = nonzero || r != 0;
  CHECK(nonzero);
}

TEST_CASE("batched evaluation matches pointwise evaluation") {
  const CosPoly p = eigen_poly(7);
  std::vector<double> th(101), out(101);
  for (std::size_t i = 0; i < th.size(); ++i) th[i] = kHalfPi * i / 100.0;
  eval_cospoly_grid(p, th, out);
  for (std::size_t i = 0; i < th.size(); ++i) CHECK(out[i] == doctest::Approx(eval_cospoly(p, th[i])).epsilon(1e-13));
  std::vector<double> short_out(3);
  CHECK_THROWS_AS(eval_cospoly_grid(p, th, short_out), Error);
}

TEST_CASE("numeric linearized solution against the polynomials") {
  for (int n = 1; n <= 8; ++n) {
    const Trajectory w = solve_linearized(lambda_n(n));
    const CosPoly p = eigen_poly(n);
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double th = (kHalfPi - 1e-6) * i / 2000.0;
      sup = std::max(sup, std::fabs(w.u(th) - eval_cospoly(p, th)));
    }
    if (n <= 2) CHECK(sup < 1e-9);
    CHECK(sup < 1e-8);
  }
  CHECK_THROWS_AS(solve_linearized(0.0), Error);
  CHECK_THROWS_AS(solve_linearized(2.0), Error);
}

TEST_CASE("zero and critical counts") {
  struct Case {
    double lambda;
    int zeros, criticals;
  };
  // At the eigenvalues: n zeros, n - 1 critical points.
  for (Case c : {Case{-2, 1, 0}, Case{-6, 2, 1}, Case{-12, 3, 2}, Case{-20, 4, 3}, Case{-42, 6, 5}}) {
    const StructureCounts s = count_structure(c.lambda);
    CHECK(s.zeros == c.zeros);
    CHECK(s.criticals == c.criticals);
  }
  // Critical points before pi/4 strictly inside the windows.
  struct Quarter {
    double lambda;
    int before;
  };
  for (Quarter q : {Quarter{-2, 0}, Quarter{-12, 1}, Quarter{-15, 1}, Quarter{-25, 2}, Quarter{-45, 3}, Quarter{-100, 4}}) {
    CHECK(count_structure(q.lambda).criticals_before_quarter == q.before);
  }
}

TEST_CASE("lambda = -1 against the hypergeometric oracle") {
  const double lam = -1.0;
  const Trajectory w = solve_linearized(lam);
  for (double th : {0.2, 0.6, 1.0, 1.3}) {
    CHECK(w.u(th) == doctest::Approx(legendre_function(lam, th)).epsilon(1e-8));
  }
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve([&](double t) { return legendre_function(lam, t); }, 0.8, 1.3,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  const double oracle_zero = 0.5 * (r.first + r.second);
  CHECK(oracle_zero == doctest::Approx(1.03323063).epsilon(1e-8));
  const StructureCounts s = count_structure(lam);
  CHECK(s.zeros == 1);
  CHECK(s.criticals == 0);
  const auto cross = std::find_if(w.nodes().begin(), w.nodes().end(), [](const State& x) { return x.u <= 0.0; });
  REQUIRE(cross != w.nodes().end());
  CHECK(std::fabs(w.u(oracle_zero)) < 1e-8);
}

TEST_CASE("Sturm count is non-decreasing as lambda decreases") {
  int prev = 0;
  for (double lam = -0.5; lam >= -60.0; lam -= 1.75) {
    const int z = count_structure(lam).zeros;
    CHECK(z >= prev);
    prev = z;
  }
  CHECK(prev >= 7);
}
