#pragma once

// Linearization at u = 1 in the invariant sector:
//
//   w'' + 2 cot(2 theta) w' = 4 lambda w,   w(0) = 1, w'(0) = 0.
//
// At lambda_n = -n(n+1) the solution is a polynomial in t = cos(2 theta).

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spike/ode_core.hpp"

namespace spike {

using Rational = boost::multiprecision::cpp_rational;

constexpr double lambda_n(int n) { return -static_cast<double>(n) * (n + 1); }

struct SpectralIndex {
  int n = 0;
  double lambda_n = 0.0;

  static SpectralIndex of(int n) { return {n, spike::lambda_n(n)}; }
};

/// sum_j coeffs[j] cos^(n - 2j)(2 theta), j = 0..floor(n/2).
struct CosPoly {
  int n = 0;
  std::vector<double> coeffs;
};

struct ExactCosPoly {
  int n = 0;
  std::vector<Rational> coeffs;

  CosPoly to_double() const;
};

/// Normalized (sum = 1) eigen-polynomial from the downward recursion, in
/// exact rational arithmetic. n >= 0 else Error{Domain}.
ExactCosPoly eigen_poly_exact(int n);
CosPoly eigen_poly(int n);

/// Value at t = cos(2 theta) in exact arithmetic.
Rational eval_exact(const ExactCosPoly& p, const Rational& t);

/// Coefficients of F_c(p) = p'' + 2 cot(2 theta) p' - c p on the monomials
/// t^n, t^(n-2), ..., using F_c(t^k) = (4 lambda_k - c) t^k + 4k(k-1) t^(k-2).
std::vector<Rational> apply_operator_exact(const ExactCosPoly& p, const Rational& c);
std::vector<double> apply_operator(const CosPoly& p, double c);

double eval_cospoly(const CosPoly& p, double theta);
/// d/dtheta of eval_cospoly.
double eval_cospoly_derivative(const CosPoly& p, double theta);
/// Batched evaluation through the dispatched Horner kernel.
void eval_cospoly_grid(const CosPoly& p, std::span<const double> thetas, std::span<double> out);

/// Numeric solution on (0, pi/2 - end_guard]; lambda < 0 else Error{Domain}.
Trajectory solve_linearized(double lambda, const Tolerances& tol = {});

struct StructureCounts {
  int zeros = 0;
  int criticals = 0;
  int criticals_before_quarter = 0;
};

/// Critical points closer than this to pi/2 are ignored: the guarded end
/// carries the logarithmic second solution and yields spurious extrema.
inline constexpr double kEndCriticalMargin = 1e-4;
/// Zeros closer together than this are counted once.
inline constexpr double kZeroSeparation = 1e-6;

StructureCounts count_structure(double lambda, const Tolerances& tol = {});
StructureCounts count_structure(const Trajectory& w, double event_tol = 1e-12);

}  // namespace spike
