#pragma once

// Positive solutions on all of (0, pi/2), symmetric about pi/4, obtained by
// shooting for tau_k(alpha) = pi/4.

#include <utility>
#include <vector>

#include "spike/shooting.hpp"

namespace spike {

/// n >= 1 with lambda in [-(2n+2)(2n+3), -2n(2n+1)); Error{WindowViolation}
/// when lambda >= -6.
int window_order(double lambda);

struct GroundState {
  int n = 0;
  int k = 0;
  double alpha0 = 0.0;
  double lambda = 0.0;
  /// Shot restricted to (0, pi/4].
  Trajectory half;
  /// Same shot continued to pi/2 - end_guard.
  Trajectory full;
  /// Maxima of the continued solution on (0, pi/2).
  int maxima = 0;
  double du_quarter = 0.0;
  double symmetry_residual = 0.0;
  /// Extra sign changes of tau_k - pi/4 seen while bracketing (no uniqueness
  /// is assumed; the first root from alpha = 1 is returned).
  std::vector<double> other_roots;
};

/// Error{WindowViolation} outside every window or for k > n; Error{NoSignChange}
/// when tau_k - pi/4 cannot be bracketed.
GroundState find_ground_state(double lambda, int k, const Tolerances& tol = {});

/// max over a uniform grid of theta in [pi/4, pi/2 - end_guard] of
/// |u(pi/2 - theta) - u(theta)| on the continued solution.
double symmetry_residual(const GroundState& gs, std::size_t grid_size = 1024);
double symmetry_residual(const Trajectory& full, std::size_t grid_size = 1024);

struct AlphaStar {
  int k = 0;
  double lambda = 0.0;
  double value = 0.0;
  std::pair<double, double> bracket;
};

/// Number of critical points of the shot at alpha before its first zero or
/// the cap (ignoring the last 1e-4 before pi/2).
int critical_count(double lambda, double alpha, const Tolerances& tol = {});

/// Infimum of the top interval of alpha on which the shot has >= k critical
/// points; bracket width <= 1e-4.
AlphaStar alpha_star(double lambda, int k, const Tolerances& tol = {});

}  // namespace spike
