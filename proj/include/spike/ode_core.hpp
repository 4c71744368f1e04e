#pragma once

// The reduced T^2-invariant equation on (0, pi/2):
//
//   u'' + 2 cot(2 theta) u' = lambda (u^5 - u),   u(0) = alpha, u'(0) = 0,
//
// with lambda = -1 / epsilon^2 < 0.

#include "spike/constants.hpp"
#include "spike/integrator.hpp"
#include "spike/trajectory.hpp"

namespace spike {

struct Tolerances {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  /// Root tolerance (radians) for zero and critical-point refinement.
  double event_tol = 1e-12;
  /// Radius at which the even Taylor series hands over to the integrator.
  double theta0 = 1e-3;
  /// Integration stops at pi/2 - end_guard.
  double end_guard = 1e-9 * kPi;

  void validate() const;
  Tolerances tightened(double factor) const;
};

class Params {
 public:
  static Params from_lambda(double alpha, double lambda);
  static Params from_epsilon(double alpha, double epsilon);

  double alpha() const { return alpha_; }
  double epsilon() const { return epsilon_; }
  double lambda() const { return lambda_; }
  double theta_end() const { return theta_end_; }

  Params with_alpha(double alpha) const;
  /// Caps integration at theta_end (clamped to pi/2 - end_guard when run).
  Params with_theta_end(double theta_end) const;

 private:
  Params(double alpha, double epsilon, double lambda);

  double alpha_ = 1.0;
  double epsilon_ = 1.0;
  double lambda_ = -1.0;
  double theta_end_ = kHalfPi;
};

/// F(u) = u^6/6 - u^2/2.
constexpr double potential_F(double u) {
  const double u2 = u * u;
  return u2 * u2 * u2 / 6.0 - u2 / 2.0;
}

/// E = (u')^2 / 2 - lambda F(u).
constexpr double energy(const State& s, double lambda) {
  return s.du * s.du / 2.0 - lambda * potential_F(s.u);
}

/// 2 cos(2 theta) / sin(2 theta).
double friction(double theta);

/// u'' from the equation; throws Error{Domain} outside (0, pi/2).
double rhs(double theta, double u, double du, double lambda);

/// Even series of the solution at the origin for a nonlinearity g(u) with
/// g(alpha) and g'(alpha) given: c2 = g/4, c4 = c2 (g' + 8/3) / 16.
EvenSeries even_series(double alpha, double g, double dg);

EvenSeries start_series(const Params& params);

/// Series state at theta0 > 0; throws Error{Domain} for theta0 <= 0.
State taylor_start(const Params& params, double theta0);

/// Integration task for one shot (series start, scaled absolute tolerance,
/// cap at min(theta_end, pi/2 - end_guard)).
IntegrationTask ivp_task(const Params& params, const Tolerances& tol, bool stop_on_zero);

/// Adaptive Dormand-Prince 5(4) integration from the series start to
/// min(theta_end, pi/2 - end_guard). With stop_on_zero the run ends at the
/// first zero of u, refined to event_tol.
Trajectory integrate_ivp(const Params& params, const Tolerances& tol = {},
                         bool stop_on_zero = false);

}  // namespace spike
