#pragma once

#include <optional>
#include <vector>

#include "spike/ode_core.hpp"

namespace spike {

enum class CriticalKind { Max, Min };

const char* to_string(CriticalKind kind);

struct CriticalPoint {
  double tau = 0.0;
  double value = 0.0;
  CriticalKind kind = CriticalKind::Max;
  int index = 0;  // 1-based
};

struct ShootProfile {
  Params params = Params::from_lambda(0.5, -1.0);
  /// First zero when u vanishes before the cap.
  std::optional<double> theta_zero;
  std::vector<CriticalPoint> criticals;
  /// Maxima strictly before theta_zero (or the cap).
  int spikes = 0;
  Trajectory trajectory;
  /// Kinds alternate Max, Min, ... and maxima exceed 1, minima lie below 1.
  /// Reported, not enforced.
  bool alternation_ok = true;
};

/// F(u(t_ref)) = F(alpha) + j1 + j2 - kinetic, with kinetic = eps^2 u'(t_ref)^2 / 2
/// (zero when t_ref is a critical point).
struct EnergySplit {
  double t_ref = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  double f_alpha = 0.0;
  double f_peak = 0.0;
  double kinetic = 0.0;

  double residual() const { return f_peak + kinetic - f_alpha - j1 - j2; }
};

/// One shot with zero detection; throws Error{Degenerate} unless alpha in (0, 1).
ShootProfile shoot(const Params& params, const Tolerances& tol = {});

/// Classifies an already integrated trajectory of the reduced equation.
ShootProfile classify(const Params& params, Trajectory traj, double event_tol = 1e-12);

/// Smallest theta with u(theta) = 0 (refined to event_tol), if any.
std::optional<double> first_zero(const Trajectory& traj, double event_tol = 1e-12);

/// Sign changes of u' on the dense output, refined and classified.
std::vector<CriticalPoint> critical_points(const Trajectory& traj, double event_tol = 1e-12);

/// Weighted integral int_a^b 2 cot(2 theta) u'(theta)^2 over the dense output
/// (series part below the first node).
double friction_integral(const Trajectory& traj, double a, double b);

/// Splits the energy budget at pi/4; t_ref must lie in (pi/4, pi/2) and in the
/// trajectory span, otherwise Error{Domain}.
EnergySplit energy_split(const ShootProfile& profile, double t_ref);

/// |u'(z)^2 / 2 + int_0^z 2 cot(2 theta) u'^2 - (-lambda F(alpha))| at the detected
/// zero z, divided by max(|lambda|, size of the two left-hand terms). Error{Domain}
/// if the profile has no zero.
double ne1_residual(const ShootProfile& profile);

}  // namespace spike
