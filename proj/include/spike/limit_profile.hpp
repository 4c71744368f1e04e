#pragma once

// Blow-up limit of spike solutions: the autonomous profile Z'' + Z^5 - Z = 0,
// rescaled spikes z(s) = u(T0 + eps s), and the linear barrier of the
// inter-spike region.

#include <optional>
#include <span>
#include <vector>

#include "spike/shooting.hpp"

namespace spike {

/// Zero-energy homoclinic profile 3^(1/4) sech(2s)^(1/2).
double z0(double s);
/// Z0'(s).
double z0_prime(double s);

enum class ProfileKind { Oscillatory, VanishesLeft, Homoclinic };

const char* to_string(ProfileKind kind);

struct ProfileClass {
  double alpha = 0.0;
  ProfileKind kind = ProfileKind::Oscillatory;
  /// c = alpha^6/6 - alpha^2/2.
  double energy = 0.0;
  /// Max |Z'^2/2 + Z^6/6 - Z^2/2 - c| over the nodes of the run.
  double energy_drift = 0.0;
  /// Length of the integrated window in |s|.
  double window = 0.0;
  /// Decisive event location: zero of Z, or second crossing of Z = 1.
  std::optional<double> event_s;
  Trajectory run;
};

inline constexpr double kHomoclinicTolerance = 1e-9;
inline constexpr double kHomoclinicWindow = 15.0;
inline constexpr double kProfileWindow = 60.0;

/// Classifies the solution of Z'' = Z - Z^5, Z(0) = alpha, Z'(0) = 0 on s < 0
/// (integrated forward in |s|, the solution being even). Throws
/// Error{Inconclusive} when the window shows no decisive event and
/// Error{Domain} for alpha <= 0.
ProfileClass classify_profile(double alpha);

struct RescaledSample {
  double s = 0.0;
  double z = 0.0;
  double dz = 0.0;
};

struct RescaledTrajectory {
  double epsilon = 0.0;
  double t_ref = 0.0;
  std::vector<RescaledSample> samples;
};

/// Samples (s, u(t_ref + eps s), eps u') on s in [(pi/4 - t_ref)/eps, 0].
/// t_ref must be within tol of a Max of the profile (or the profile must be
/// constant), else Error{Domain}.
RescaledTrajectory rescale(const ShootProfile& profile, double t_ref, std::size_t samples = 513,
                           double tol = 1e-9);

/// Log-bisection for alpha in (0, 1) whose critical point of the given
/// 1-based index lies at t_ref. Throws Error{NoSignChange} when the bracket
/// cannot be formed.
double alpha_for_critical(double epsilon, int index, double t_ref, const Tolerances& tol = {});

/// One-spike solution with its first maximum at t_ref.
ShootProfile spike_at(double epsilon, double t_ref, const Tolerances& tol = {});

/// sup over s in [-L, 0] of |z_eps(s) - Z0(s)| for the one-spike solution with
/// first maximum at t_ref.
double convergence_error(double epsilon, double L, double t_ref = 1.0, const Tolerances& tol = {});
double convergence_error(const ShootProfile& spike, double L, double t_ref);

struct BarrierParams {
  double K = 0.0;
  double kappa = 0.5;
  double delta = 1.0;
  double epsilon = 0.1;
};

/// phi(0) for eps^2 phi'' - 2 eps^2 K phi' - kappa phi = 0, phi(+-delta) = 1/2.
double barrier_value(const BarrierParams& p);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (x, y).
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace spike
