#pragma once

// Shared adaptive engine for the equation family
//
//   y'' = c5 y^5 + c1 y - f(t) y',   f(t) = 2 cot(2t) or 0,
//
// which covers the reduced equation, its linearization at u = 1 and the
// autonomous profile equation Z'' = Z - Z^5.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spike/trajectory.hpp"

namespace spike {

struct Equation {
  double c5 = 0.0;
  double c1 = 0.0;
  bool cot_friction = true;

  static Equation reduced(double lambda) { return {lambda, -lambda, true}; }
  static Equation linearized(double lambda) { return {0.0, 4.0 * lambda, true}; }
  static Equation profile() { return {-1.0, 1.0, false}; }

  double accel(double t, double y, double dy) const;
};

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  /// Multiplies abs_tol; set to the initial amplitude so that exponentially
  /// small shots keep a relative error bound.
  double atol_scale = 1.0;
  double event_tol = 1e-12;
  double t_end = 1.0;
  double h_init = 1e-5;
  double h_max = 0.02;
  double blowup = 50.0;
  bool stop_on_zero = false;
};

struct IntegrationTask {
  Equation eq;
  State start;
  std::optional<EvenSeries> series;
  StepControl control;
};

/// Outcome of one lane; error is set (and trajectory empty) on step underflow.
struct IntegrationResult {
  Trajectory trajectory;
  std::optional<std::string> error;
  long accepted = 0;
  long rejected = 0;
};

/// Integrates one task with the scalar reference kernel. Throws
/// Error{StepUnderflow} on failure.
Trajectory integrate(const IntegrationTask& task);

/// Integrates a batch lane-parallel with the active step kernel (AVX2 when
/// available). Results are identical to integrate() on each task.
std::vector<IntegrationResult> integrate_batch(std::span<const IntegrationTask> tasks);

}  // namespace spike
