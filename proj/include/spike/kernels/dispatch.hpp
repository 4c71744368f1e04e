#pragma once

// Lane-parallel arithmetic kernels with a scalar reference implementation and
// an AVX2 variant selected at runtime. Both variants are compiled without
// floating-point contraction and evaluate the same operation sequence, so their
// results agree bit for bit.

#include <cstddef>
#include <span>

namespace spike::kernels {

inline constexpr std::size_t kLanes = 4;

enum class Isa { Scalar, Avx2 };

const char* to_string(Isa isa);

/// Best ISA supported by this CPU and build.
Isa detected_isa();
/// ISA currently used by dispatching entry points (detected unless overridden
/// by force_isa or SPIKE_SHOOTER_SIMD=off).
Isa active_isa();
void force_isa(Isa isa);
void reset_isa();

/// Struct-of-arrays input/output of one Dormand-Prince 5(4) trial step for up
/// to kLanes independent shots of y'' = c5 y^5 + c1 y - fric * f(t) y', with
/// f(t) = 2 cot(2t).
struct DopriBatch {
  alignas(32) double t[kLanes];
  alignas(32) double h[kLanes];
  alignas(32) double u[kLanes];
  alignas(32) double du[kLanes];
  alignas(32) double c5[kLanes];
  alignas(32) double c1[kLanes];
  alignas(32) double fric[kLanes];
  alignas(32) double rtol[kLanes];
  alignas(32) double atol[kLanes];
  // Stage slopes; k[0] is the FSAL input, k[1..6] are written by the kernel.
  alignas(32) double ku[7][kLanes];
  alignas(32) double kdu[7][kLanes];
  // Outputs.
  alignas(32) double u5[kLanes];
  alignas(32) double du5[kLanes];
  alignas(32) double err[kLanes];

  /// Fills lane with a harmless idle state.
  void idle(std::size_t lane);
};

/// Acceleration y'' for one lane, shared by every kernel variant.
double lane_accel(double t, double u, double du, double c5, double c1, double fric);

void dopri_step_scalar(DopriBatch& batch);
void dopri_step_avx2(DopriBatch& batch);
/// Runtime-dispatched step.
void dopri_step(DopriBatch& batch);

/// out[i] = sum_j coeffs[j] * t[i]^(2 (m - j)) * t[i]^parity, m = coeffs.size()-1
/// (Horner in t^2 on an even/odd-spaced polynomial).
void horner_parity_scalar(std::span<const double> coeffs, int parity,
                          std::span<const double> t, std::span<double> out);
void horner_parity_avx2(std::span<const double> coeffs, int parity,
                        std::span<const double> t, std::span<double> out);
void horner_parity(std::span<const double> coeffs, int parity,
                   std::span<const double> t, std::span<double> out);

}  // namespace spike::kernels
