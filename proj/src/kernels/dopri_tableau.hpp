#pragma once

// Dormand-Prince 5(4) coefficients (Hairer, Norsett & Wanner, DOPRI5).

#include <cmath>

namespace spike::kernels::dp {

inline constexpr double c2 = 1.0 / 5.0;
inline constexpr double c3 = 3.0 / 10.0;
inline constexpr double c4 = 4.0 / 5.0;
inline constexpr double c5 = 8.0 / 9.0;

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0;
inline constexpr double a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0;
inline constexpr double a42 = -56.0 / 15.0;
inline constexpr double a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0;
inline constexpr double a52 = -25360.0 / 2187.0;
inline constexpr double a53 = 64448.0 / 6561.0;
inline constexpr double a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0;
inline constexpr double a62 = -355.0 / 33.0;
inline constexpr double a63 = 46732.0 / 5247.0;
inline constexpr double a64 = 49.0 / 176.0;
inline constexpr double a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0;
inline constexpr double a73 = 500.0 / 1113.0;
inline constexpr double a74 = 125.0 / 192.0;
inline constexpr double a75 = -2187.0 / 6784.0;
inline constexpr double a76 = 11.0 / 84.0;

inline constexpr double e1 = 71.0 / 57600.0;
inline constexpr double e3 = -71.0 / 16695.0;
inline constexpr double e4 = 71.0 / 1920.0;
inline constexpr double e5 = -17253.0 / 339200.0;
inline constexpr double e6 = 22.0 / 525.0;
inline constexpr double e7 = -1.0 / 40.0;

inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

// pi/2 split into a double and its rounding error.
inline constexpr double kHalfPiHi = 1.5707963267948966;
inline constexpr double kHalfPiLo = 6.123233995736766e-17;
inline constexpr double kQuarterPi = 0.7853981633974483;

/// 2 cot(2t). Past pi/4 it is evaluated through the gap pi/2 - t, which is
/// exact in double (Sterbenz), so the value stays accurate as t nears pi/2.
inline double cot_friction(double t) {
  if (t > kQuarterPi) {
    const double g = (kHalfPiHi - t) + kHalfPiLo;
    return -2.0 * std::cos(2.0 * g) / std::sin(2.0 * g);
  }
  return 2.0 * std::cos(2.0 * t) / std::sin(2.0 * t);
}

inline double friction_term(double t, double fric) {
  if (fric == 0.0) return 0.0;
  return fric * cot_friction(t);
}

inline double scaled_error(double e, double y0, double y1, double atol, double rtol) {
  const double a0 = std::fabs(y0);
  const double a1 = std::fabs(y1);
  const double sc = atol + rtol * (a0 > a1 ? a0 : a1);
  return std::fabs(e) / sc;
}

}  // namespace spike::kernels::dp
