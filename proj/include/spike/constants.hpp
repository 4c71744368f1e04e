#pragma once

#include <numbers>

namespace spike {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;
inline constexpr double kQuarterPi = std::numbers::pi / 4.0;

/// Positive zero of F(u) = u^6/6 - u^2/2, i.e. 3^(1/4).
inline constexpr double kSigma = 1.3160740129524924608;

}  // namespace spike
