#pragma once

#include <numbers>

namespace afcmem {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = std::numbers::pi;

/// 3H4 - 1D2 transition of Pr:YSO.
inline constexpr double kDefaultWavelength = 605.977e-9;  // m

/// Host index of Y2SiO5 used for the cold cavity.
inline constexpr double kDefaultHostIndex = 1.8;

/// Excited-state coherence time of the Pr transition.
inline constexpr double kDefaultT2 = 152e-6;  // s

}  // namespace afcmem
