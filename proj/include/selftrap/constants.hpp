#pragma once

namespace selftrap::constants {

// CODATA 2018
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double speed_of_light = 299792458.0; // m/s

inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace selftrap::constants
