#pragma once

#include <numbers>

namespace omnoise {

// CODATA 2018 fixed values.
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J/K
inline constexpr double speed_of_light = 299792458.0;  // m/s

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Config I/O is in Hz; everything internal is angular frequency (rad/s).
inline constexpr double hz_to_rad(double f) { return two_pi * f; }
inline constexpr double rad_to_hz(double w) { return w / two_pi; }

}  // namespace omnoise
