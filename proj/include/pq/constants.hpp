#pragma once

#include <numbers>

namespace pq {

inline constexpr const char* kVersion = "0.3.0";

namespace constants {

// CODATA exact / recommended values, SI.
inline constexpr double e = 1.602176634e-19;     // C
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double h = 2.0 * std::numbers::pi * hbar;
inline constexpr double phi0 = hbar / (2.0 * e);  // reduced flux quantum, Wb
inline constexpr double epsilon0 = 8.8541878128e-12;

}  // namespace constants

namespace units {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double fF = 1e-15;
inline constexpr double nH = 1e-9;
inline constexpr double GHz = 1e9;
inline constexpr double MHz = 1e6;

constexpr double hz_to_rad_s(double f) { return two_pi * f; }
constexpr double rad_s_to_hz(double w) { return w / two_pi; }

// Energy E expressed as a frequency E/h.
constexpr double joules_to_hz(double energy) { return energy / constants::h; }
constexpr double hz_to_joules(double f) { return f * constants::h; }

}  // namespace units

}  // namespace pq
