#pragma once

namespace mimpol {

// CODATA 2018 exact values, SI units.
inline constexpr double speed_of_light = 299792458.0;       // m/s
inline constexpr double planck_h = 6.62607015e-34;          // J s
inline constexpr double boltzmann_k = 1.380649e-23;         // J/K
inline constexpr double elementary_charge = 1.602176634e-19; // C

inline constexpr double pi = 3.14159265358979323846;

} // namespace mimpol
