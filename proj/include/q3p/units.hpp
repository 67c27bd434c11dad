#pragma once

#include <numbers>

// Internal unit system: lengths of registers in micrometres, time in
// microseconds, angular frequencies in rad/us (so 2*pi*1 MHz = 2*pi rad/us).
// Density grids keep whatever length unit they were written in (Angstrom for
// solvent densities).
namespace q3p::units {

// Van der Waals coefficient of the Rb |70S_1/2> Rydberg state, rad/us * um^6.
inline constexpr double kDefaultC6 = 5420158.53;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Angular frequency in rad/us for a frequency given in MHz.
constexpr double mhz(double f) noexcept { return kTwoPi * f; }

inline constexpr double kDefaultOmegaMax = mhz(2.0);
inline constexpr double kDefaultDeltaMax = mhz(4.0);
inline constexpr double kDefaultDuration = 4.0;
inline constexpr double kDefaultLatticeSpacing = 5.0;

}  // namespace q3p::units
