#ifndef MAGICSIM_CONSTANTS_HPP_
#define MAGICSIM_CONSTANTS_HPP_

// Single source of truth for physical constants (CODATA 2018) and the
// Yb-171 species numbers used throughout the library and its tests.

namespace magicsim {
namespace constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double elementary_charge = 1.602176634e-19;   // C (exact)
inline constexpr double hbar = 1.054571817e-34;                // J s
inline constexpr double bohr_magneton = 9.2740100783e-24;      // J/T
inline constexpr double epsilon0 = 8.8541878128e-12;           // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

// e^2 / (4 pi eps0), the Coulomb energy scale in J m
inline constexpr double coulomb_energy_scale =
    elementary_charge * elementary_charge / (4.0 * pi * epsilon0);

// Yb-171 (atomic mass; the missing electron is ~3e-6 relative and irrelevant
// at the precision of anything computed here)
inline constexpr double yb171_mass = 170.936330 * atomic_mass_unit;   // kg
inline constexpr double yb171_g_factor = 1.0;                         // ground-state g_F
inline constexpr double yb171_hyperfine = two_pi * 12.642812e9;       // rad/s

}  // namespace constants

// Frequencies are rad/s internally; inputs and reports often use 2pi*Hz.
inline constexpr double hz_2pi(double f_hz) { return constants::two_pi * f_hz; }
inline constexpr double to_hz_2pi(double w_rad_s) { return w_rad_s / constants::two_pi; }

}  // namespace magicsim

#endif  // MAGICSIM_CONSTANTS_HPP_
