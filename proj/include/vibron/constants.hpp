#pragma once

// Physical constants, CODATA 2018.
namespace vibron::constants {

inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double planck_J_s = 6.62607015e-34;
inline constexpr double elementary_charge_C = 1.602176634e-19;
inline constexpr double vacuum_permittivity_F_m = 8.8541878128e-12;
inline constexpr double speed_of_light_m_s = 2.99792458e8;
inline constexpr double electron_mass_kg = 9.1093837015e-31;
inline constexpr double boltzmann_J_K = 1.380649e-23;

// derived, in the units the model works in
inline constexpr double boltzmann_meV_K = 8.617333262e-2;  // k_B T(300 K) = 25.852 meV
inline constexpr double meV_to_J = elementary_charge_C * 1e-3;
inline constexpr double eV_to_J = elementary_charge_C;

}  // namespace vibron::constants
