#pragma once

#include <optional>
#include <vector>

#include "vibron/lineshape.hpp"

namespace vibron {

// Ingredients of the ZPL position assembled from delta-SCF totals plus the
// vibronic-model corrections.
struct ZplInputs {
  double e_excited_eV = 0.0;       // E^e(A1'), excited-state total energy
  double e_ground_eV = 0.0;        // E^g(A1')
  double lambda_meV = 0.0;
  double delta_meV = 0.0;
  double hbar_omega_meV = 0.0;
  double polaron_ground_meV = 0.0;  // lowest eigenvalue of the total Hamiltonian

  void validate() const;  // e_excited > e_ground
};

// E_ZPL = (E^e - E^g) + (Lambda + Delta)/2 - hbar*omega + polaron_ground
double zpl_energy_eV(const ZplInputs& inputs);

// One polaron level entering the thermal population model.
struct EmissionLevel {
  double energy_meV = 0.0;  // above the lowest level (lowest = 0)
  int degeneracy = 1;
  double brightness = 0.0;  // b in [0, 1], E'-fraction relative to pure E'
};

struct EmissionLevels {
  std::vector<EmissionLevel> levels;
  void validate() const;
};

// Boltzmann-averaged brightness eta(T) = sum p_i b_i with
// p_i ~ g_i exp(-E_i / k_B T); at T = 0 only the lowest level is occupied.
double thermal_brightness(const EmissionLevels& levels, double temperature_K);

// Radiative-rate inputs; exactly one of dipole_moment_sq (C^2 m^2) or
// oscillator_strength may be set.
struct RateInputs {
  double e_zpl_eV = 0.0;
  double refractive_index = 2.5;
  std::optional<double> dipole_moment_sq_C2m2;
  std::optional<double> oscillator_strength;

  void validate() const;
};

struct RadiativeRate {
  double gamma_per_s = 0.0;
  double tau_ns = 0.0;  // infinity when fully dark
};

// Gamma = eta n_D E^3 mu^2 / (3 pi eps0 c^3 hbar^4); with an oscillator
// strength f, mu^2 = 3 hbar^2 e^2 f / (2 m_e E) first.
RadiativeRate radiative_rate(const RateInputs& inputs, double eta);

// mu^2 in C^2 m^2 from an oscillator strength at the given photon energy.
double dipole_sq_from_oscillator_strength(double f, double e_zpl_eV);

// Intersystem-crossing rate 4 pi hbar lambda_z^2 F(dE). lambda_z enters as
// an angular frequency in GHz (1e9 rad/s); F is the vibrational-overlap
// spectral density in 1/eV. Throws on negative inputs.
double isc_rate_per_s(double lambda_z_GHz, double overlap_per_eV);

// QE = Gamma_rad / (Gamma_rad + Gamma_nonrad); throws when both are zero.
double quantum_efficiency(double gamma_rad_per_s, double gamma_nonrad_per_s);

}  // namespace vibron
