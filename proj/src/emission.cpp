#include "vibron/emission.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vibron/constants.hpp"

namespace vibron {

namespace {
namespace pc = vibron::constants;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}
}  // namespace

void ZplInputs::validate() const {
  require(std::isfinite(e_excited_eV) && std::isfinite(e_ground_eV),
          "total energies must be finite");
  require(e_excited_eV > e_ground_eV,
          "excited-state total energy must exceed the ground-state energy");
  require(hbar_omega_meV >= 0.0, "hbar_omega_meV must be non-negative");
}

double zpl_energy_eV(const ZplInputs& in) {
  in.validate();
  return (in.e_excited_eV - in.e_ground_eV) +
         1e-3 * (0.5 * (in.lambda_meV + in.delta_meV) - in.hbar_omega_meV +
                 in.polaron_ground_meV);
}

void EmissionLevels::validate() const {
  require(!levels.empty(), "at least one emission level is required");
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& level : levels) {
    require(level.energy_meV >= 0.0, "level energies must be >= 0");
    require(level.degeneracy >= 1, "level degeneracies must be >= 1");
    require(level.brightness >= 0.0 && level.brightness <= 1.0,
            "brightness weights must lie in [0, 1]");
    lowest = std::min(lowest, level.energy_meV);
  }
  require(lowest == 0.0, "the lowest level must sit at 0 meV");
}

double thermal_brightness(const EmissionLevels& levels, double temperature_K) {
  levels.validate();
  require(temperature_K >= 0.0, "temperature must be >= 0 K");

  if (temperature_K == 0.0) {
    double weight = 0.0, bright = 0.0;
    for (const auto& level : levels.levels)
      if (level.energy_meV == 0.0) {
        weight += level.degeneracy;
        bright += level.degeneracy * level.brightness;
      }
    return bright / weight;
  }

  const double kt = pc::boltzmann_meV_K * temperature_K;
  double weight = 0.0, bright = 0.0;
  for (const auto& level : levels.levels) {
    const double p = level.degeneracy * std::exp(-level.energy_meV / kt);
    weight += p;
    bright += p * level.brightness;
  }
  return bright / weight;
}

void RateInputs::validate() const {
  require(e_zpl_eV > 0.0, "E_ZPL must be positive");
  require(refractive_index >= 1.0, "refractive index must be >= 1");
  require(dipole_moment_sq_C2m2.has_value() != oscillator_strength.has_value(),
          "exactly one of mu^2 and the oscillator strength must be given");
  const double value = dipole_moment_sq_C2m2 ? *dipole_moment_sq_C2m2
                                             : *oscillator_strength;
  require(value > 0.0,
          "the transition dipole is zero: no radiative channel to evaluate");
}

double dipole_sq_from_oscillator_strength(double f, double e_zpl_eV) {
  require(f > 0.0 && e_zpl_eV > 0.0,
          "oscillator strength and E_ZPL must be positive");
  const double energy_J = e_zpl_eV * pc::eV_to_J;
  return 3.0 * pc::hbar_J_s * pc::hbar_J_s * pc::elementary_charge_C *
         pc::elementary_charge_C * f / (2.0 * pc::electron_mass_kg * energy_J);
}

RadiativeRate radiative_rate(const RateInputs& inputs, double eta) {
  inputs.validate();
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");

  const double mu_sq =
      inputs.dipole_moment_sq_C2m2
          ? *inputs.dipole_moment_sq_C2m2
          : dipole_sq_from_oscillator_strength(*inputs.oscillator_strength,
                                               inputs.e_zpl_eV);
  const double energy_J = inputs.e_zpl_eV * pc::eV_to_J;
  const double hbar4 = std::pow(pc::hbar_J_s, 4);
  const double c3 = std::pow(pc::speed_of_light_m_s, 3);
  const double gamma = eta * inputs.refractive_index * energy_J * energy_J *
                       energy_J * mu_sq /
                       (3.0 * M_PI * pc::vacuum_permittivity_F_m * c3 * hbar4);
  RadiativeRate rate;
  rate.gamma_per_s = gamma;
  rate.tau_ns =
      gamma > 0.0 ? 1e9 / gamma : std::numeric_limits<double>::infinity();
  return rate;
}

double isc_rate_per_s(double lambda_z_GHz, double overlap_per_eV) {
  require(lambda_z_GHz >= 0.0, "lambda_z must be >= 0");
  require(overlap_per_eV >= 0.0, "the spectral overlap must be >= 0");
  const double lambda_rad_s = lambda_z_GHz * 1e9;
  const double overlap_per_J = overlap_per_eV / pc::eV_to_J;
  return 4.0 * M_PI * pc::hbar_J_s * lambda_rad_s * lambda_rad_s *
         overlap_per_J;
}

double quantum_efficiency(double gamma_rad_per_s, double gamma_nonrad_per_s) {
  require(gamma_rad_per_s >= 0.0 && gamma_nonrad_per_s >= 0.0,
          "rates must be non-negative");
  const double total = gamma_rad_per_s + gamma_nonrad_per_s;
  require(total > 0.0, "at least one decay rate must be positive");
  return gamma_rad_per_s / total;
}

}  // namespace vibron
