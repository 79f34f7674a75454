#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vibron {

// Effective phonon mode with its partial Huang-Rhys factor.
struct PhononMode {
  double hbar_omega_meV = 0.0;
  double huang_rhys = 0.0;  // S_k >= 0
};

// Franck-Condon emission model: ZPL position plus effective modes.
struct SpectralModel {
  double zpl_eV = 0.0;
  std::vector<PhononMode> modes;
  double broadening_meV = 10.0;  // Gaussian sigma
  double alignment_shift_eV = 0.0;
  // set by isotope_rescale when the S factors were only frequency-scaled
  bool simple_scaling_approximation = false;

  void validate() const;  // throws std::invalid_argument
  double s_total() const;
};

// Unbroadened Franck-Condon line.
struct FcStick {
  double energy_eV = 0.0;
  double weight = 0.0;  // Poisson product; weights of the full series sum to 1
};

// Sampled emission spectrum; intensity normalized so the maximum equals 1.
struct Spectrum {
  std::vector<double> energy_eV;   // ascending uniform grid
  std::vector<double> intensity;   // max = 1
  double raw_peak = 0.0;           // normalization divisor (per-eV density)
};

struct SpectrumGrid {
  double min_eV = 0.0;
  double max_eV = 0.0;
  double step_meV = 1.0;

  // [zpl - 6 S_tot max(hw) - 5 sigma, zpl + 5 sigma]
  static SpectrumGrid auto_for(const SpectralModel& model,
                               double step_meV = 1.0);
};

// Multi-mode Poisson progression: every occupation vector {n_k} whose weight
// prod_k exp(-S_k) S_k^{n_k}/n_k! is at least `truncation` times the largest
// term, placed at zpl - sum n_k hw_k (Stokes side), sorted by energy
// descending. Weights are not renormalized after truncation.
std::vector<FcStick> franck_condon_sticks(const SpectralModel& model,
                                          double truncation = 1e-6);

// Gaussian-broadened stick series on the grid. Throws when the model has no
// modes and no positive broadening (degenerate delta spectrum), or when the
// broadening is not positive.
Spectrum franck_condon_spectrum(const SpectralModel& model,
                                const SpectrumGrid& grid,
                                double truncation = 1e-6);
Spectrum franck_condon_spectrum(const SpectralModel& model);

// (S_total, Debye-Waller factor e^{-S_total})
std::pair<double, double> hr_and_dw(const SpectralModel& model);

// Frequency-rescaled model for an isotope substitution: mode energies are
// multiplied by the per-mode factors; S factors are replaced by the supplied
// overrides when given, otherwise kept and the result is flagged as the
// simple-scaling approximation. Throws on non-positive scale factors or
// mismatched list lengths.
SpectralModel isotope_rescale(const SpectralModel& model,
                              const std::vector<double>& frequency_scale,
                              const std::optional<std::vector<double>>&
                                  huang_rhys_override = std::nullopt);

// Spectra shifted so every ZPL sits at 0, sampled on one common grid.
std::vector<std::pair<std::string, Spectrum>> compare_defect_sidebands(
    const std::vector<std::pair<std::string, SpectralModel>>& models,
    double step_meV = 1.0);

// Normalized Gaussian-broadened Franck-Condon density at `gap_eV` below the
// ZPL, in 1/eV (integrates to 1 over the emission axis).
double fc_overlap_density_per_eV(const SpectralModel& model, double gap_eV,
                                 double truncation = 1e-6);

// spectrum CSV: header energy_eV,intensity
std::string spectrum_to_csv(const Spectrum& spectrum);
// mode table CSV: header hbar_omega_meV,S
std::string modes_to_csv(const std::vector<PhononMode>& modes);
std::vector<PhononMode> modes_from_csv(const std::string& text);

}  // namespace vibron
