#include "vibron/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vibron/format.hpp"

namespace vibron {

namespace {
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

double poisson_term(double s, int n) {
  // exp(-s) s^n / n!
  double term = std::exp(-s);
  for (int i = 1; i <= n; ++i) term *= s / i;
  return term;
}
}  // namespace

void SpectralModel::validate() const {
  require(std::isfinite(zpl_eV), "zpl_eV must be finite");
  for (const auto& mode : modes) {
    require(mode.hbar_omega_meV > 0.0, "mode energies must be positive");
    require(mode.huang_rhys >= 0.0 && std::isfinite(mode.huang_rhys),
            "partial Huang-Rhys factors must be non-negative");
  }
  require(std::isfinite(s_total()), "total Huang-Rhys factor must be finite");
  require(std::isfinite(broadening_meV) && broadening_meV >= 0.0,
          "broadening must be non-negative");
}

double SpectralModel::s_total() const {
  double s = 0.0;
  for (const auto& mode : modes) s += mode.huang_rhys;
  return s;
}

SpectrumGrid SpectrumGrid::auto_for(const SpectralModel& model,
                                    double step_meV) {
  double max_omega = 0.0;
  for (const auto& mode : model.modes)
    max_omega = std::max(max_omega, mode.hbar_omega_meV);
  const double zpl = model.zpl_eV + model.alignment_shift_eV;
  const double sigma_eV = model.broadening_meV * 1e-3;
  SpectrumGrid grid;
  grid.min_eV = zpl - 6.0 * model.s_total() * max_omega * 1e-3 - 5.0 * sigma_eV;
  grid.max_eV = zpl + 5.0 * sigma_eV;
  grid.step_meV = step_meV;
  return grid;
}

std::vector<FcStick> franck_condon_sticks(const SpectralModel& model,
                                          double truncation) {
  model.validate();
  require(truncation > 0.0 && truncation < 1.0,
          "truncation threshold must be in (0, 1)");
  const double zpl = model.zpl_eV + model.alignment_shift_eV;

  // per-mode Poisson factors cut at the same relative threshold; the bound
  // on a partial product times the remaining modes' maxima prunes the rest
  std::vector<std::vector<double>> factors;
  std::vector<double> max_factor;
  double global_max = 1.0;
  for (const auto& mode : model.modes) {
    std::vector<double> f;
    double best = 0.0;
    for (int n = 0;; ++n) {
      const double w = poisson_term(mode.huang_rhys, n);
      best = std::max(best, w);
      if (n > mode.huang_rhys && w < truncation * best * 1e-3) break;
      f.push_back(w);
      if (n > 4000) break;  // S would have to be absurd to get here
    }
    factors.push_back(std::move(f));
    max_factor.push_back(best);
    global_max *= best;
  }
  const double threshold = truncation * global_max;

  // suffix products of the per-mode maxima for the pruning bound
  std::vector<double> suffix_max(model.modes.size() + 1, 1.0);
  for (int i = static_cast<int>(model.modes.size()) - 1; i >= 0; --i)
    suffix_max[i] = suffix_max[i + 1] * max_factor[i];

  std::vector<FcStick> sticks;
  struct Frame {
    std::size_t mode;
    double offset_meV;
    double weight;
  };
  std::vector<Frame> stack{{0, 0.0, 1.0}};
  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    if (frame.mode == model.modes.size()) {
      sticks.push_back({zpl - frame.offset_meV * 1e-3, frame.weight});
      continue;
    }
    const auto& f = factors[frame.mode];
    for (std::size_t n = 0; n < f.size(); ++n) {
      const double w = frame.weight * f[n];
      if (w * suffix_max[frame.mode + 1] < threshold) continue;
      stack.push_back({frame.mode + 1,
                       frame.offset_meV +
                           static_cast<double>(n) *
                               model.modes[frame.mode].hbar_omega_meV,
                       w});
    }
  }

  std::sort(sticks.begin(), sticks.end(), [](const FcStick& a, const FcStick& b) {
    return a.energy_eV != b.energy_eV ? a.energy_eV > b.energy_eV
                                      : a.weight > b.weight;
  });
  return sticks;
}

Spectrum franck_condon_spectrum(const SpectralModel& model,
                                const SpectrumGrid& grid, double truncation) {
  model.validate();
  if (model.modes.empty() && model.broadening_meV <= 0.0)
    throw std::invalid_argument(
        "no phonon modes and no broadening: the spectrum degenerates to a "
        "delta line");
  require(model.broadening_meV > 0.0,
          "a positive Gaussian broadening is required to sample a spectrum");
  require(grid.step_meV > 0.0 && grid.max_eV > grid.min_eV,
          "spectrum grid must be ascending with positive step");

  const auto sticks = franck_condon_sticks(model, truncation);
  const double sigma_eV = model.broadening_meV * 1e-3;
  const double step_eV = grid.step_meV * 1e-3;
  const auto n_points =
      static_cast<std::size_t>((grid.max_eV - grid.min_eV) / step_eV) + 1;

  Spectrum spectrum;
  spectrum.energy_eV.resize(n_points);
  spectrum.intensity.assign(n_points, 0.0);
  for (std::size_t i = 0; i < n_points; ++i)
    spectrum.energy_eV[i] = grid.min_eV + static_cast<double>(i) * step_eV;

  const double norm = kInvSqrt2Pi / sigma_eV;
  for (const auto& stick : sticks) {
    // a Gaussian is numerically zero past ~9 sigma; restrict the window
    const double lo = stick.energy_eV - 9.0 * sigma_eV;
    const double hi = stick.energy_eV + 9.0 * sigma_eV;
    const auto first = static_cast<std::size_t>(std::max(
        0.0, std::ceil((lo - grid.min_eV) / step_eV)));
    const auto last = static_cast<std::size_t>(std::max(
        0.0, std::min(static_cast<double>(n_points) - 1.0,
                      std::floor((hi - grid.min_eV) / step_eV))));
    for (std::size_t i = first; i <= last && i < n_points; ++i) {
      const double z = (spectrum.energy_eV[i] - stick.energy_eV) / sigma_eV;
      spectrum.intensity[i] += stick.weight * norm * std::exp(-0.5 * z * z);
    }
  }

  spectrum.raw_peak =
      *std::max_element(spectrum.intensity.begin(), spectrum.intensity.end());
  require(spectrum.raw_peak > 0.0,
          "spectrum grid does not cover any emission line");
  for (auto& value : spectrum.intensity) value /= spectrum.raw_peak;
  return spectrum;
}

Spectrum franck_condon_spectrum(const SpectralModel& model) {
  return franck_condon_spectrum(model, SpectrumGrid::auto_for(model));
}

std::pair<double, double> hr_and_dw(const SpectralModel& model) {
  model.validate();
  const double s = model.s_total();
  return {s, std::exp(-s)};
}

SpectralModel isotope_rescale(
    const SpectralModel& model, const std::vector<double>& frequency_scale,
    const std::optional<std::vector<double>>& huang_rhys_override) {
  model.validate();
  require(frequency_scale.size() == model.modes.size(),
          "one frequency scale factor per mode is required");
  if (huang_rhys_override)
    require(huang_rhys_override->size() == model.modes.size(),
            "one Huang-Rhys override per mode is required");

  SpectralModel scaled = model;
  for (std::size_t i = 0; i < model.modes.size(); ++i) {
    require(frequency_scale[i] > 0.0, "frequency scale factors must be positive");
    scaled.modes[i].hbar_omega_meV *= frequency_scale[i];
    if (huang_rhys_override)
      scaled.modes[i].huang_rhys = (*huang_rhys_override)[i];
  }
  scaled.simple_scaling_approximation = !huang_rhys_override.has_value();
  scaled.validate();
  return scaled;
}

std::vector<std::pair<std::string, Spectrum>> compare_defect_sidebands(
    const std::vector<std::pair<std::string, SpectralModel>>& models,
    double step_meV) {
  require(models.size() >= 2, "need at least two models to compare");

  // shift every ZPL to zero and sample on a shared grid
  double min_eV = 0.0, max_eV = 0.0;
  for (const auto& [name, model] : models) {
    SpectralModel shifted = model;
    shifted.zpl_eV = 0.0;
    shifted.alignment_shift_eV = 0.0;
    const SpectrumGrid grid = SpectrumGrid::auto_for(shifted, step_meV);
    min_eV = std::min(min_eV, grid.min_eV);
    max_eV = std::max(max_eV, grid.max_eV);
  }
  SpectrumGrid grid{min_eV, max_eV, step_meV};

  std::vector<std::pair<std::string, Spectrum>> result;
  result.reserve(models.size());
  for (const auto& [name, model] : models) {
    SpectralModel shifted = model;
    shifted.zpl_eV = 0.0;
    shifted.alignment_shift_eV = 0.0;
    result.emplace_back(name, franck_condon_spectrum(shifted, grid));
  }
  return result;
}

double fc_overlap_density_per_eV(const SpectralModel& model, double gap_eV,
                                 double truncation) {
  model.validate();
  require(model.broadening_meV > 0.0,
          "overlap density needs a positive broadening");
  const auto sticks = franck_condon_sticks(model, truncation);
  const double sigma_eV = model.broadening_meV * 1e-3;
  const double zpl = model.zpl_eV + model.alignment_shift_eV;
  const double energy = zpl - gap_eV;  // gap measured down from the ZPL
  double density = 0.0;
  for (const auto& stick : sticks) {
    const double z = (energy - stick.energy_eV) / sigma_eV;
    if (std::abs(z) < 40.0)
      density += stick.weight * kInvSqrt2Pi / sigma_eV * std::exp(-0.5 * z * z);
  }
  return density;
}

std::string spectrum_to_csv(const Spectrum& spectrum) {
  std::string out = "energy_eV,intensity\n";
  for (std::size_t i = 0; i < spectrum.energy_eV.size(); ++i)
    out += csv_line({format_g9(spectrum.energy_eV[i]),
                     format_g9(spectrum.intensity[i])});
  return out;
}

std::string modes_to_csv(const std::vector<PhononMode>& modes) {
  std::string out = "hbar_omega_meV,S\n";
  for (const auto& mode : modes)
    out += csv_line({format_g9(mode.hbar_omega_meV), format_g9(mode.huang_rhys)});
  return out;
}

std::vector<PhononMode> modes_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<PhononMode> modes;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (first) {
      first = false;
      if (line.rfind("hbar_omega_meV", 0) == 0) continue;  // header
    }
    const auto comma = line.find(',');
    require(comma != std::string::npos,
            "mode table rows must be 'hbar_omega_meV,S'");
    modes.push_back({std::stod(line.substr(0, comma)),
                     std::stod(line.substr(comma + 1))});
  }
  return modes;
}

}  // namespace vibron
