#include "vibron/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "vibron/emission.hpp"
#include "vibron/format.hpp"
#include "vibron/lineshape.hpp"
#include "vibron/model.hpp"
#include "vibron/polaron.hpp"
#include "vibron/thermo.hpp"

namespace vibron {

namespace fs = std::filesystem;

void RunReport::warn_once(const std::string& message) {
  if (std::find(warnings.begin(), warnings.end(), message) == warnings.end())
    warnings.push_back(message);
}

std::string RunReport::text() const {
  std::string out = "subcommand: " + subcommand + "\nparameters:\n";
  for (const auto& [key, value, provenance] : resolved)
    out += "  " + key + " = " + value + "  (" + provenance + ")\n";
  out += "outputs:\n";
  for (const auto& file : files) out += "  " + file + "\n";
  if (!warnings.empty()) {
    out += "warnings:\n";
    for (const auto& warning : warnings) out += "  - " + warning + "\n";
  }
  return out;
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "solve", "apes", "fit", "spectrum", "isotope", "rates", "zpl", "thermo"};
  return names;
}

namespace {

// ---- section access with schema validation and provenance echo ------------

class SectionReader {
 public:
  SectionReader(const RunConfig& config, std::string name,
                std::vector<std::string> allowed_keys, bool required,
                RunReport* report)
      : name_(std::move(name)), report_(report) {
    section_ = config.find(name_);
    if (!section_ && required)
      throw ConfigError(0, 0, "missing required section [" + name_ + "]");
    if (section_) {
      for (const auto& entry : section_->entries)
        if (std::find(allowed_keys.begin(), allowed_keys.end(), entry.key) ==
            allowed_keys.end())
          throw ConfigError(entry.line, 0,
                            "unknown key '" + entry.key + "' in section [" +
                                name_ + "]");
    }
  }

  bool exists() const { return section_ != nullptr; }
  bool has(const std::string& key) const {
    return section_ && section_->find(key);
  }
  const std::string& section_name() const { return name_; }

  const ConfigEntry& require(const std::string& key) const {
    const ConfigEntry* entry = section_ ? section_->find(key) : nullptr;
    if (!entry)
      throw ConfigError(section_ ? section_->line : 0, 0,
                        "missing required key '" + key + "' in section [" +
                            name_ + "]");
    return *entry;
  }

  double get_double(const std::string& key) {
    const ConfigEntry& entry = require(key);
    const double value = entry.as_double();
    echo(key, format_g9(value), entry);
    return value;
  }
  double get_double(const std::string& key, double fallback) {
    if (!has(key)) {
      echo_default(key, format_g9(fallback));
      return fallback;
    }
    return get_double(key);
  }
  long long get_int(const std::string& key) {
    const ConfigEntry& entry = require(key);
    const long long value = entry.as_int();
    echo(key, std::to_string(value), entry);
    return value;
  }
  long long get_int(const std::string& key, long long fallback) {
    if (!has(key)) {
      echo_default(key, std::to_string(fallback));
      return fallback;
    }
    return get_int(key);
  }
  std::string get_string(const std::string& key) {
    const ConfigEntry& entry = require(key);
    echo(key, entry.raw, entry);
    return entry.raw;
  }
  std::string get_string(const std::string& key, const std::string& fallback) {
    if (!has(key)) {
      echo_default(key, fallback);
      return fallback;
    }
    return get_string(key);
  }
  bool get_bool(const std::string& key, bool fallback) {
    if (!has(key)) {
      echo_default(key, fallback ? "true" : "false");
      return fallback;
    }
    const ConfigEntry& entry = require(key);
    const bool value = entry.as_bool();
    echo(key, value ? "true" : "false", entry);
    return value;
  }
  std::vector<double> get_double_list(const std::string& key) {
    const ConfigEntry& entry = require(key);
    auto values = entry.as_double_list();
    std::string joined = "[";
    for (std::size_t i = 0; i < values.size(); ++i)
      joined += (i ? ", " : "") + format_g9(values[i]);
    joined += "]";
    echo(key, joined, entry);
    return values;
  }
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) {
    if (!has(key)) {
      std::string joined = "[";
      for (std::size_t i = 0; i < fallback.size(); ++i)
        joined += (i ? ", " : "") + format_g9(fallback[i]);
      joined += "]";
      echo_default(key, joined);
      return fallback;
    }
    return get_double_list(key);
  }

  // scalar or list keys that may be either (e.g. one scale factor per mode)
  std::vector<double> get_scalar_or_list(const std::string& key) {
    const ConfigEntry& entry = require(key);
    if (entry.is_list) return get_double_list(key);
    return {get_double(key)};
  }

  void echo_computed(const std::string& key, const std::string& value) {
    report_->resolved.push_back({name_ + "." + key, value, "computed"});
  }

 private:
  void echo(const std::string& key, const std::string& value,
            const ConfigEntry& entry) {
    const std::string provenance =
        entry.line > 0 ? "config line " + std::to_string(entry.line)
                       : "override";
    report_->resolved.push_back({name_ + "." + key, value, provenance});
  }
  void echo_default(const std::string& key, const std::string& value) {
    report_->resolved.push_back({name_ + "." + key, value, "default"});
  }

  std::string name_;
  const ConfigSection* section_;
  RunReport* report_;
};

std::string write_file(const std::string& output_dir, const std::string& name,
                       const std::string& content, RunReport* report) {
  fs::create_directories(output_dir);
  const fs::path path = fs::path(output_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  out.close();
  report->files.push_back(path.string());
  return path.string();
}

std::string resolve_input(const std::string& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

// ---- [model] ---------------------------------------------------------------

struct ModelInput {
  VibronicParameterSet params;
  int n_max = 40;
};

ModelInput load_model(const RunConfig& config, RunReport* report) {
  SectionReader model(config,
                      "model",
                      {"spin", "lambda_meV", "delta_meV", "hbar_omega_meV",
                       "provenance", "n_max", "f_o_meV", "f_u_meV",
                       "e_jt1_meV", "e_jt2_meV"},
                      true, report);

  ModelInput input;
  input.params.spin = spin_from_string(model.get_string("spin", "singlet"));
  input.params.lambda_meV = model.get_double("lambda_meV", 0.0);
  input.params.delta_meV = model.get_double("delta_meV", 0.0);
  input.params.provenance = model.get_string("provenance", "user");

  const ConfigEntry& hw_entry = model.require("hbar_omega_meV");
  input.params.hbar_omega_meV = model.get_double("hbar_omega_meV");
  if (input.params.hbar_omega_meV <= 0.0)
    throw ConfigError(hw_entry.line, 0, "hbar_omega_meV must be positive");

  const bool direct = model.has("f_o_meV") || model.has("f_u_meV");
  const bool via_jt = model.has("e_jt1_meV") || model.has("e_jt2_meV");
  if (direct == via_jt)
    throw ConfigError(0, 0,
                      "[model] needs either f_o_meV/f_u_meV or "
                      "e_jt1_meV/e_jt2_meV (exactly one style)");
  if (direct) {
    input.params.f_o_meV = model.get_double("f_o_meV");
    input.params.f_u_meV = model.get_double("f_u_meV");
  } else {
    const ConfigEntry& jt_entry = model.require("e_jt1_meV");
    const double e1 = model.get_double("e_jt1_meV");
    const double e2 = model.get_double("e_jt2_meV");
    if (e1 < 0.0 || e2 < 0.0)
      throw ConfigError(jt_entry.line, 0,
                        "Jahn-Teller energies must be non-negative");
    std::tie(input.params.f_o_meV, input.params.f_u_meV) =
        couplings_from_jt_energies(e1, e2, input.params.hbar_omega_meV);
    model.echo_computed("f_o_meV", format_g9(input.params.f_o_meV));
    model.echo_computed("f_u_meV", format_g9(input.params.f_u_meV));
  }

  input.n_max = static_cast<int>(model.get_int("n_max", 40));
  if (input.n_max < 0) throw ConfigError(0, 0, "n_max must be >= 0");
  input.params.validate();
  return input;
}

SolveOptions load_solve_options(SectionReader& solve) {
  SolveOptions options;
  const std::string method = solve.get_string("method", "auto");
  if (method == "auto")
    options.method = SolverMethod::Auto;
  else if (method == "dense")
    options.method = SolverMethod::Dense;
  else if (method == "lanczos")
    options.method = SolverMethod::Lanczos;
  else
    throw ConfigError(0, 0, "method must be auto, dense or lanczos");
  options.degeneracy_tol_meV = solve.get_double("degeneracy_tol_meV", 0.01);
  return options;
}

// ---- [spectrum] ------------------------------------------------------------

const std::vector<std::string>& spectrum_keys() {
  static const std::vector<std::string> keys = {
      "name", "zpl_eV", "broadening_meV", "grid_step_meV",
      "alignment_shift_eV", "mode_hbar_omega_meV", "mode_s", "modes_csv"};
  return keys;
}

SpectralModel load_spectral_model(const RunConfig& config,
                                  const std::string& base_dir,
                                  RunReport* report, std::string* name_out,
                                  double* step_out) {
  SectionReader spectrum(config, "spectrum", spectrum_keys(), true, report);
  SpectralModel model;
  if (name_out) *name_out = spectrum.get_string("name", "primary");
  model.zpl_eV = spectrum.get_double("zpl_eV");
  model.broadening_meV = spectrum.get_double("broadening_meV", 10.0);
  model.alignment_shift_eV = spectrum.get_double("alignment_shift_eV", 0.0);
  if (step_out) *step_out = spectrum.get_double("grid_step_meV", 1.0);

  const bool single = spectrum.has("mode_hbar_omega_meV") || spectrum.has("mode_s");
  const bool table = spectrum.has("modes_csv");
  if (single == table)
    throw ConfigError(0, 0,
                      "[spectrum] needs either mode_hbar_omega_meV/mode_s or "
                      "modes_csv (exactly one style)");
  if (single) {
    model.modes.push_back({spectrum.get_double("mode_hbar_omega_meV"),
                           spectrum.get_double("mode_s")});
  } else {
    const std::string path =
        resolve_input(base_dir, spectrum.get_string("modes_csv"));
    model.modes = modes_from_csv(read_file(path));
  }
  if (model.modes.size() == 1)
    report->warn_once("single-effective-mode approximation in use");
  model.validate();
  return model;
}

std::string sticks_to_csv(const std::vector<FcStick>& sticks) {
  std::string out = "energy_eV,weight\n";
  for (const auto& stick : sticks)
    out += csv_line({format_g9(stick.energy_eV), format_g9(stick.weight)});
  return out;
}

// ---- subcommands -----------------------------------------------------------

void run_solve(const RunConfig& config, const std::string& output_dir,
               const std::string&, RunReport* report) {
  const ModelInput model = load_model(config, report);
  SectionReader solve(config,
                      "solve",
                      {"k", "method", "degeneracy_tol_meV", "convergence_n_max"},
                      false, report);
  const int k = static_cast<int>(solve.get_int("k", 6));
  const SolveOptions options = load_solve_options(solve);
  std::vector<double> sweep_default = {
      static_cast<double>(std::max(0, model.n_max - 4)),
      static_cast<double>(model.n_max)};
  const std::vector<double> sweep_raw =
      solve.get_double_list("convergence_n_max", sweep_default);

  std::vector<int> cutoffs;
  for (double value : sweep_raw) cutoffs.push_back(static_cast<int>(value));
  if (std::find(cutoffs.begin(), cutoffs.end(), model.n_max) == cutoffs.end())
    cutoffs.push_back(model.n_max);
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());

  const ConvergenceReport sweep =
      convergence_sweep(model.params, cutoffs, k, options);
  const VibronicHamiltonian h = build_total_hamiltonian(model.params, model.n_max);
  const auto states = solve_lowest(h, k, options);

  std::string csv = states_to_csv(states);
  if (sweep.n_max_values.size() >= 2) {
    csv += "# convergence n_max: " +
           std::to_string(sweep.n_max_values[sweep.n_max_values.size() - 2]) +
           " -> " + std::to_string(sweep.n_max_values.back()) + "\n";
    for (std::size_t level = 0; level < sweep.last_drift_meV.size(); ++level)
      csv += "# level " + std::to_string(level) +
             " drift_meV: " + format_g9(sweep.last_drift_meV[level]) + "\n";
  }
  write_file(output_dir, "states.csv", csv, report);
}

void run_apes(const RunConfig& config, const std::string& output_dir,
              const std::string&, RunReport* report) {
  const ModelInput model = load_model(config, report);
  SectionReader apes(config, "apes",
                     {"x_min", "x_max", "points", "x_values", "y"}, true,
                     report);
  std::vector<double> xs;
  if (apes.has("x_values")) {
    xs = apes.get_double_list("x_values");
  } else {
    const double x_min = apes.get_double("x_min");
    const double x_max = apes.get_double("x_max");
    const auto points = static_cast<int>(apes.get_int("points"));
    if (points < 2 || x_max <= x_min)
      throw ConfigError(0, 0, "[apes] needs x_max > x_min and points >= 2");
    for (int i = 0; i < points; ++i)
      xs.push_back(x_min + (x_max - x_min) * i / (points - 1));
  }
  const double y = apes.get_double("y", 0.0);

  const auto samples = apes_slice(model.params, xs, y);
  std::string csv = "x,e1_meV,e2_meV,e3_meV,e4_meV\n";
  for (const auto& sample : samples)
    csv += csv_line({format_g9(sample.x), format_g9(sample.branch_energies[0]),
                     format_g9(sample.branch_energies[1]),
                     format_g9(sample.branch_energies[2]),
                     format_g9(sample.branch_energies[3])});
  write_file(output_dir, "apes.csv", csv, report);
}

std::vector<ApesFitSample> fit_samples_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<ApesFitSample> samples;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line.rfind("x,", 0) == 0) continue;
    std::istringstream row(line);
    std::string cell;
    ApesFitSample sample;
    bool first = true;
    while (std::getline(row, cell, ',')) {
      if (first) {
        sample.x = std::stod(cell);
        first = false;
      } else {
        sample.branch_energies.push_back(std::stod(cell));
      }
    }
    if (first || sample.branch_energies.empty())
      throw std::runtime_error("fit samples line " + std::to_string(line_no) +
                               ": expected x plus 1-4 branch energies");
    samples.push_back(std::move(sample));
  }
  return samples;
}

void run_fit(const RunConfig& config, const std::string& output_dir,
             const std::string& base_dir, RunReport* report) {
  const ModelInput initial = load_model(config, report);
  SectionReader fit(config, "fit",
                    {"samples_csv", "fit_lambda_delta", "max_iterations"}, true,
                    report);
  const std::string samples_path =
      resolve_input(base_dir, fit.get_string("samples_csv"));
  ApesFitOptions options;
  options.fit_lambda_delta = fit.get_bool("fit_lambda_delta", false);
  options.max_iterations =
      static_cast<int>(fit.get_int("max_iterations", 200));

  const auto samples = fit_samples_from_csv(read_file(samples_path));
  const ApesFitReport result = fit_apes(samples, initial.params, options);

  fit.echo_computed("f_o_meV", format_g9(result.params.f_o_meV));
  fit.echo_computed("f_u_meV", format_g9(result.params.f_u_meV));
  fit.echo_computed("hbar_omega_meV", format_g9(result.params.hbar_omega_meV));
  if (options.fit_lambda_delta) {
    fit.echo_computed("lambda_meV", format_g9(result.params.lambda_meV));
    fit.echo_computed("delta_meV", format_g9(result.params.delta_meV));
  }
  fit.echo_computed("rel_stddev", format_g9(result.rel_stddev));

  RunConfig fitted;
  ConfigSection& section = fitted.get_or_create("model");
  auto push = [&section](const std::string& key, const std::string& value) {
    section.entries.push_back({key, value, false, {}, 0});
  };
  push("spin", to_string(result.params.spin));
  push("lambda_meV", format_g9(result.params.lambda_meV));
  push("delta_meV", format_g9(result.params.delta_meV));
  push("f_o_meV", format_g9(result.params.f_o_meV));
  push("f_u_meV", format_g9(result.params.f_u_meV));
  push("hbar_omega_meV", format_g9(result.params.hbar_omega_meV));
  push("provenance", result.params.provenance);
  push("n_max", std::to_string(initial.n_max));
  write_file(output_dir, "fitted_params.cfg", serialize_config(fitted), report);

  std::string csv = "x,branch,residual_meV\n";
  std::size_t index = 0;
  for (const auto& sample : samples)
    for (std::size_t branch = 0; branch < sample.branch_energies.size();
         ++branch)
      csv += csv_line({format_g9(sample.x), std::to_string(branch + 1),
                       format_g9(result.residuals[index++])});
  csv += "# rel_stddev: " + format_g9(result.rel_stddev) + "\n";
  csv += "# iterations: " + std::to_string(result.iterations) + "\n";
  write_file(output_dir, "fit_report.csv", csv, report);
}

void run_spectrum(const RunConfig& config, const std::string& output_dir,
                  const std::string& base_dir, RunReport* report) {
  std::string name;
  double step = 1.0;
  const SpectralModel model =
      load_spectral_model(config, base_dir, report, &name, &step);

  const auto sticks = franck_condon_sticks(model);
  write_file(output_dir, "sticks.csv", sticks_to_csv(sticks), report);
  const Spectrum spectrum =
      franck_condon_spectrum(model, SpectrumGrid::auto_for(model, step));
  write_file(output_dir, "spectrum.csv", spectrum_to_csv(spectrum), report);

  const auto [s_total, dw] = hr_and_dw(model);
  SectionReader echo(config, "spectrum", spectrum_keys(), true, report);
  echo.echo_computed("s_total", format_g9(s_total));
  echo.echo_computed("debye_waller", format_g9(dw));

  const ConfigSection* compare = config.find("compare");
  if (compare) {
    std::vector<std::pair<std::string, SpectralModel>> models;
    models.emplace_back(name, model);
    for (const auto& entry : compare->entries) {
      const auto values = entry.as_double_list();
      if (values.size() != 3)
        throw ConfigError(entry.line, 0,
                          "[compare] entries are name = [zpl_eV, "
                          "hbar_omega_meV, S]");
      SpectralModel other;
      other.zpl_eV = values[0];
      other.modes.push_back({values[1], values[2]});
      other.broadening_meV = model.broadening_meV;
      models.emplace_back(entry.key, other);
    }
    for (const auto& [tag, aligned] : compare_defect_sidebands(models, step))
      write_file(output_dir, "aligned_" + tag + ".csv",
                 spectrum_to_csv(aligned), report);
  }
}

void run_isotope(const RunConfig& config, const std::string& output_dir,
                 const std::string& base_dir, RunReport* report) {
  double step = 1.0;
  const SpectralModel model =
      load_spectral_model(config, base_dir, report, nullptr, &step);
  SectionReader isotope(config, "isotope", {"frequency_scale", "s_override"},
                        true, report);

  std::vector<double> scale = isotope.get_scalar_or_list("frequency_scale");
  if (scale.size() == 1 && model.modes.size() > 1)
    scale.assign(model.modes.size(), scale[0]);

  std::optional<std::vector<double>> override;
  if (isotope.has("s_override")) override = isotope.get_double_list("s_override");

  const SpectralModel rescaled = isotope_rescale(model, scale, override);
  if (rescaled.simple_scaling_approximation)
    report->warn_once(
        "isotope Huang-Rhys factors kept from the light-isotope model "
        "(simple-scaling approximation)");

  // common grid so the two curves overlay directly
  SpectrumGrid grid = SpectrumGrid::auto_for(model, step);
  const SpectrumGrid grid_iso = SpectrumGrid::auto_for(rescaled, step);
  grid.min_eV = std::min(grid.min_eV, grid_iso.min_eV);
  grid.max_eV = std::max(grid.max_eV, grid_iso.max_eV);
  write_file(output_dir, "spectrum_original.csv",
             spectrum_to_csv(franck_condon_spectrum(model, grid)), report);
  write_file(output_dir, "spectrum_isotope.csv",
             spectrum_to_csv(franck_condon_spectrum(rescaled, grid)), report);
  write_file(output_dir, "modes_isotope.csv", modes_to_csv(rescaled.modes),
             report);
}

void run_rates(const RunConfig& config, const std::string& output_dir,
               const std::string&, RunReport* report) {
  SectionReader rates(config,
                      "rates",
                      {"e_zpl_eV", "refractive_index", "oscillator_strength",
                       "dipole_moment_sq_C2m2", "levels_energy_meV",
                       "levels_degeneracy", "levels_brightness",
                       "temperatures_K", "gamma_nonrad_MHz", "lambda_z_GHz",
                       "isc_gap_eV", "isc_mode_hbar_omega_meV", "isc_mode_s",
                       "isc_broadening_meV", "from_model"},
                      true, report);

  RateInputs inputs;
  inputs.e_zpl_eV = rates.get_double("e_zpl_eV");
  inputs.refractive_index = rates.get_double("refractive_index", 2.5);
  if (rates.has("oscillator_strength"))
    inputs.oscillator_strength = rates.get_double("oscillator_strength");
  if (rates.has("dipole_moment_sq_C2m2"))
    inputs.dipole_moment_sq_C2m2 = rates.get_double("dipole_moment_sq_C2m2");
  inputs.validate();

  EmissionLevels levels;
  if (rates.get_bool("from_model", false)) {
    const ModelInput model = load_model(config, report);
    SectionReader solve(config, "solve",
                        {"k", "method", "degeneracy_tol_meV",
                         "convergence_n_max"},
                        false, report);
    const SolveOptions options = load_solve_options(solve);
    const VibronicHamiltonian h =
        build_total_hamiltonian(model.params, model.n_max);
    const auto states = solve_lowest(h, 6, options);

    // two-level population model: dark lowest group, bright first excited
    // group with brightness from its E' composition
    const int ground_group = states.front().degeneracy_group;
    const double ground_energy = states.front().energy_meV;
    EmissionLevel dark{0.0, 0, 0.0};
    EmissionLevel bright{0.0, 0, 0.0};
    for (const auto& state : states) {
      if (state.degeneracy_group == ground_group) {
        ++dark.degeneracy;
      } else if (state.degeneracy_group == ground_group + 1) {
        ++bright.degeneracy;
        bright.energy_meV = state.energy_meV - ground_energy;
        bright.brightness = std::min(1.0, state.w_E());
      }
    }
    if (bright.degeneracy == 0)
      throw std::runtime_error(
          "from_model needs at least two distinct polaron levels");
    levels.levels = {dark, bright};
    rates.echo_computed("levels_energy_meV",
                        "[0, " + format_g9(bright.energy_meV) + "]");
    rates.echo_computed("levels_brightness",
                        "[0, " + format_g9(bright.brightness) + "]");
  } else {
    const auto energies = rates.get_double_list("levels_energy_meV");
    const auto degeneracies = rates.get_double_list("levels_degeneracy");
    const auto brightness = rates.get_double_list("levels_brightness");
    if (energies.size() != degeneracies.size() ||
        energies.size() != brightness.size())
      throw ConfigError(0, 0,
                        "levels_energy_meV, levels_degeneracy and "
                        "levels_brightness must have equal lengths");
    for (std::size_t i = 0; i < energies.size(); ++i)
      levels.levels.push_back({energies[i],
                               static_cast<int>(degeneracies[i]),
                               brightness[i]});
  }
  levels.validate();

  const auto temperatures = rates.get_double_list("temperatures_K");
  const double gamma_nonrad =
      rates.get_double("gamma_nonrad_MHz", 509.0) * 1e6;

  std::string csv = "quantity,value,unit,temperature_K\n";
  for (double t : temperatures) {
    const double eta = thermal_brightness(levels, t);
    const RadiativeRate rate = radiative_rate(inputs, eta);
    const double qe = quantum_efficiency(rate.gamma_per_s, gamma_nonrad);
    csv += csv_line({"eta", format_g9(eta), "dimensionless", format_g9(t)});
    csv += csv_line({"gamma_rad", format_g9(rate.gamma_per_s), "1/s",
                     format_g9(t)});
    csv += csv_line({"tau_rad", format_g9(rate.tau_ns), "ns", format_g9(t)});
    csv += csv_line({"quantum_efficiency", format_g9(qe), "dimensionless",
                     format_g9(t)});
  }
  csv += csv_line({"gamma_nonrad", format_g9(gamma_nonrad), "1/s", ""});

  if (rates.has("lambda_z_GHz")) {
    const double lambda_z = rates.get_double("lambda_z_GHz");
    const double gap = rates.get_double("isc_gap_eV");
    SpectralModel overlap_model;
    overlap_model.zpl_eV = 0.0;
    overlap_model.modes.push_back({rates.get_double("isc_mode_hbar_omega_meV"),
                                   rates.get_double("isc_mode_s")});
    overlap_model.broadening_meV = rates.get_double("isc_broadening_meV", 10.0);
    const double overlap = fc_overlap_density_per_eV(overlap_model, gap);
    const double gamma_isc = isc_rate_per_s(lambda_z, overlap);
    csv += csv_line({"isc_overlap", format_g9(overlap), "1/eV", ""});
    csv += csv_line({"gamma_isc", format_g9(gamma_isc), "1/s", ""});
  }
  write_file(output_dir, "rates.csv", csv, report);
}

void run_zpl(const RunConfig& config, const std::string& output_dir,
             const std::string&, RunReport* report) {
  const ModelInput model = load_model(config, report);
  SectionReader zpl(config, "zpl",
                    {"e_excited_eV", "e_ground_eV", "polaron_ground_meV"},
                    true, report);

  ZplInputs inputs;
  inputs.e_excited_eV = zpl.get_double("e_excited_eV");
  inputs.e_ground_eV = zpl.get_double("e_ground_eV");
  inputs.lambda_meV = model.params.lambda_meV;
  inputs.delta_meV = model.params.delta_meV;
  inputs.hbar_omega_meV = model.params.hbar_omega_meV;
  if (zpl.has("polaron_ground_meV")) {
    inputs.polaron_ground_meV = zpl.get_double("polaron_ground_meV");
  } else {
    const VibronicHamiltonian h =
        build_total_hamiltonian(model.params, model.n_max);
    inputs.polaron_ground_meV = solve_lowest(h, 2).front().energy_meV;
    zpl.echo_computed("polaron_ground_meV",
                      format_g9(inputs.polaron_ground_meV));
  }

  const double e_zpl = zpl_energy_eV(inputs);
  zpl.echo_computed("e_zpl_eV", format_g9(e_zpl));

  std::string csv = "quantity,value,unit\n";
  csv += csv_line({"e_excited", format_g9(inputs.e_excited_eV), "eV"});
  csv += csv_line({"e_ground", format_g9(inputs.e_ground_eV), "eV"});
  csv += csv_line({"lambda", format_g9(inputs.lambda_meV), "meV"});
  csv += csv_line({"delta", format_g9(inputs.delta_meV), "meV"});
  csv += csv_line({"hbar_omega", format_g9(inputs.hbar_omega_meV), "meV"});
  csv += csv_line(
      {"polaron_ground", format_g9(inputs.polaron_ground_meV), "meV"});
  csv += csv_line({"e_zpl", format_g9(e_zpl), "eV"});
  write_file(output_dir, "zpl.csv", csv, report);
}

void run_thermo(const RunConfig& config, const std::string& output_dir,
                const std::string& base_dir, RunReport* report) {
  SectionReader thermo(config,
                       "thermo",
                       {"defects_csv", "e_vbm_eV", "e_pristine_eV", "gap_eV",
                        "fermi_points", "stable_window"},
                       true, report);
  const std::string defects_path =
      resolve_input(base_dir, thermo.get_string("defects_csv"));
  const double e_vbm = thermo.get_double("e_vbm_eV", 0.0);
  const double e_pristine = thermo.get_double("e_pristine_eV");
  const double gap = thermo.get_double("gap_eV", 6.0);
  const auto fermi_points = static_cast<int>(thermo.get_int("fermi_points", 601));
  if (fermi_points < 2 || gap <= 0.0)
    throw ConfigError(0, 0, "[thermo] needs gap_eV > 0 and fermi_points >= 2");

  const auto entries = defects_from_csv(read_file(defects_path));
  if (entries.empty()) {
    // header-only output for an empty defect list
    write_file(output_dir, "formation_empty.csv", "e_fermi_eV\n", report);
    return;
  }

  // group entries per defect, preserving first-appearance order
  std::vector<std::string> defect_order;
  std::map<std::string, std::vector<DefectEntry>> by_defect;
  for (const auto& entry : entries) {
    if (!by_defect.count(entry.name)) defect_order.push_back(entry.name);
    by_defect[entry.name].push_back(entry);
  }

  std::vector<double> fermi_grid;
  for (int i = 0; i < fermi_points; ++i)
    fermi_grid.push_back(gap * i / (fermi_points - 1));

  std::vector<std::pair<std::string, ChemicalPotentials>> conditions;
  for (const auto& section : config.sections) {
    if (section.name.rfind("thermo_", 0) != 0) continue;
    SectionReader cond(config, section.name,
                       {"mu_C_eV", "mu_B_eV", "mu_N_eV", "mu_BN_eV"}, true,
                       report);
    ChemicalPotentials pots;
    pots.condition = section.name.substr(7);
    pots.mu_C_eV = cond.get_double("mu_C_eV");
    pots.mu_B_eV = cond.get_double("mu_B_eV");
    pots.mu_N_eV = cond.get_double("mu_N_eV");
    if (cond.has("mu_BN_eV")) {
      const double mu_bn = cond.get_double("mu_BN_eV");
      if (std::abs(pots.mu_B_eV + pots.mu_N_eV - mu_bn) > 1e-9)
        throw ConfigError(section.line, 0,
                          "mu_B_eV + mu_N_eV must equal mu_BN_eV (1e-9 eV)");
    }
    pots.e_vbm_eV = e_vbm;
    pots.e_pristine_eV = e_pristine;
    pots.gap_eV = gap;
    conditions.emplace_back(pots.condition, pots);
  }
  if (conditions.empty())
    throw ConfigError(0, 0,
                      "at least one [thermo_<condition>] section with "
                      "chemical potentials is required");

  std::optional<std::pair<double, double>> window;
  if (thermo.has("stable_window")) {
    const auto values = thermo.get_double_list("stable_window");
    if (values.size() != 2)
      throw ConfigError(0, 0, "stable_window must be [lo_eV, hi_eV]");
    window = {values[0], values[1]};
  }

  for (const auto& [tag, pots] : conditions) {
    std::vector<FormationEnergyTable> tables;
    for (const auto& name : defect_order)
      tables.push_back(transition_levels(by_defect[name], pots));
    write_file(output_dir, "formation_" + tag + ".csv",
               diagram_to_csv(tables, fermi_grid), report);
    write_file(output_dir, "transitions_" + tag + ".csv",
               transitions_to_csv(tables), report);
    if (window) {
      for (const auto& table : tables) {
        const bool stable =
            stable_neutral_over(table, window->first, window->second);
        thermo.echo_computed(
            "stable_neutral." + tag + "." + table.defect,
            stable ? "yes" : "no");
      }
    }
  }
}

}  // namespace

RunReport run_subcommand(const std::string& name, const RunConfig& config,
                         const std::string& output_dir,
                         const std::string& base_dir) {
  RunReport report;
  report.subcommand = name;
  if (name == "solve")
    run_solve(config, output_dir, base_dir, &report);
  else if (name == "apes")
    run_apes(config, output_dir, base_dir, &report);
  else if (name == "fit")
    run_fit(config, output_dir, base_dir, &report);
  else if (name == "spectrum")
    run_spectrum(config, output_dir, base_dir, &report);
  else if (name == "isotope")
    run_isotope(config, output_dir, base_dir, &report);
  else if (name == "rates")
    run_rates(config, output_dir, base_dir, &report);
  else if (name == "zpl")
    run_zpl(config, output_dir, base_dir, &report);
  else if (name == "thermo")
    run_thermo(config, output_dir, base_dir, &report);
  else
    throw std::invalid_argument("unknown subcommand '" + name + "'");
  return report;
}

}  // namespace vibron
