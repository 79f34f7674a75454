#include <CLI11.hpp>
#include <map>
#include <filesystem>
#include <iostream>

#include "vibron/cli.hpp"
#include "vibron/config.hpp"
#include "vibron/presets.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::string output_dir = "out";
  std::vector<std::string> overrides;
};

int run(const std::string& subcommand, const Options& options) {
  vibron::RunConfig config;
  std::string base_dir = ".";
  if (!options.preset.empty()) {
    config = vibron::parse_config(vibron::preset_text(options.preset));
  } else if (!options.config_path.empty()) {
    config = vibron::load_config_file(options.config_path);
    base_dir = std::filesystem::path(options.config_path)
                   .parent_path()
                   .string();
    if (base_dir.empty()) base_dir = ".";
  } else {
    std::cerr << "error: one of --config or --preset is required\n";
    return 2;
  }

  for (const auto& override_kv : options.overrides) {
    const auto eq = override_kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects section.key=value, got '"
                << override_kv << "'\n";
      return 2;
    }
    config.set(override_kv.substr(0, eq), override_kv.substr(eq + 1));
  }

  const vibron::RunReport report =
      vibron::run_subcommand(subcommand, config, options.output_dir, base_dir);
  std::cout << report.text();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vibronic-spectroscopy engine for the 6C colour centre in hBN"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> descriptions = {
      {"solve",
       "lowest polaron levels and convergence footer; needs [model] "
       "(spin, lambda_meV, delta_meV, hbar_omega_meV, n_max, couplings as "
       "f_o_meV/f_u_meV or e_jt1_meV/e_jt2_meV), optional [solve]"},
      {"apes",
       "classical adiabatic-surface slice; needs [model] and [apes] "
       "(x_min/x_max/points or x_values, optional y)"},
      {"fit",
       "least-squares surface fit; needs [model] as the initial guess and "
       "[fit] (samples_csv, optional fit_lambda_delta, max_iterations)"},
      {"spectrum",
       "Franck-Condon sideband; needs [spectrum] (zpl_eV plus "
       "mode_hbar_omega_meV/mode_s or modes_csv), optional [compare]"},
      {"isotope",
       "isotope-rescaled sideband; needs [spectrum] and [isotope] "
       "(frequency_scale, optional s_override)"},
      {"rates",
       "thermal brightness, radiative/ISC rates, quantum efficiency; needs "
       "[rates] (e_zpl_eV, dipole or oscillator strength, level lists or "
       "from_model, temperatures_K)"},
      {"zpl",
       "zero-phonon-line composition; needs [model] and [zpl] "
       "(e_excited_eV, e_ground_eV, optional polaron_ground_meV)"},
      {"thermo",
       "formation-energy diagrams and transition levels; needs [thermo] "
       "(defects_csv, e_pristine_eV, ...) and one [thermo_<condition>] "
       "section per chemical-potential set"},
  };

  Options options;
  std::string chosen;
  for (const auto& name : vibron::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", options.config_path, "run configuration file");
    sub->add_option("--preset", options.preset,
                    "bundled parameter preset (cc2_singlet, cc2_triplet, "
                    "tddft_singlet, tddft_triplet)");
    sub->add_option("--out", options.output_dir, "output directory");
    sub->add_option("--set", options.overrides,
                    "override a key, section.key=value (last wins)");
    sub->callback([&chosen, name] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  }

  try {
    return run(chosen, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << chosen << ": " << e.what() << "\n";
    return 1;
  }
}
