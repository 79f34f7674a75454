#pragma once

#include <array>
#include <string>
#include <vector>

#include "vibron/config.hpp"

namespace vibron {

// Outcome of one subcommand run: the resolved parameters with provenance,
// the files written, and any approximation warnings.
struct RunReport {
  std::string subcommand;
  std::vector<std::array<std::string, 3>> resolved;  // key, value, provenance
  std::vector<std::string> files;
  std::vector<std::string> warnings;

  std::string text() const;
  void warn_once(const std::string& message);
};

const std::vector<std::string>& subcommand_names();

// Dispatches one subcommand (solve, apes, fit, spectrum, isotope, rates,
// zpl, thermo). Validates the config sections the subcommand consumes
// (unknown keys are rejected with their line numbers), writes deterministic
// CSV outputs into output_dir, and returns the report.
// Relative input-file paths inside the config resolve against base_dir.
RunReport run_subcommand(const std::string& name, const RunConfig& config,
                         const std::string& output_dir,
                         const std::string& base_dir = ".");

}  // namespace vibron
