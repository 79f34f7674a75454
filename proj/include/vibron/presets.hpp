#pragma once

#include <string>
#include <vector>

namespace vibron {

// Bundled parameter presets (cc2_singlet, cc2_triplet, tddft_singlet,
// tddft_triplet). Throws std::invalid_argument for unknown names.
const std::string& preset_text(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace vibron
