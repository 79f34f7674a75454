#include "vibron/presets.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace vibron {

namespace {

// Kept byte-identical with the files under presets/ (guarded by a unit test).
constexpr const char* kCc2Singlet = R"(# Carbon-ring (6C) colour centre, singlet manifold, CC2-based parameters.
#
# The reported CC2 numbers are internally inconsistent: Lambda = -168.5 meV
# with Delta = -619.5 meV implies an A1'-E' gap of 788 meV, while the gap
# computed directly by CC2 is 178 meV. The low-lying vibronic structure
# depends on the gap, so delta_meV is set to give
# E(E') - E(A1') = -Delta - Lambda = 178 meV.
# No value is available for the effective E-mode quantum; 61 meV reproduces
# the reference 7.1 meV splitting between the two lowest vibronic levels.

[model]
spin = singlet
lambda_meV = -168.5
delta_meV = -9.5
e_jt1_meV = 187.0
e_jt2_meV = 0.46
hbar_omega_meV = 61.0
provenance = CC2 (gap-adjusted)
n_max = 40

[solve]
k = 6
method = auto
degeneracy_tol_meV = 0.01
convergence_n_max = [36, 40]

[apes]
x_min = -3.0
x_max = 3.0
points = 121
y = 0.0

[zpl]
# delta-SCF totals are not available; their difference is chosen to place
# the composite ZPL at the reference 4.21 eV.
e_excited_eV = 4.607010
e_ground_eV = 0.0
)";

constexpr const char* kCc2Triplet = R"(# Carbon-ring (6C) colour centre, triplet manifold, CC2-based parameters.
#
# The CC2 triplet Lambda is reported as +393 meV, which would place A2'
# lowest; the reported determinant ordering (xx/yy stabilized in the
# triplet manifold, i.e. E_d(xx) - E_d(xy) = Lambda < 0) implies the
# opposite sign, so the preset carries -393 meV. Delta as reported.
# No value is available for the effective E-mode quantum; 43 meV reproduces
# the reference 3.1 meV splitting between the two lowest vibronic levels.

[model]
spin = triplet
lambda_meV = -393.0
delta_meV = 7.0
e_jt1_meV = 239.0
e_jt2_meV = 0.14
hbar_omega_meV = 43.0
provenance = CC2 (sign-adjusted)
n_max = 40

[solve]
k = 6
method = auto
degeneracy_tol_meV = 0.01
convergence_n_max = [36, 40]

[apes]
x_min = -3.0
x_max = 3.0
points = 121
y = 0.0
)";

constexpr const char* kTddftSinglet = R"(# Carbon-ring (6C) colour centre, singlet manifold, TDDFT reference set.
#
# lambda_meV is the reported TDDFT value; delta_meV is set from the
# directly computed TDDFT A1'-E' gap of 223 meV (same construction as the
# CC2 preset). Labelled reference set; no vibronic observables attach to
# it. The effective-mode quantum mirrors the CC2 singlet preset.

[model]
spin = singlet
lambda_meV = -175.5
delta_meV = -47.5
e_jt1_meV = 187.0
e_jt2_meV = 0.46
hbar_omega_meV = 61.0
provenance = TDDFT (gap-adjusted)
n_max = 40

[solve]
k = 6
method = auto
degeneracy_tol_meV = 0.01
convergence_n_max = [36, 40]
)";

constexpr const char* kTddftTriplet = R"(# Carbon-ring (6C) colour centre, triplet manifold, TDDFT reference set.
#
# Reported magnitudes with the Lambda sign implied by the triplet
# determinant ordering (see the CC2 triplet preset). Labelled reference
# only. The effective-mode quantum mirrors the CC2 triplet preset.

[model]
spin = triplet
lambda_meV = -260.5
delta_meV = 74.5
e_jt1_meV = 239.0
e_jt2_meV = 0.14
hbar_omega_meV = 43.0
provenance = TDDFT (sign-adjusted)
n_max = 40

[solve]
k = 6
method = auto
degeneracy_tol_meV = 0.01
convergence_n_max = [36, 40]
)";

const std::array<std::pair<const char*, const char*>, 4> kPresets = {{
    {"cc2_singlet", kCc2Singlet},
    {"cc2_triplet", kCc2Triplet},
    {"tddft_singlet", kTddftSinglet},
    {"tddft_triplet", kTddftTriplet},
}};

}  // namespace

const std::string& preset_text(const std::string& name) {
  static const std::array<std::string, 4> cache = {
      kPresets[0].second, kPresets[1].second, kPresets[2].second,
      kPresets[3].second};
  for (std::size_t i = 0; i < kPresets.size(); ++i)
    if (name == kPresets[i].first) return cache[i];
  throw std::invalid_argument("unknown preset '" + name +
                              "' (available: cc2_singlet, cc2_triplet, "
                              "tddft_singlet, tddft_triplet)");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : kPresets) names.emplace_back(name);
  return names;
}

}  // namespace vibron
