#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "vibron/thermo.hpp"

using namespace vibron;

namespace {

ChemicalPotentials example_potentials() {
  ChemicalPotentials pots;
  pots.mu_C_eV = -9.2;
  pots.mu_B_eV = -6.7;
  pots.mu_N_eV = -8.3;
  pots.e_pristine_eV = -1002.0;
  pots.e_vbm_eV = 0.0;
  return pots;
}

DefectEntry make_entry(const std::string& name, int charge, double energy,
                       int n_c, int n_b, int n_n, double correction = 0.0) {
  return {name, charge, energy, n_c, n_b, n_n, correction};
}

}  // namespace

TEST_SUITE_BEGIN("thermo");

TEST_CASE("formation energy hand-computed oracle") {
  // E_f = -1000 + 1002 - 2(-9.2) + (-6.7) + (-8.3) = 5.4 eV
  const auto entry = make_entry("d", 0, -1000.0, 2, 1, 1);
  CHECK(formation_energy(entry, example_potentials(), 0.0) ==
        doctest::Approx(5.4).epsilon(1e-12));
  // neutral: independent of the Fermi level
  CHECK(formation_energy(entry, example_potentials(), 3.0) ==
        doctest::Approx(5.4).epsilon(1e-12));
}

TEST_CASE("slope in the Fermi level equals the charge") {
  const auto pots = example_potentials();
  for (int q : {-2, -1, 0, 1, 2}) {
    const auto entry = make_entry("d", q, -1000.0, 2, 1, 1, q == 0 ? 0.0 : 0.1);
    const double at0 = formation_energy(entry, pots, 0.0);
    const double at1 = formation_energy(entry, pots, 1.0);
    const double at3 = formation_energy(entry, pots, 3.0);
    CHECK(at1 - at0 == doctest::Approx(q).epsilon(1e-12));
    CHECK((at3 - at0) / 3.0 == doctest::Approx(q).epsilon(1e-12));
  }
}

TEST_CASE("gauge invariance under a common total-energy shift") {
  auto pots = example_potentials();
  auto entry = make_entry("d", 1, -1000.0, 2, 1, 1, 0.07);
  const double reference = formation_energy(entry, pots, 2.0);
  const double shift = 137.0;
  entry.total_energy_eV += shift;
  pots.e_pristine_eV += shift;
  CHECK(formation_energy(entry, pots, 2.0) ==
        doctest::Approx(reference).epsilon(1e-12));
}

TEST_CASE("constructed CTL(0/+) at 3.71 eV") {
  const auto pots = example_potentials();
  // place the +1 line 3.71 eV below the neutral line at the VBM
  const auto neutral = make_entry("cb", 0, -1000.0, 1, 1, 0);
  auto plus = make_entry("cb", 1, -1000.0 - 3.71, 1, 1, 0, 0.0);
  const auto table = transition_levels({neutral, plus}, pots);
  REQUIRE(table.transitions.size() == 1);
  CHECK(table.transitions[0].q_hi == 1);
  CHECK(table.transitions[0].q_lo == 0);
  CHECK(table.transitions[0].fermi_eV == doctest::Approx(3.71).epsilon(1e-12));

  // the CTL is exactly where the two lines intersect
  const double at_ctl_neutral = formation_energy(neutral, pots, 3.71);
  const double at_ctl_plus = formation_energy(plus, pots, 3.71);
  CHECK(std::abs(at_ctl_neutral - at_ctl_plus) < 1e-9);
}

TEST_CASE("stable-neutral verdict for a mid-gap-dominant neutral state") {
  const auto pots = example_potentials();
  const std::vector<DefectEntry> entries = {
      make_entry("6c", -1, -995.0, 6, 3, 3, 0.1),
      make_entry("6c", 0, -1000.0, 6, 3, 3),
      make_entry("6c", 1, -1001.0, 6, 3, 3, 0.1),
  };
  const auto table = transition_levels(entries, pots);
  // CTL(+/0) at 1.0+0.1; CTL(0/-) at 5.0+0.1
  CHECK(stable_neutral_over(table, 1.2, 5.0));
  CHECK(!stable_neutral_over(table, 0.0, 5.0));
  CHECK(table.stable_charge(0.5) == 1);
  CHECK(table.stable_charge(3.0) == 0);
  CHECK(table.stable_charge(5.9) == -1);
}

TEST_CASE("CTLs are invariant under permuting the entry order") {
  const auto pots = example_potentials();
  std::vector<DefectEntry> entries = {
      make_entry("d", 1, -1003.0, 2, 1, 1, 0.05),
      make_entry("d", -1, -996.0, 2, 1, 1, 0.08),
      make_entry("d", 0, -1000.0, 2, 1, 1),
  };
  const auto a = transition_levels(entries, pots);
  std::rotate(entries.begin(), entries.begin() + 1, entries.end());
  const auto b = transition_levels(entries, pots);
  REQUIRE(a.transitions.size() == b.transitions.size());
  for (std::size_t i = 0; i < a.transitions.size(); ++i) {
    CHECK(a.transitions[i].q_hi == b.transitions[i].q_hi);
    CHECK(a.transitions[i].fermi_eV ==
          doctest::Approx(b.transitions[i].fermi_eV).epsilon(1e-12));
  }
}

TEST_CASE("envelope is the pointwise minimum and is concave in slope") {
  const auto pots = example_potentials();
  const std::vector<DefectEntry> entries = {
      make_entry("d", 1, -1003.0, 2, 1, 1, 0.05),
      make_entry("d", 0, -1000.0, 2, 1, 1),
      make_entry("d", -1, -996.0, 2, 1, 1, 0.08),
  };
  const auto table = transition_levels(entries, pots);
  double previous_slope = 2.0;
  for (double fermi = 0.05; fermi < 6.0; fermi += 0.05) {
    double manual = 1e300;
    for (const auto& entry : entries)
      manual = std::min(manual, formation_energy(entry, pots, fermi));
    CHECK(table.envelope(fermi) == doctest::Approx(manual).epsilon(1e-12));
    const double slope =
        (table.envelope(fermi) - table.envelope(fermi - 0.05)) / 0.05;
    CHECK(slope <= previous_slope + 1e-9);
    previous_slope = slope;
  }
}

TEST_CASE("error paths") {
  const auto pots = example_potentials();
  SUBCASE("fewer than two charge states") {
    CHECK_THROWS_AS(
        transition_levels({make_entry("d", 0, -1000.0, 1, 1, 0)}, pots),
        std::invalid_argument);
  }
  SUBCASE("duplicate charge states") {
    CHECK_THROWS_AS(
        transition_levels({make_entry("d", 0, -1000.0, 1, 1, 0),
                           make_entry("d", 0, -1001.0, 1, 1, 0)},
                          pots),
        std::invalid_argument);
  }
  SUBCASE("nonzero correction on the neutral state") {
    auto entry = make_entry("d", 0, -1000.0, 1, 1, 0, 0.1);
    CHECK_THROWS_AS(entry.validate(), std::invalid_argument);
  }
  SUBCASE("negative counts") {
    auto entry = make_entry("d", 0, -1000.0, -1, 1, 0);
    CHECK_THROWS_AS(entry.validate(), std::invalid_argument);
  }
}

TEST_CASE("diagram CSV layout") {
  const auto pots = example_potentials();
  const auto table = transition_levels({make_entry("d", 0, -1000.0, 2, 1, 1),
                                        make_entry("d", 1, -1002.0, 2, 1, 1, 0.1)},
                                       pots);
  const std::string csv = diagram_to_csv({table}, {0.0, 1.0, 2.0});
  CHECK(csv.rfind("e_fermi_eV,d[q=0],d[q=+1],d[env]\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  const std::string empty = diagram_to_csv({}, {0.0, 1.0});
  CHECK(empty.rfind("e_fermi_eV\n", 0) == 0);
}

TEST_CASE("defect CSV parsing") {
  const std::string text =
      "defect,charge,total_energy_eV,n_C,n_B,n_N,correction_eV\n"
      "6C,0,-1898.43,6,3,3,0.0\n"
      "6C,1,-1899.75,6,3,3,0.12\n";
  const auto entries = defects_from_csv(text);
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].name == "6C");
  CHECK(entries[1].charge == 1);
  CHECK(entries[1].correction_eV == doctest::Approx(0.12));
  CHECK_THROWS(defects_from_csv("defect,charge\nbad,0\n"));
}

TEST_SUITE_END();
