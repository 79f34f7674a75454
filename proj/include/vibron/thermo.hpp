#pragma once

#include <string>
#include <vector>

namespace vibron {

// One defect charge state: totals and substitution counts entering the
// formation-energy expression. Counts are carbons added and B/N removed.
struct DefectEntry {
  std::string name;
  int charge = 0;
  double total_energy_eV = 0.0;
  int n_C = 0;
  int n_B = 0;
  int n_N = 0;
  double correction_eV = 0.0;  // charged-cell correction; 0 for q = 0

  void validate() const;
};

struct ChemicalPotentials {
  double mu_C_eV = 0.0;
  double mu_B_eV = 0.0;
  double mu_N_eV = 0.0;
  std::string condition = "custom";  // N-rich | N-poor | custom
  double e_vbm_eV = 0.0;             // VBM of the pristine cell
  double e_pristine_eV = 0.0;        // total energy of the pristine cell
  double gap_eV = 6.0;               // plot range for the Fermi axis
};

// E_f = E_d^q - E_p - n_C mu_C + n_B mu_B + n_N mu_N
//       + q (eps_VBM + eps_Fermi) + E_corr(q)
double formation_energy(const DefectEntry& entry,
                        const ChemicalPotentials& potentials,
                        double e_fermi_eV);

// Fermi level (above the VBM) at which charge states q_hi > q_lo swap
// stability.
struct TransitionLevel {
  int q_hi = 0;
  int q_lo = 0;
  double fermi_eV = 0.0;
};

struct FormationEnergyTable {
  std::string defect;
  std::vector<DefectEntry> entries;            // ascending charge
  std::vector<TransitionLevel> transitions;    // adjacent pairs, descending q
  ChemicalPotentials potentials;

  double envelope(double e_fermi_eV) const;    // min over charge states
  int stable_charge(double e_fermi_eV) const;
};

// CTLs between adjacent charge states of one defect plus the stability
// envelope. Throws on fewer than two states or duplicate charges.
FormationEnergyTable transition_levels(const std::vector<DefectEntry>& entries,
                                       const ChemicalPotentials& potentials);

// True when q = 0 is the envelope over the whole window.
bool stable_neutral_over(const FormationEnergyTable& table, double fermi_lo_eV,
                         double fermi_hi_eV, double margin_eV = 0.0);

// Wide CSV: e_fermi_eV, then one column per (defect, charge) and one
// envelope column per defect.
std::string diagram_to_csv(const std::vector<FormationEnergyTable>& tables,
                           const std::vector<double>& fermi_grid_eV);

std::string transitions_to_csv(const std::vector<FormationEnergyTable>& tables);

// Input CSV: defect,charge,total_energy_eV,n_C,n_B,n_N,correction_eV
std::vector<DefectEntry> defects_from_csv(const std::string& text);

}  // namespace vibron
