#include "vibron/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vibron/format.hpp"

namespace vibron {

namespace {
void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}
}  // namespace

void DefectEntry::validate() const {
  require(!name.empty(), "defect name must be non-empty");
  require(n_C >= 0 && n_B >= 0 && n_N >= 0,
          "substitution counts must be >= 0");
  require(std::isfinite(total_energy_eV) && std::isfinite(correction_eV),
          "energies must be finite");
  if (charge == 0)
    require(correction_eV == 0.0,
            "the neutral charge state carries no correction by convention");
}

double formation_energy(const DefectEntry& entry,
                        const ChemicalPotentials& potentials,
                        double e_fermi_eV) {
  entry.validate();
  return entry.total_energy_eV - potentials.e_pristine_eV -
         entry.n_C * potentials.mu_C_eV + entry.n_B * potentials.mu_B_eV +
         entry.n_N * potentials.mu_N_eV +
         entry.charge * (potentials.e_vbm_eV + e_fermi_eV) +
         entry.correction_eV;
}

double FormationEnergyTable::envelope(double e_fermi_eV) const {
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& entry : entries)
    lowest = std::min(lowest, formation_energy(entry, potentials, e_fermi_eV));
  return lowest;
}

int FormationEnergyTable::stable_charge(double e_fermi_eV) const {
  double lowest = std::numeric_limits<double>::infinity();
  int charge = 0;
  for (const auto& entry : entries) {
    const double ef = formation_energy(entry, potentials, e_fermi_eV);
    if (ef < lowest) {
      lowest = ef;
      charge = entry.charge;
    }
  }
  return charge;
}

FormationEnergyTable transition_levels(const std::vector<DefectEntry>& entries,
                                       const ChemicalPotentials& potentials) {
  require(entries.size() >= 2,
          "transition levels need at least two charge states");
  FormationEnergyTable table;
  table.defect = entries.front().name;
  table.entries = entries;
  table.potentials = potentials;

  for (const auto& entry : entries) {
    entry.validate();
    require(entry.name == table.defect,
            "all entries must belong to one defect");
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const DefectEntry& a, const DefectEntry& b) {
              return a.charge < b.charge;
            });
  for (std::size_t i = 1; i < table.entries.size(); ++i)
    require(table.entries[i].charge != table.entries[i - 1].charge,
            "duplicate charge state " +
                std::to_string(table.entries[i].charge) + " for defect " +
                table.defect);

  // CTL(q_hi/q_lo) from the zero-Fermi intercepts of the two lines
  for (std::size_t i = table.entries.size(); i-- > 1;) {
    const DefectEntry& hi = table.entries[i];
    const DefectEntry& lo = table.entries[i - 1];
    const double ef_hi = formation_energy(hi, potentials, 0.0);
    const double ef_lo = formation_energy(lo, potentials, 0.0);
    table.transitions.push_back(
        {hi.charge, lo.charge, (ef_lo - ef_hi) / (hi.charge - lo.charge)});
  }
  return table;
}

bool stable_neutral_over(const FormationEnergyTable& table, double fermi_lo_eV,
                         double fermi_hi_eV, double margin_eV) {
  require(fermi_hi_eV >= fermi_lo_eV, "window must be ordered");
  bool has_neutral = false;
  for (const auto& entry : table.entries)
    has_neutral = has_neutral || entry.charge == 0;
  if (!has_neutral) return false;

  // the envelope is piecewise linear, so checking the window ends and every
  // transition level inside it is exact
  std::vector<double> probes{fermi_lo_eV, fermi_hi_eV};
  for (const auto& t : table.transitions)
    if (t.fermi_eV > fermi_lo_eV && t.fermi_eV < fermi_hi_eV)
      probes.push_back(t.fermi_eV);
  for (double fermi : probes) {
    const DefectEntry* neutral = nullptr;
    for (const auto& entry : table.entries)
      if (entry.charge == 0) neutral = &entry;
    const double neutral_ef = formation_energy(*neutral, table.potentials, fermi);
    if (neutral_ef > table.envelope(fermi) + margin_eV + 1e-12) return false;
  }
  return true;
}

std::string diagram_to_csv(const std::vector<FormationEnergyTable>& tables,
                           const std::vector<double>& fermi_grid_eV) {
  require(!fermi_grid_eV.empty() &&
              std::is_sorted(fermi_grid_eV.begin(), fermi_grid_eV.end()),
          "Fermi grid must be non-empty and ascending");

  std::vector<std::string> header{"e_fermi_eV"};
  for (const auto& table : tables) {
    for (const auto& entry : table.entries) {
      std::string tag = table.defect + "[q=" +
                        (entry.charge > 0 ? "+" : "") +
                        std::to_string(entry.charge) + "]";
      header.push_back(std::move(tag));
    }
    header.push_back(table.defect + "[env]");
  }

  std::string out = csv_line(header);
  for (double fermi : fermi_grid_eV) {
    std::vector<std::string> row{format_g9(fermi)};
    for (const auto& table : tables) {
      for (const auto& entry : table.entries)
        row.push_back(
            format_g9(formation_energy(entry, table.potentials, fermi)));
      row.push_back(format_g9(table.envelope(fermi)));
    }
    out += csv_line(row);
  }
  return out;
}

std::string transitions_to_csv(const std::vector<FormationEnergyTable>& tables) {
  std::string out = "defect,q_hi,q_lo,fermi_eV\n";
  for (const auto& table : tables)
    for (const auto& t : table.transitions)
      out += csv_line({table.defect, std::to_string(t.q_hi),
                       std::to_string(t.q_lo), format_g9(t.fermi_eV)});
  return out;
}

std::vector<DefectEntry> defects_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<DefectEntry> entries;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("defect,", 0) == 0) continue;  // header

    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    require(cells.size() == 7,
            "defect CSV line " + std::to_string(line_no) +
                ": expected 7 columns "
                "(defect,charge,total_energy_eV,n_C,n_B,n_N,correction_eV)");
    DefectEntry entry;
    entry.name = cells[0];
    entry.charge = std::stoi(cells[1]);
    entry.total_energy_eV = std::stod(cells[2]);
    entry.n_C = std::stoi(cells[3]);
    entry.n_B = std::stoi(cells[4]);
    entry.n_N = std::stoi(cells[5]);
    entry.correction_eV = std::stod(cells[6]);
    entry.validate();
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace vibron
