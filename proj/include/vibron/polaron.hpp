#pragma once

#include <string>
#include <vector>

#include "vibron/model.hpp"

namespace vibron {

// One eigenstate of the coupled electron-phonon Hamiltonian with its
// electronic-symmetry composition (weights on A1', A2', Ex', Ey' summing
// to 1) and its degeneracy grouping.
struct PolaronState {
  double energy_meV = 0.0;
  double w_A1 = 0.0;
  double w_A2 = 0.0;
  double w_Ex = 0.0;
  double w_Ey = 0.0;
  std::string label = "unassigned";
  int degeneracy_group = -1;

  double w_E() const { return w_Ex + w_Ey; }
};

enum class SolverMethod { Auto, Dense, Lanczos };

struct SolveOptions {
  SolverMethod method = SolverMethod::Auto;
  double residual_tolerance = 1e-10;  // relative to an upper bound on |H|
  int max_subspace = 420;             // Lanczos vectors before a restart
  int max_restarts = 60;
  int block_size = 4;
  double degeneracy_tol_meV = 0.01;
  std::int64_t dense_fallback_dim = 5000;
};

struct EigenPairs {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

// k lowest eigenpairs with per-pair residual ||Hv - Ev|| below
// tolerance * (Gershgorin bound on |H|). Auto picks a dense solve for small
// problems and restarted block Lanczos otherwise, falling back to dense
// (dim <= dense_fallback_dim) if the iteration stalls.
// Throws std::invalid_argument for k out of range and std::runtime_error
// when no path converges.
EigenPairs solve_eigenpairs(const VibronicHamiltonian& hamiltonian, int k,
                            const SolveOptions& options = {});

// Same, wrapped into classified PolaronStates.
std::vector<PolaronState> solve_lowest(const VibronicHamiltonian& hamiltonian,
                                       int k, const SolveOptions& options = {});

// Assigns degeneracy groups (consecutive states within tolerance) and
// symmetry labels. Group composition uses the member mean, which is
// invariant under rotations inside a degenerate subspace.
void classify(std::vector<PolaronState>& states,
              double degeneracy_tol_meV = 0.01);

struct ConvergenceReport {
  std::vector<int> n_max_values;
  std::vector<std::vector<double>> eigenvalues_meV;  // per cutoff, k lowest
  std::vector<double> last_drift_meV;                // per level, last two cutoffs
};

// Eigenvalues of the k lowest states at each cutoff in ascending n_max order.
ConvergenceReport convergence_sweep(const VibronicParameterSet& params,
                                    const std::vector<int>& n_max_values,
                                    int k, const SolveOptions& options = {});

// States table as CSV:
// energy_meV,w_A1,w_A2,w_Ex,w_Ey,label,group
std::string states_to_csv(const std::vector<PolaronState>& states);

}  // namespace vibron
