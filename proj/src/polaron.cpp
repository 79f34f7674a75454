#include "vibron/polaron.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "vibron/format.hpp"

namespace vibron {

namespace {

// upper bound on the spectral radius, used to scale residual tolerances
double gershgorin_bound(const Eigen::SparseMatrix<double>& h) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(h.rows());
  for (int col = 0; col < h.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h, col); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  return std::max(row_sums.maxCoeff(), 1.0);
}

EigenPairs solve_dense(const Eigen::SparseMatrix<double>& h, int k) {
  Eigen::MatrixXd dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("dense eigensolver failed");
  return {solver.eigenvalues().head(k), solver.eigenvectors().leftCols(k)};
}

// Orthonormalize the columns of `block` against `basis` (twice) and among
// themselves; rank-deficient columns are replaced by seeded random vectors.
void orthonormalize_block(const Eigen::MatrixXd& basis, int basis_cols,
                          Eigen::MatrixXd& block, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto v = basis.leftCols(basis_cols);
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (basis_cols > 0) {
      block -= v * (v.transpose() * block);
      block -= v * (v.transpose() * block);
    }
    bool full_rank = true;
    for (int c = 0; c < block.cols(); ++c) {
      for (int p = 0; p < c; ++p)
        block.col(c) -= block.col(p) * block.col(p).dot(block.col(c));
      const double norm = block.col(c).norm();
      if (norm > 1e-8) {
        block.col(c) /= norm;
      } else {
        for (int r = 0; r < block.rows(); ++r) block(r, c) = gauss(rng);
        full_rank = false;
      }
    }
    if (full_rank) return;
  }
  throw std::runtime_error("failed to orthonormalize Lanczos block");
}

// Restarted block Lanczos (explicit Rayleigh-Ritz projection with full
// reorthogonalization and thick restarts).
EigenPairs solve_lanczos(const Eigen::SparseMatrix<double>& h, int k,
                         const SolveOptions& options) {
  const int n = static_cast<int>(h.rows());
  const int b = std::max(2, std::min(options.block_size, n));
  if (k + b > n)
    throw std::runtime_error(
        "Lanczos subspace cannot hold k + block vectors; use the dense solver");
  const int m_max =
      std::min(n, std::max(options.max_subspace, k + 4 * b));
  const double tol = options.residual_tolerance * gershgorin_bound(h);

  Eigen::MatrixXd v(n, m_max), hv(n, m_max);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m_max, m_max);
  std::mt19937_64 rng(0x76b2c5u);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd block(n, b);
  for (int c = 0; c < b; ++c)
    for (int r = 0; r < n; ++r) block(r, c) = gauss(rng);
  orthonormalize_block(v, 0, block, rng);

  int m = 0;
  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    while (m + b <= m_max) {
      v.middleCols(m, b) = block;
      hv.middleCols(m, b) = h * block;
      // extend the projected matrix T = V^T H V
      const Eigen::MatrixXd coupling =
          v.leftCols(m + b).transpose() * hv.middleCols(m, b);
      t.block(0, m, m + b, b) = coupling;
      t.block(m, 0, b, m + b) = coupling.transpose();
      m += b;

      if (m >= k + b) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(
            t.topLeftCorner(m, m));
        const Eigen::MatrixXd y = ritz.eigenvectors().leftCols(k);
        const Eigen::VectorXd theta = ritz.eigenvalues().head(k);
        const Eigen::MatrixXd residual = hv.leftCols(m) * y -
                                         (v.leftCols(m) * y) * theta.asDiagonal();
        if (residual.colwise().norm().maxCoeff() < tol)
          return {theta, v.leftCols(m) * y};
      }

      // Krylov expansion: residual of the newest block
      block = hv.middleCols(m - b, b);
      block -= v.leftCols(m) * (v.leftCols(m).transpose() * block);
      orthonormalize_block(v, m, block, rng);
    }

    // thick restart: keep the lowest Ritz vectors, continue from the
    // residual block of the lowest pairs
    const int keep = std::min(m - b, std::max(2 * k, k + 2 * b));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(t.topLeftCorner(m, m));
    const Eigen::MatrixXd y = ritz.eigenvectors().leftCols(keep);
    const Eigen::VectorXd theta = ritz.eigenvalues().head(keep);
    v.leftCols(keep) = v.leftCols(m) * y;
    hv.leftCols(keep) = hv.leftCols(m) * y;
    t.setZero();
    t.topLeftCorner(keep, keep) = theta.asDiagonal();
    m = keep;

    block = hv.leftCols(b) - v.leftCols(b) * theta.head(b).asDiagonal();
    orthonormalize_block(v, m, block, rng);
  }
  throw std::runtime_error("Lanczos eigensolver did not converge");
}

}  // namespace

EigenPairs solve_eigenpairs(const VibronicHamiltonian& hamiltonian, int k,
                            const SolveOptions& options) {
  const int dim = hamiltonian.dimension();
  if (k < 1 || k > dim)
    throw std::invalid_argument("requested eigenpair count k=" +
                                std::to_string(k) +
                                " outside [1, dim=" + std::to_string(dim) + "]");
  switch (options.method) {
    case SolverMethod::Dense:
      return solve_dense(hamiltonian.matrix, k);
    case SolverMethod::Lanczos:
      return solve_lanczos(hamiltonian.matrix, k, options);
    case SolverMethod::Auto:
      break;
  }
  if (dim <= 1200 || k > dim / 4) return solve_dense(hamiltonian.matrix, k);
  try {
    return solve_lanczos(hamiltonian.matrix, k, options);
  } catch (const std::runtime_error&) {
    if (dim <= options.dense_fallback_dim)
      return solve_dense(hamiltonian.matrix, k);
    throw;
  }
}

std::vector<PolaronState> solve_lowest(const VibronicHamiltonian& hamiltonian,
                                       int k, const SolveOptions& options) {
  const EigenPairs pairs = solve_eigenpairs(hamiltonian, k, options);
  const Eigen::Matrix4d& u = DeterminantBasis::symmetry_map();
  const int n_osc = hamiltonian.oscillator.dimension();

  std::vector<PolaronState> states(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    Eigen::Vector4d weights = Eigen::Vector4d::Zero();
    for (int o = 0; o < n_osc; ++o) {
      Eigen::Vector4d det_amp = pairs.vectors.col(j).segment<4>(4 * o);
      weights += (u * det_amp).cwiseAbs2();
    }
    weights /= weights.sum();
    auto& s = states[static_cast<std::size_t>(j)];
    s.energy_meV = pairs.values(j);
    s.w_A1 = weights(DeterminantBasis::A1);
    s.w_Ex = weights(DeterminantBasis::Ex);
    s.w_Ey = weights(DeterminantBasis::Ey);
    s.w_A2 = weights(DeterminantBasis::A2);
  }
  classify(states, options.degeneracy_tol_meV);
  return states;
}

void classify(std::vector<PolaronState>& states, double degeneracy_tol_meV) {
  std::sort(states.begin(), states.end(),
            [](const PolaronState& a, const PolaronState& b) {
              return a.energy_meV < b.energy_meV;
            });
  std::size_t i = 0;
  int group = 0;
  while (i < states.size()) {
    std::size_t j = i + 1;
    while (j < states.size() &&
           states[j].energy_meV - states[j - 1].energy_meV < degeneracy_tol_meV)
      ++j;
    const std::size_t size = j - i;

    double a1 = 0, a2 = 0, ex = 0, ey = 0;
    for (std::size_t s = i; s < j; ++s) {
      a1 += states[s].w_A1;
      a2 += states[s].w_A2;
      ex += states[s].w_Ex;
      ey += states[s].w_Ey;
    }
    a1 /= size; a2 /= size; ex /= size; ey /= size;

    std::string label = "mixed";
    if (size == 1 && a1 > 0.5) {
      label = "A1";
    } else if (size == 1 && a2 > 0.9) {
      label = "A2";
    } else if (size == 2 && ex + ey > a2 && ex + ey > 0.2) {
      // a true E doublet; in the strongly mixed regime its E' weight sits
      // below 0.5 even though the pair transforms as E (assignment is by
      // degeneracy, the weight threshold only guards accidental pairs)
      label = "E";
    }

    for (std::size_t s = i; s < j; ++s) {
      states[s].degeneracy_group = group;
      states[s].label = label;
      // member weights are solver-arbitrary inside a degenerate subspace;
      // report the invariant group mean
      states[s].w_A1 = a1;
      states[s].w_A2 = a2;
      states[s].w_Ex = ex;
      states[s].w_Ey = ey;
    }
    ++group;
    i = j;
  }
}

ConvergenceReport convergence_sweep(const VibronicParameterSet& params,
                                    const std::vector<int>& n_max_values,
                                    int k, const SolveOptions& options) {
  if (n_max_values.empty() ||
      !std::is_sorted(n_max_values.begin(), n_max_values.end()))
    throw std::invalid_argument("n_max list must be non-empty and ascending");

  ConvergenceReport report;
  report.n_max_values = n_max_values;
  for (int n_max : n_max_values) {
    const VibronicHamiltonian h = build_total_hamiltonian(params, n_max);
    const auto states = solve_lowest(h, k, options);
    std::vector<double> evals;
    evals.reserve(states.size());
    for (const auto& s : states) evals.push_back(s.energy_meV);
    report.eigenvalues_meV.push_back(std::move(evals));
  }
  if (report.eigenvalues_meV.size() >= 2) {
    const auto& last = report.eigenvalues_meV.back();
    const auto& prev = report.eigenvalues_meV[report.eigenvalues_meV.size() - 2];
    for (int level = 0; level < k; ++level)
      report.last_drift_meV.push_back(
          std::abs(last[static_cast<std::size_t>(level)] -
                   prev[static_cast<std::size_t>(level)]));
  }
  return report;
}

std::string states_to_csv(const std::vector<PolaronState>& states) {
  std::string out = "energy_meV,w_A1,w_A2,w_Ex,w_Ey,label,group\n";
  for (const auto& s : states)
    out += csv_line({format_g9(s.energy_meV), format_g9(s.w_A1),
                     format_g9(s.w_A2), format_g9(s.w_Ex), format_g9(s.w_Ey),
                     s.label, std::to_string(s.degeneracy_group)});
  return out;
}

}  // namespace vibron
