#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vibron {

enum class SpinManifold { Singlet, Triplet };

std::string to_string(SpinManifold spin);
SpinManifold spin_from_string(const std::string& tag);

// Physical constants of one spin manifold of the product-Jahn-Teller model.
// All energies in meV; f_o/f_u are linear couplings per unit dimensionless
// displacement.
struct VibronicParameterSet {
  SpinManifold spin = SpinManifold::Singlet;
  double lambda_meV = 0.0;
  double delta_meV = 0.0;
  double f_o_meV = 0.0;
  double f_u_meV = 0.0;
  double hbar_omega_meV = 180.3;
  std::string provenance = "user";

  // throws std::invalid_argument when hbar_omega <= 0 or a value is non-finite
  void validate() const;
};

// The four two-electron determinants |e''_o{x,y} e''_u{x,y}>, ordered
// xx, xy, yx, yy, together with the fixed orthogonal map onto the
// symmetry-adapted states A1', Ex', Ey', A2'. The map is hard data taken
// from the defect's state list, not computed group theory.
struct DeterminantBasis {
  static constexpr int kDim = 4;
  enum Determinant { XX = 0, XY = 1, YX = 2, YY = 3 };
  enum Channel { A1 = 0, Ex = 1, Ey = 2, A2 = 3 };

  static const std::array<std::string, 4>& determinant_labels();
  static const std::array<std::string, 4>& channel_labels();

  // rows: symmetry channels (A1, Ex, Ey, A2); columns: determinants
  static const Eigen::Matrix4d& symmetry_map();
};

// Two-dimensional harmonic oscillator states |n, m> truncated to a total
// number of quanta n + m <= n_max.
class OscillatorBasis {
 public:
  explicit OscillatorBasis(int n_max);

  int n_max() const { return n_max_; }
  int dimension() const { return static_cast<int>(states_.size()); }

  // flat index <-> (n, m); index() returns -1 when outside the cutoff
  int index(int n, int m) const;
  std::pair<int, int> quanta(int index) const { return states_[index]; }
  const std::vector<std::pair<int, int>>& states() const { return states_; }

 private:
  int n_max_;
  std::vector<std::pair<int, int>> states_;
};

// Sparse symmetric pJT Hamiltonian over the 4-determinant x oscillator
// product basis. Flat layout: 4 * oscillator_index + determinant_index.
struct VibronicHamiltonian {
  Eigen::SparseMatrix<double> matrix;  // meV, both triangles stored
  OscillatorBasis oscillator;
  VibronicParameterSet params;

  int dimension() const { return static_cast<int>(matrix.rows()); }
  static int flat_index(int oscillator_index, int determinant_index) {
    return 4 * oscillator_index + determinant_index;
  }
};

// One point of a classical adiabatic-potential-energy-surface slice.
struct ApesSample {
  double x = 0.0;
  double y = 0.0;
  std::array<double, 4> branch_energies{};  // meV, ascending
  // per branch: weights on (A1, Ex, Ey, A2); degenerate groups carry the
  // rotation-invariant group mean
  std::array<std::array<double, 4>, 4> branch_compositions{};
};

// Electronic Hamiltonian W = U^T diag(L, -D, -D, -L) U expressed in the
// determinant basis. Eigenvalues are exactly {L, -L, -D, -D}.
Eigen::Matrix4d build_electronic_w(const VibronicParameterSet& params);

// 4x4 linear vibronic coupling block at a fixed classical displacement:
//   [  x(Fo+Fu)   y Fo        y Fu        0         ]
//   [  y Fo      -x(Fo-Fu)    0           y Fu      ]
//   [  y Fu       0           x(Fo-Fu)    y Fo      ]
//   [  0          y Fu        y Fo       -x(Fo+Fu)  ]
Eigen::Matrix4d classical_jt_matrix(const VibronicParameterSet& params,
                                    double x, double y);

// Dimensionless position operator x = (a + a^dagger)/sqrt(2) on one mode of
// the truncated oscillator basis; mode 0 acts on n, mode 1 on m.
Eigen::SparseMatrix<double> position_operator(const OscillatorBasis& basis,
                                              int mode);

// JT coupling over the product basis, assembled from the electronic
// coefficient blocks and the two supplied position operators.
Eigen::SparseMatrix<double> build_pjt_coupling(
    const VibronicParameterSet& params, const OscillatorBasis& basis,
    const Eigen::SparseMatrix<double>& x_op,
    const Eigen::SparseMatrix<double>& y_op);

// H = hbar*omega (n + m + 1) x I4 + I_osc x W + H_JT.
// Throws std::invalid_argument when the dimension 4*(n_max+1)(n_max+2)/2
// exceeds max_dimension.
VibronicHamiltonian build_total_hamiltonian(const VibronicParameterSet& params,
                                            int n_max,
                                            std::int64_t max_dimension = 1000000);

// Classical APES point: eigen-decomposition of
// (hbar*omega (x^2+y^2)/2) I4 + W + JT(x, y), branches ascending with
// stable tie-breaking by symmetry-channel order (A1, Ex, Ey, A2).
ApesSample apes_point(const VibronicParameterSet& params, double x, double y);

std::vector<ApesSample> apes_slice(const VibronicParameterSet& params,
                                   const std::vector<double>& x_values,
                                   double y = 0.0);

// Inversion of the Jahn-Teller-energy relations
//   E1 = (Fo+Fu)^2 / (2 hw),  E2 = (Fo-Fu)^2 / (2 hw)
// returning the Fo >= Fu >= 0 solution. Throws on negative inputs.
std::pair<double, double> couplings_from_jt_energies(double e_jt1_meV,
                                                     double e_jt2_meV,
                                                     double hbar_omega_meV);

// Forward map: (Fo, Fu, hw) -> (E1, E2).
std::pair<double, double> jt_energies_from_couplings(double f_o_meV,
                                                     double f_u_meV,
                                                     double hbar_omega_meV);

// --- least-squares APES fit ------------------------------------------------

// One sampled displacement with the lowest branch_energies.size() adiabatic
// branches in ascending order (1 to 4 branches, lowest always present).
struct ApesFitSample {
  double x = 0.0;
  std::vector<double> branch_energies;  // meV
};

struct ApesFitOptions {
  bool fit_lambda_delta = false;  // requires >= 2 branches in the samples
  int max_iterations = 200;
  double tolerance = 1e-12;  // on the relative step and gradient
};

struct ApesFitReport {
  VibronicParameterSet params;
  std::vector<double> residuals;  // model - sample, per (point, branch)
  double rel_stddev = 0.0;        // RMS(residual) / RMS(sample energy)
  int iterations = 0;
  bool converged = false;
};

// Damped (Levenberg-Marquardt) least squares of (Fo, Fu, hw) and optionally
// (Lambda, Delta) against apes_point branch energies at y = 0.
// Throws std::invalid_argument on a rank-deficient sample set (< 5 distinct
// x values, or x values not spanning both signs, or fewer residuals than
// parameters) and std::runtime_error on non-convergence.
ApesFitReport fit_apes(const std::vector<ApesFitSample>& samples,
                       const VibronicParameterSet& initial_guess,
                       const ApesFitOptions& options = {});

}  // namespace vibron
