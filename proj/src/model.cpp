#include "vibron/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace vibron {

namespace {
constexpr double kSqrtHalf = 0.70710678118654752440;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}
}  // namespace

std::string to_string(SpinManifold spin) {
  return spin == SpinManifold::Singlet ? "singlet" : "triplet";
}

SpinManifold spin_from_string(const std::string& tag) {
  if (tag == "singlet") return SpinManifold::Singlet;
  if (tag == "triplet") return SpinManifold::Triplet;
  throw std::invalid_argument("unknown spin manifold '" + tag +
                              "' (expected singlet or triplet)");
}

void VibronicParameterSet::validate() const {
  require(std::isfinite(lambda_meV) && std::isfinite(delta_meV),
          "lambda_meV/delta_meV must be finite");
  require(std::isfinite(f_o_meV) && std::isfinite(f_u_meV),
          "f_o_meV/f_u_meV must be finite");
  require(std::isfinite(hbar_omega_meV) && hbar_omega_meV > 0.0,
          "hbar_omega_meV must be positive");
}

const std::array<std::string, 4>& DeterminantBasis::determinant_labels() {
  static const std::array<std::string, 4> labels = {"xx", "xy", "yx", "yy"};
  return labels;
}

const std::array<std::string, 4>& DeterminantBasis::channel_labels() {
  static const std::array<std::string, 4> labels = {"A1", "Ex", "Ey", "A2"};
  return labels;
}

const Eigen::Matrix4d& DeterminantBasis::symmetry_map() {
  static const Eigen::Matrix4d u = [] {
    Eigen::Matrix4d m;
    // A1  = (xx + yy)/sqrt(2)
    // Ex  = (xx - yy)/sqrt(2)
    // Ey  = (xy + yx)/sqrt(2)
    // A2  = (xy - yx)/sqrt(2)
    m << kSqrtHalf, 0, 0, kSqrtHalf,
         kSqrtHalf, 0, 0, -kSqrtHalf,
         0, kSqrtHalf, kSqrtHalf, 0,
         0, kSqrtHalf, -kSqrtHalf, 0;
    return m;
  }();
  return u;
}

OscillatorBasis::OscillatorBasis(int n_max) : n_max_(n_max) {
  require(n_max >= 0, "oscillator cutoff n_max must be >= 0");
  states_.reserve(static_cast<std::size_t>(n_max + 1) * (n_max + 2) / 2);
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m + n <= n_max; ++m) states_.emplace_back(n, m);
}

int OscillatorBasis::index(int n, int m) const {
  if (n < 0 || m < 0 || n + m > n_max_) return -1;
  // states with first quantum < n occupy sum_{j<n} (n_max+1-j) slots
  return n * (n_max_ + 1) - n * (n - 1) / 2 + m;
}

Eigen::Matrix4d build_electronic_w(const VibronicParameterSet& params) {
  params.validate();
  const Eigen::Matrix4d& u = DeterminantBasis::symmetry_map();
  Eigen::Vector4d diag(params.lambda_meV, -params.delta_meV,
                       -params.delta_meV, -params.lambda_meV);
  return u.transpose() * diag.asDiagonal() * u;
}

Eigen::Matrix4d classical_jt_matrix(const VibronicParameterSet& params,
                                    double x, double y) {
  const double fo = params.f_o_meV;
  const double fu = params.f_u_meV;
  Eigen::Matrix4d j;
  j << x * (fo + fu), y * fo, y * fu, 0,
       y * fo, -x * (fo - fu), 0, y * fu,
       y * fu, 0, x * (fo - fu), y * fo,
       0, y * fu, y * fo, -x * (fo + fu);
  return j;
}

Eigen::SparseMatrix<double> position_operator(const OscillatorBasis& basis,
                                              int mode) {
  require(mode == 0 || mode == 1, "oscillator mode must be 0 or 1");
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < basis.dimension(); ++i) {
    auto [n, m] = basis.quanta(i);
    const int raised =
        mode == 0 ? basis.index(n + 1, m) : basis.index(n, m + 1);
    if (raised < 0) continue;
    const double amp = std::sqrt((mode == 0 ? n : m) + 1.0) * kSqrtHalf;
    entries.emplace_back(raised, i, amp);
    entries.emplace_back(i, raised, amp);
  }
  Eigen::SparseMatrix<double> op(basis.dimension(), basis.dimension());
  op.setFromTriplets(entries.begin(), entries.end());
  return op;
}

Eigen::SparseMatrix<double> build_pjt_coupling(
    const VibronicParameterSet& params, const OscillatorBasis& basis,
    const Eigen::SparseMatrix<double>& x_op,
    const Eigen::SparseMatrix<double>& y_op) {
  params.validate();
  // electronic coefficient blocks of the x and y displacements
  const Eigen::Matrix4d cx = classical_jt_matrix(params, 1.0, 0.0);
  const Eigen::Matrix4d cy = classical_jt_matrix(params, 0.0, 1.0);

  const int dim = 4 * basis.dimension();
  std::vector<Eigen::Triplet<double>> entries;
  auto accumulate = [&](const Eigen::SparseMatrix<double>& op,
                        const Eigen::Matrix4d& block) {
    for (int col = 0; col < op.outerSize(); ++col) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(op, col); it; ++it) {
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
            if (block(a, b) != 0.0)
              entries.emplace_back(
                  VibronicHamiltonian::flat_index(static_cast<int>(it.row()), a),
                  VibronicHamiltonian::flat_index(col, b),
                  it.value() * block(a, b));
      }
    }
  };
  accumulate(x_op, cx);
  accumulate(y_op, cy);

  Eigen::SparseMatrix<double> jt(dim, dim);
  jt.setFromTriplets(entries.begin(), entries.end());
  return jt;
}

VibronicHamiltonian build_total_hamiltonian(const VibronicParameterSet& params,
                                            int n_max,
                                            std::int64_t max_dimension) {
  params.validate();
  require(n_max >= 0, "n_max must be >= 0");
  const std::int64_t dim =
      4ll * (n_max + 1) * (n_max + 2) / 2;
  if (dim > max_dimension)
    throw std::invalid_argument(
        "oscillator cutoff n_max=" + std::to_string(n_max) +
        " gives dimension " + std::to_string(dim) +
        " which exceeds the configured maximum " +
        std::to_string(max_dimension));

  OscillatorBasis basis(n_max);
  const Eigen::Matrix4d w = build_electronic_w(params);

  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < basis.dimension(); ++i) {
    auto [n, m] = basis.quanta(i);
    const double vib = params.hbar_omega_meV * (n + m + 1);
    for (int a = 0; a < 4; ++a) {
      entries.emplace_back(VibronicHamiltonian::flat_index(i, a),
                           VibronicHamiltonian::flat_index(i, a), vib);
      for (int b = 0; b < 4; ++b)
        if (w(a, b) != 0.0)
          entries.emplace_back(VibronicHamiltonian::flat_index(i, a),
                               VibronicHamiltonian::flat_index(i, b), w(a, b));
    }
  }
  Eigen::SparseMatrix<double> h(static_cast<int>(dim), static_cast<int>(dim));
  h.setFromTriplets(entries.begin(), entries.end());

  h += build_pjt_coupling(params, basis, position_operator(basis, 0),
                          position_operator(basis, 1));
  return VibronicHamiltonian{std::move(h), std::move(basis), params};
}

ApesSample apes_point(const VibronicParameterSet& params, double x, double y) {
  params.validate();
  require(std::isfinite(x) && std::isfinite(y), "sample point must be finite");
  Eigen::Matrix4d m = build_electronic_w(params) +
                      classical_jt_matrix(params, x, y);
  const double vib = 0.5 * params.hbar_omega_meV * (x * x + y * y);
  m += vib * Eigen::Matrix4d::Identity();

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(m);
  const Eigen::Vector4d evals = solver.eigenvalues();
  const Eigen::Matrix4d evecs = solver.eigenvectors();
  const Eigen::Matrix4d& u = DeterminantBasis::symmetry_map();

  ApesSample sample;
  sample.x = x;
  sample.y = y;

  // Branches come out ascending from the solver. Within a degenerate group
  // the individual eigenvectors are only defined up to rotation, so each
  // member carries the rotation-invariant group-mean channel weights; the
  // tie is thereby broken stably (members of a group are interchangeable).
  const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
  const double tol = 1e-11 * scale;
  int i = 0;
  while (i < 4) {
    int j = i + 1;
    while (j < 4 && evals(j) - evals(i) < tol) ++j;
    Eigen::Vector4d weights = Eigen::Vector4d::Zero();
    for (int k = i; k < j; ++k) {
      Eigen::Vector4d amp = u * evecs.col(k);
      weights += amp.cwiseAbs2();
    }
    weights /= (j - i);
    for (int k = i; k < j; ++k) {
      sample.branch_energies[static_cast<std::size_t>(k)] = evals(k);
      for (int c = 0; c < 4; ++c)
        sample.branch_compositions[static_cast<std::size_t>(k)]
                                  [static_cast<std::size_t>(c)] = weights(c);
    }
    i = j;
  }
  return sample;
}

std::vector<ApesSample> apes_slice(const VibronicParameterSet& params,
                                   const std::vector<double>& x_values,
                                   double y) {
  std::vector<ApesSample> samples;
  samples.reserve(x_values.size());
  for (double x : x_values) samples.push_back(apes_point(params, x, y));
  return samples;
}

std::pair<double, double> couplings_from_jt_energies(double e_jt1_meV,
                                                     double e_jt2_meV,
                                                     double hbar_omega_meV) {
  require(e_jt1_meV >= 0.0 && e_jt2_meV >= 0.0,
          "Jahn-Teller energies must be non-negative");
  require(hbar_omega_meV > 0.0, "hbar_omega_meV must be positive");
  const double sum = std::sqrt(2.0 * hbar_omega_meV * e_jt1_meV);
  const double diff = std::sqrt(2.0 * hbar_omega_meV * e_jt2_meV);
  return {(sum + diff) / 2.0, (sum - diff) / 2.0};
}

std::pair<double, double> jt_energies_from_couplings(double f_o_meV,
                                                     double f_u_meV,
                                                     double hbar_omega_meV) {
  require(hbar_omega_meV > 0.0, "hbar_omega_meV must be positive");
  const double sum = f_o_meV + f_u_meV;
  const double diff = f_o_meV - f_u_meV;
  return {sum * sum / (2.0 * hbar_omega_meV),
          diff * diff / (2.0 * hbar_omega_meV)};
}

// --- APES fit ---------------------------------------------------------------

namespace {

// parameter vector layout: [Fo, Fu, hw] or [Fo, Fu, hw, Lambda, Delta]
VibronicParameterSet params_from_vector(const VibronicParameterSet& base,
                                        const Eigen::VectorXd& theta) {
  VibronicParameterSet p = base;
  p.f_o_meV = theta(0);
  p.f_u_meV = theta(1);
  p.hbar_omega_meV = theta(2);
  if (theta.size() == 5) {
    p.lambda_meV = theta(3);
    p.delta_meV = theta(4);
  }
  return p;
}

bool evaluate_residuals(const std::vector<ApesFitSample>& samples,
                        const VibronicParameterSet& base,
                        const Eigen::VectorXd& theta, Eigen::VectorXd& out) {
  if (theta(2) <= 0.0) return false;  // unphysical step, reject
  VibronicParameterSet p = params_from_vector(base, theta);
  int row = 0;
  for (const auto& s : samples) {
    const ApesSample model = apes_point(p, s.x, 0.0);
    for (std::size_t b = 0; b < s.branch_energies.size(); ++b)
      out(row++) = model.branch_energies[b] - s.branch_energies[b];
  }
  return true;
}

}  // namespace

ApesFitReport fit_apes(const std::vector<ApesFitSample>& samples,
                       const VibronicParameterSet& initial_guess,
                       const ApesFitOptions& options) {
  initial_guess.validate();

  std::vector<double> xs;
  int n_residuals = 0;
  bool has_positive = false, has_negative = false;
  for (const auto& s : samples) {
    require(!s.branch_energies.empty() && s.branch_energies.size() <= 4,
            "each sample must carry 1 to 4 branch energies");
    require(std::is_sorted(s.branch_energies.begin(), s.branch_energies.end()),
            "branch energies must be ascending");
    n_residuals += static_cast<int>(s.branch_energies.size());
    if (std::none_of(xs.begin(), xs.end(),
                     [&](double v) { return v == s.x; }))
      xs.push_back(s.x);
    if (s.x > 0.0) has_positive = true;
    if (s.x < 0.0) has_negative = true;
  }

  const int n_params = options.fit_lambda_delta ? 5 : 3;
  if (static_cast<int>(xs.size()) < 5 || !has_positive || !has_negative ||
      n_residuals < n_params)
    throw std::invalid_argument(
        "rank-deficient sample set: need >= 5 distinct x values spanning "
        "both signs and at least as many energies as fit parameters");

  Eigen::VectorXd theta(n_params);
  theta(0) = initial_guess.f_o_meV;
  theta(1) = initial_guess.f_u_meV;
  theta(2) = initial_guess.hbar_omega_meV;
  if (n_params == 5) {
    theta(3) = initial_guess.lambda_meV;
    theta(4) = initial_guess.delta_meV;
  }

  Eigen::VectorXd r(n_residuals), r_trial(n_residuals);
  if (!evaluate_residuals(samples, initial_guess, theta, r))
    throw std::invalid_argument("initial guess is unphysical");
  double cost = r.squaredNorm();

  double mu = 1e-3;
  bool converged = false;
  int iter = 0;
  for (; iter < options.max_iterations && !converged; ++iter) {
    // forward-difference Jacobian
    Eigen::MatrixXd jac(n_residuals, n_params);
    for (int p = 0; p < n_params; ++p) {
      const double h = std::max(1e-7 * std::abs(theta(p)), 1e-9);
      Eigen::VectorXd shifted = theta;
      shifted(p) += h;
      Eigen::VectorXd rp(n_residuals);
      if (!evaluate_residuals(samples, initial_guess, shifted, rp)) {
        shifted(p) = theta(p) - h;
        evaluate_residuals(samples, initial_guess, shifted, rp);
        jac.col(p) = (r - rp) / h;
      } else {
        jac.col(p) = (rp - r) / h;
      }
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < options.tolerance * std::max(1.0, cost)) {
      converged = true;
      break;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 32 && !stepped; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() += mu * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (!step.allFinite()) {
        mu *= 4.0;
        continue;
      }
      const Eigen::VectorXd trial = theta + step;
      if (evaluate_residuals(samples, initial_guess, trial, r_trial) &&
          r_trial.squaredNorm() < cost) {
        if (step.norm() <=
            options.tolerance * (theta.norm() + options.tolerance))
          converged = true;
        theta = trial;
        r = r_trial;
        cost = r.squaredNorm();
        mu = std::max(mu / 3.0, 1e-14);
        stepped = true;
      } else {
        mu *= 4.0;
      }
    }
    if (!stepped) {
      converged = true;  // no downhill step left at any damping: stationary
      break;
    }
  }

  if (!converged)
    throw std::runtime_error("fit_apes did not converge within " +
                             std::to_string(options.max_iterations) +
                             " iterations");

  ApesFitReport report;
  report.params = params_from_vector(initial_guess, theta);
  report.params.provenance = "fit";
  report.residuals.assign(r.data(), r.data() + r.size());
  double energy_sq = 0.0;
  for (const auto& s : samples)
    for (double e : s.branch_energies) energy_sq += e * e;
  const double rms_energy = std::sqrt(energy_sq / n_residuals);
  const double rms_residual = std::sqrt(cost / n_residuals);
  report.rel_stddev = rms_residual / std::max(rms_energy, 1e-12);
  report.iterations = iter;
  report.converged = true;
  return report;
}

}  // namespace vibron
