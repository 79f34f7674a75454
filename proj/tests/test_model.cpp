#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "vibron/model.hpp"

using namespace vibron;

namespace {

VibronicParameterSet make_params(double lambda, double delta, double fo,
                                 double fu, double hw) {
  VibronicParameterSet p;
  p.lambda_meV = lambda;
  p.delta_meV = delta;
  p.f_o_meV = fo;
  p.f_u_meV = fu;
  p.hbar_omega_meV = hw;
  return p;
}

std::array<double, 4> sorted_w_eigenvalues(double lambda, double delta) {
  std::array<double, 4> expected = {lambda, -lambda, -delta, -delta};
  std::sort(expected.begin(), expected.end());
  return expected;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("symmetry map is orthogonal with the documented rows") {
  const Eigen::Matrix4d& u = DeterminantBasis::symmetry_map();
  CHECK((u.transpose() * u - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() <
        1e-12);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(u(DeterminantBasis::A1, 0) == doctest::Approx(s));
  CHECK(u(DeterminantBasis::A1, 3) == doctest::Approx(s));
  CHECK(u(DeterminantBasis::Ex, 0) == doctest::Approx(s));
  CHECK(u(DeterminantBasis::Ex, 3) == doctest::Approx(-s));
  CHECK(u(DeterminantBasis::Ey, 1) == doctest::Approx(s));
  CHECK(u(DeterminantBasis::Ey, 2) == doctest::Approx(s));
  CHECK(u(DeterminantBasis::A2, 1) == doctest::Approx(s));
  CHECK(u(DeterminantBasis::A2, 2) == doctest::Approx(-s));
}

TEST_CASE("electronic W: zero parameters give the zero matrix") {
  const Eigen::Matrix4d w = build_electronic_w(make_params(0, 0, 0, 0, 180.3));
  CHECK(w.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("electronic W eigenvalues are {L, -L, -D, -D}") {
  // published CC2 singlet values
  Eigen::Matrix4d w = build_electronic_w(make_params(-168.5, -619.5, 0, 0, 180.3));
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(w);
  const auto expected = sorted_w_eigenvalues(-168.5, -619.5);
  for (int i = 0; i < 4; ++i)
    CHECK(solver.eigenvalues()(i) == doctest::Approx(expected[i]).epsilon(1e-12));

  // property over random draws
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uniform(-800.0, 800.0);
  for (int trial = 0; trial < 100; ++trial) {
    const double lambda = uniform(rng);
    const double delta = uniform(rng);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> s(
        build_electronic_w(make_params(lambda, delta, 0, 0, 180.3)));
    const auto want = sorted_w_eigenvalues(lambda, delta);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(s.eigenvalues()(i) - want[i]) < 1e-10);
  }
}

TEST_CASE("electronic W determinant-basis diagonal for the triplet values") {
  // hand expansion of U^T diag U: xx/yy carry (L-D)/2, xy/yx -(L+D)/2
  const Eigen::Matrix4d w = build_electronic_w(make_params(393, 7, 0, 0, 180.3));
  CHECK(w(0, 0) == doctest::Approx(193.0));
  CHECK(w(3, 3) == doctest::Approx(193.0));
  CHECK(w(1, 1) == doctest::Approx(-200.0));
  CHECK(w(2, 2) == doctest::Approx(-200.0));
  CHECK(w(0, 3) == doctest::Approx((393.0 + 7.0) / 2));
  CHECK(w(1, 2) == doctest::Approx((393.0 - 7.0) / 2));
}

TEST_CASE("oscillator basis dimension and index round-trip") {
  for (int n_max : {0, 1, 5, 17, 40}) {
    OscillatorBasis basis(n_max);
    CHECK(basis.dimension() == (n_max + 1) * (n_max + 2) / 2);
    for (int i = 0; i < basis.dimension(); ++i) {
      auto [n, m] = basis.quanta(i);
      CHECK(n + m <= n_max);
      CHECK(basis.index(n, m) == i);
    }
    CHECK(basis.index(n_max + 1, 0) == -1);
    CHECK(basis.index(0, n_max + 1) == -1);
  }
  OscillatorBasis production(40);
  CHECK(production.dimension() == 861);
}

TEST_CASE("classical JT block matches the 4x4 linear vibronic matrix") {
  const auto params = make_params(0, 0, 136.3, 123.4, 180.3);
  const double fo = params.f_o_meV, fu = params.f_u_meV;

  SUBCASE("zero couplings give the zero matrix") {
    CHECK(classical_jt_matrix(make_params(0, 0, 0, 0, 180.3), 1.0, 1.0)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  SUBCASE("pure x displacement: diagonal +-(Fo+Fu), -+(Fo-Fu)") {
    const Eigen::Matrix4d j = classical_jt_matrix(params, 1.0, 0.0);
    CHECK(j(0, 0) == doctest::Approx(fo + fu));
    CHECK(j(1, 1) == doctest::Approx(-(fo - fu)));
    CHECK(j(2, 2) == doctest::Approx(fo - fu));
    CHECK(j(3, 3) == doctest::Approx(-(fo + fu)));
    CHECK((j - Eigen::Matrix4d(j.diagonal().asDiagonal())).cwiseAbs().maxCoeff() ==
          0.0);
  }
  SUBCASE("pure y displacement: off-diagonal Fo/Fu pattern") {
    const Eigen::Matrix4d j = classical_jt_matrix(params, 0.0, 1.0);
    CHECK(j(0, 1) == doctest::Approx(fo));
    CHECK(j(0, 2) == doctest::Approx(fu));
    CHECK(j(0, 3) == 0.0);
    CHECK(j.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK((j - j.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("position operator matrix elements") {
  OscillatorBasis basis(3);
  const auto x = position_operator(basis, 0);
  const auto y = position_operator(basis, 1);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(x.coeff(basis.index(1, 0), basis.index(0, 0)) == doctest::Approx(s));
  CHECK(x.coeff(basis.index(2, 1), basis.index(1, 1)) ==
        doctest::Approx(std::sqrt(2.0) * s));
  CHECK(y.coeff(basis.index(0, 1), basis.index(0, 0)) == doctest::Approx(s));
  CHECK(x.coeff(basis.index(0, 1), basis.index(0, 0)) == 0.0);
  // symmetric operators
  CHECK(Eigen::MatrixXd(x - Eigen::SparseMatrix<double>(x.transpose()))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK_THROWS_AS(position_operator(basis, 2), std::invalid_argument);
  CHECK_THROWS_AS(OscillatorBasis(-1), std::invalid_argument);
}

TEST_CASE("pJT coupling operator vanishes at zero coupling") {
  OscillatorBasis basis(4);
  const auto params = make_params(100, -50, 0, 0, 180.3);
  const auto jt = build_pjt_coupling(params, basis, position_operator(basis, 0),
                                     position_operator(basis, 1));
  CHECK(Eigen::MatrixXd(jt).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("total Hamiltonian basics") {
  SUBCASE("n_max=0 free case: all four eigenvalues at hbar omega") {
    const auto h = build_total_hamiltonian(make_params(0, 0, 0, 0, 180.3), 0);
    CHECK(h.dimension() == 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{
        Eigen::MatrixXd(h.matrix)};
    for (int i = 0; i < 4; ++i)
      CHECK(solver.eigenvalues()(i) == doctest::Approx(180.3));
  }
  SUBCASE("dimension at the production cutoff") {
    const auto h = build_total_hamiltonian(make_params(0, 0, 10, 5, 180.3), 40);
    CHECK(h.dimension() == 3444);
  }
  SUBCASE("symmetry of the assembled matrix") {
    const auto h =
        build_total_hamiltonian(make_params(-168.5, -9.5, 79.3, 71.8, 61.0), 8);
    Eigen::MatrixXd dense(h.matrix);
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("cutoff overflow guard") {
    CHECK_THROWS_AS(build_total_hamiltonian(make_params(0, 0, 1, 1, 10), 2000),
                    std::invalid_argument);
  }
}

TEST_CASE("uncoupled spectrum is the oscillator ladder plus W eigenvalues") {
  const double lambda = 37.0, delta = -110.0, hw = 90.0;
  const int n_max = 5;
  const auto h = build_total_hamiltonian(make_params(lambda, delta, 0, 0, hw),
                                         n_max);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver{
      Eigen::MatrixXd(h.matrix)};

  std::vector<double> expected;
  const auto w_evals = sorted_w_eigenvalues(lambda, delta);
  for (int n = 0; n <= n_max; ++n)
    for (int m = 0; m + n <= n_max; ++m)
      for (double w : w_evals) expected.push_back(hw * (n + m + 1) + w);
  std::sort(expected.begin(), expected.end());

  REQUIRE(solver.eigenvalues().size() ==
          static_cast<int>(expected.size()));
  for (int i = 0; i < solver.eigenvalues().size(); ++i)
    CHECK(std::abs(solver.eigenvalues()(i) -
                   expected[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("with Fo=Fu=0 the Hamiltonian is block diagonal in (n, m)") {
  const auto h = build_total_hamiltonian(make_params(50, 20, 0, 0, 100.0), 6);
  for (int col = 0; col < h.matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h.matrix, col); it;
         ++it) {
      if (it.value() == 0.0) continue;
      CHECK(it.row() / 4 == it.col() / 4);
    }
}

TEST_CASE("apes slice at the origin returns the sorted W spectrum") {
  const auto params = make_params(-168.5, -619.5, 136.3, 123.4, 180.3);
  const auto samples = apes_slice(params, {0.0});
  const auto expected = sorted_w_eigenvalues(-168.5, -619.5);
  for (int i = 0; i < 4; ++i)
    CHECK(samples[0].branch_energies[static_cast<std::size_t>(i)] ==
          doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("apes: analytic minimum of the decoupled lowest branch") {
  // L = D = 0, y = 0: lowest branch is hw x^2/2 - |x|(Fo+Fu)
  const double fo = 136.3, fu = 123.4, hw = 180.3;
  const auto params = make_params(0, 0, fo, fu, hw);
  const double x_star = -(fo + fu) / hw;
  const auto sample = apes_point(params, x_star, 0.0);
  const double depth = (fo + fu) * (fo + fu) / (2 * hw);
  CHECK(sample.branch_energies[0] == doctest::Approx(-depth).epsilon(1e-12));

  // and the mirror image
  const auto mirror = apes_point(params, -x_star, 0.0);
  CHECK(mirror.branch_energies[0] == doctest::Approx(-depth).epsilon(1e-12));
}

TEST_CASE("apes branches have the classical three-fold symmetry") {
  const auto params = make_params(-168.5, -9.5, 79.27, 71.78, 61.0);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uniform(-2.5, 2.5);
  const double c = std::cos(2.0 * M_PI / 3.0), s = std::sin(2.0 * M_PI / 3.0);
  for (int trial = 0; trial < 25; ++trial) {
    const double x = uniform(rng), y = uniform(rng);
    const auto a = apes_point(params, x, y);
    const auto b = apes_point(params, c * x - s * y, s * x + c * y);
    for (int i = 0; i < 4; ++i)
      CHECK(std::abs(a.branch_energies[static_cast<std::size_t>(i)] -
                     b.branch_energies[static_cast<std::size_t>(i)]) < 1e-9);
  }
}

TEST_CASE("minima loop carries no A2 weight when E2_JT is tiny") {
  // (Fo-Fu)^2/(2 hw) = 0.46 meV < 1 meV for the singlet preset couplings
  const auto params = make_params(-168.5, -9.5, 79.2671842719, 71.7758559518,
                                  61.0);
  const double radius = (params.f_o_meV + params.f_u_meV) / params.hbar_omega_meV;
  for (double phi : {0.0, 0.7, 2.0, 3.9, 5.5}) {
    const auto sample =
        apes_point(params, radius * std::cos(phi), radius * std::sin(phi));
    CHECK(sample.branch_compositions[0][DeterminantBasis::A2] < 0.01);
  }
}

TEST_CASE("couplings_from_jt_energies") {
  SUBCASE("zero energies give zero couplings") {
    const auto [fo, fu] = couplings_from_jt_energies(0, 0, 180.3);
    CHECK(fo == 0.0);
    CHECK(fu == 0.0);
  }
  SUBCASE("published singlet pair") {
    const auto [fo, fu] = couplings_from_jt_energies(187, 0.46, 180.3);
    CHECK(fo + fu == doctest::Approx(std::sqrt(2 * 180.3 * 187)).epsilon(1e-12));
    CHECK(fo - fu == doctest::Approx(std::sqrt(2 * 180.3 * 0.46)).epsilon(1e-12));
    CHECK(fo == doctest::Approx(136.3).epsilon(1e-3));
    CHECK(fu == doctest::Approx(123.4).epsilon(1e-3));
    CHECK(fo >= fu);
    CHECK(fu >= 0.0);
  }
  SUBCASE("round trip on the published pairs and random draws") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> energy(0.0, 400.0);
    std::uniform_real_distribution<double> quantum(20.0, 300.0);
    std::vector<std::array<double, 3>> cases = {{187, 0.46, 180.3},
                                                {239, 0.14, 180.3}};
    for (int trial = 0; trial < 200; ++trial) {
      double e2 = energy(rng);
      double e1 = e2 + energy(rng);  // E1 >= E2 so Fo >= Fu
      cases.push_back({e1, e2, quantum(rng)});
    }
    for (const auto& [e1, e2, hw] : cases) {
      const auto [fo, fu] = couplings_from_jt_energies(e1, e2, hw);
      const auto [r1, r2] = jt_energies_from_couplings(fo, fu, hw);
      CHECK(std::abs(r1 - e1) <= 1e-10 * std::max(1.0, std::abs(e1)));
      CHECK(std::abs(r2 - e2) <= 1e-10 * std::max(1.0, std::abs(e2)));
    }
  }
  SUBCASE("negative input rejected") {
    CHECK_THROWS_AS(couplings_from_jt_energies(-1, 0, 180.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(couplings_from_jt_energies(1, -2, 180.3),
                    std::invalid_argument);
    CHECK_THROWS_AS(couplings_from_jt_energies(1, 2, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("fit_apes recovers the generator exactly on clean data") {
  const auto truth = make_params(-168.5, -9.5, 136.3, 123.4, 180.3);
  std::vector<ApesFitSample> samples;
  for (int i = 0; i <= 40; ++i) {
    const double x = -2.5 + 5.0 * i / 40;
    const auto point = apes_point(truth, x, 0.0);
    samples.push_back(
        {x, {point.branch_energies.begin(), point.branch_energies.end()}});
  }

  auto guess = truth;
  guess.f_o_meV = 100.0;
  guess.f_u_meV = 90.0;
  guess.hbar_omega_meV = 150.0;
  const auto report = fit_apes(samples, guess);
  CHECK(report.converged);
  CHECK(std::abs(report.params.f_o_meV - truth.f_o_meV) < 1e-6 * truth.f_o_meV);
  CHECK(std::abs(report.params.f_u_meV - truth.f_u_meV) < 1e-6 * truth.f_u_meV);
  CHECK(std::abs(report.params.hbar_omega_meV - truth.hbar_omega_meV) <
        1e-6 * truth.hbar_omega_meV);
  CHECK(report.rel_stddev < 1e-8);
}

TEST_CASE("fit_apes with lambda/delta free recovers all five parameters") {
  const auto truth = make_params(-120.0, 60.0, 110.0, 80.0, 140.0);
  std::vector<ApesFitSample> samples;
  for (int i = 0; i <= 30; ++i) {
    const double x = -2.0 + 4.0 * i / 30;
    const auto point = apes_point(truth, x, 0.0);
    samples.push_back(
        {x, {point.branch_energies.begin(), point.branch_energies.end()}});
  }
  auto guess = truth;
  guess.f_o_meV = 90.0;
  guess.f_u_meV = 60.0;
  guess.hbar_omega_meV = 170.0;
  guess.lambda_meV = -90.0;
  guess.delta_meV = 40.0;
  ApesFitOptions options;
  options.fit_lambda_delta = true;
  const auto report = fit_apes(samples, guess, options);
  CHECK(std::abs(report.params.lambda_meV - truth.lambda_meV) < 1e-5);
  CHECK(std::abs(report.params.delta_meV - truth.delta_meV) < 1e-5);
  CHECK(std::abs(report.params.f_o_meV - truth.f_o_meV) < 1e-5);
}

TEST_CASE("fit_apes on 1% noisy data: parameters within 5%, stddev below 3%") {
  const auto truth = make_params(-168.5, -9.5, 136.3, 123.4, 180.3);
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<ApesFitSample> samples;
  for (int i = 0; i <= 40; ++i) {
    const double x = -2.5 + 5.0 * i / 40;
    const auto point = apes_point(truth, x, 0.0);
    ApesFitSample sample{x, {}};
    for (double e : point.branch_energies)
      sample.branch_energies.push_back(e + 0.01 * std::abs(e) * gauss(rng));
    std::sort(sample.branch_energies.begin(), sample.branch_energies.end());
    samples.push_back(std::move(sample));
  }
  auto guess = truth;
  guess.f_o_meV = 110.0;
  guess.f_u_meV = 100.0;
  guess.hbar_omega_meV = 160.0;
  const auto report = fit_apes(samples, guess);
  CHECK(std::abs(report.params.f_o_meV - truth.f_o_meV) < 0.05 * truth.f_o_meV);
  CHECK(std::abs(report.params.f_u_meV - truth.f_u_meV) < 0.05 * truth.f_u_meV);
  CHECK(std::abs(report.params.hbar_omega_meV - truth.hbar_omega_meV) <
        0.05 * truth.hbar_omega_meV);
  CHECK(report.rel_stddev < 0.03);
}

TEST_CASE("fit_apes rejects degenerate sample sets") {
  const auto truth = make_params(0, 0, 136.3, 123.4, 180.3);
  std::vector<ApesFitSample> two_points;
  for (double x : {-1.0, 1.0}) {
    const auto point = apes_point(truth, x, 0.0);
    two_points.push_back(
        {x, {point.branch_energies.begin(), point.branch_energies.end()}});
  }
  CHECK_THROWS_AS(fit_apes(two_points, truth), std::invalid_argument);

  std::vector<ApesFitSample> one_sided;
  for (double x : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const auto point = apes_point(truth, x, 0.0);
    one_sided.push_back(
        {x, {point.branch_energies.begin(), point.branch_energies.end()}});
  }
  CHECK_THROWS_AS(fit_apes(one_sided, truth), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(make_params(0, 0, 0, 0, -5.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_params(0, 0, 0, 0, 0.0).validate(),
                  std::invalid_argument);
  CHECK_NOTHROW(make_params(-1000, 1000, -50, 50, 0.1).validate());
}

TEST_SUITE_END();
