#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "quadsim/dense.hpp"
#include "quadsim/errors.hpp"
#include "quadsim/scenario.hpp"

using namespace quadsim;
using namespace quadsim::dense;
using Complex = std::complex<double>;

namespace {

Eigen::VectorXcd bell_pair() {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = 1.0 / std::sqrt(2.0);
  psi(3) = 1.0 / std::sqrt(2.0);
  return psi;
}

}  // namespace

TEST_CASE("hilbert space validation") {
  HilbertSpec ok{{2, 3, 4}};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.total() == 24);
  HilbertSpec tiny{{2, 1}};
  CHECK_THROWS_AS(tiny.validate(), ConfigError);
  HilbertSpec huge{{64, 64, 64}};
  CHECK_THROWS_AS(huge.validate(), ConfigError);
}

TEST_CASE("operator embedding places factors on the right site") {
  const HilbertSpec space{{2, 2}};
  const Eigen::MatrixXcd sx1 = Eigen::MatrixXcd(pauli(space, 1, 'x').mat);
  // kron(I, sigma_x): flips the second digit.
  CHECK(sx1(0, 1) == Complex(1.0, 0.0));
  CHECK(sx1(1, 0) == Complex(1.0, 0.0));
  CHECK(sx1(2, 3) == Complex(1.0, 0.0));
  CHECK(sx1(0, 2) == Complex(0.0, 0.0));
  const Eigen::MatrixXcd sx0 = Eigen::MatrixXcd(pauli(space, 0, 'x').mat);
  CHECK(sx0(0, 2) == Complex(1.0, 0.0));
  CHECK(sx0(1, 3) == Complex(1.0, 0.0));
}

TEST_CASE("two-level truncated position is the balanced qubit flip") {
  const HilbertSpec space{{2}};
  const Eigen::MatrixXcd x = Eigen::MatrixXcd(truncated_x(space, 0).mat);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(x(0, 1) - inv_sqrt2) < 1e-14);
  CHECK(std::abs(x(1, 0) - inv_sqrt2) < 1e-14);
  CHECK(std::abs(x(0, 0)) < 1e-14);
}

TEST_CASE("number operator counts excitations") {
  const HilbertSpec space{{4}};
  const Eigen::MatrixXcd n = Eigen::MatrixXcd(number_op(space, 0).mat);
  for (int k = 0; k < 4; ++k) {
    CHECK(n(k, k) == Complex(k, 0.0));
  }
  // x = (a + a^+)/sqrt(2) against the ladder matrix elements.
  const Eigen::MatrixXcd x = Eigen::MatrixXcd(truncated_x(space, 0).mat);
  CHECK(std::abs(x(0, 1) - std::sqrt(0.5)) < 1e-14);
  CHECK(std::abs(x(1, 2) - std::sqrt(1.0)) < 1e-14);
  CHECK(std::abs(x(2, 3) - std::sqrt(1.5)) < 1e-14);
}

TEST_CASE("weighted collective flip has the expected spectrum") {
  const HilbertSpec space{{2, 2}};
  const DenseOperator sig =
      Complex(0.5, 0.0) *
      (pauli(space, 0, 'x') + Complex(0.7, 0.0) * pauli(space, 1, 'x'));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      Eigen::MatrixXcd(sig.mat));
  const Eigen::VectorXd evs = es.eigenvalues();
  CHECK(evs(0) == doctest::Approx(-0.85));
  CHECK(evs(1) == doctest::Approx(-0.15));
  CHECK(evs(2) == doctest::Approx(0.15));
  CHECK(evs(3) == doctest::Approx(0.85));
}

TEST_CASE("qubit amplitude damping follows the analytic decay") {
  const HilbertSpec space{{2}};
  const double kappa = 0.8;
  Eigen::VectorXcd psi(2);
  psi << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  DenseState state = DenseState::pure(space, psi);
  const DenseOperator l =
      Complex(std::sqrt(kappa), 0.0) * lowering(space, 0);
  const DenseOperator h = Complex(0.0, 0.0) * identity_op(space);
  const double t = 1.1;
  const DenseState out = evolve_lindblad(state, h, {l}, t);
  CHECK(std::abs(out.rho(1, 1).real() - 0.5 * std::exp(-kappa * t)) < 1e-8);
  CHECK(std::abs(out.rho(0, 1) - Complex(0.5 * std::exp(-0.5 * kappa * t), 0.0)) <
        1e-8);
  CHECK(std::abs(out.rho.trace() - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("master equation preserves trace, hermiticity and positivity") {
  const HilbertSpec space{{2, 2, 3}};
  const DenseOperator sig =
      Complex(0.5, 0.0) *
      (pauli(space, 0, 'x') + Complex(0.7, 0.0) * pauli(space, 1, 'x'));
  const DenseOperator f = truncated_x(space, 2);
  const DenseOperator h = Complex(1.0, 0.0) * (sig * f);
  const DenseOperator l = sig + Complex(0.0, -1.0) * f;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.total());
  psi(3 * 3) = 1.0;  // |down down> x |0>
  const DenseSeries series = run_lindblad(DenseState::pure(space, psi), h,
                                          {l}, 2.0, {0.5, 1.0, 2.0});
  for (const auto& state : series.states) {
    CHECK(std::abs(state.rho.trace() - Complex(1.0, 0.0)) < 1e-10);
    CHECK((state.rho - state.rho.adjoint()).norm() < 1e-10);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-8);
  }
}

TEST_CASE("log-negativity of a Bell pair is ln 2 and of a product state 0") {
  const HilbertSpec space{{2, 2}};
  const DenseState bell = DenseState::pure(space, bell_pair());
  CHECK(dense_log_negativity(bell, {0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const DenseState ground = DenseState::ground(space);
  CHECK(dense_log_negativity(ground, {0}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(dense_log_negativity(bell, {}), ConfigError);
  CHECK_THROWS_AS(dense_log_negativity(bell, {0, 1}), ConfigError);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
  const HilbertSpec space{{2, 2}};
  const DenseState bell = DenseState::pure(space, bell_pair());
  const Eigen::MatrixXcd reduced = partial_trace(bell, {0});
  CHECK(std::abs(reduced(0, 0) - Complex(0.5, 0.0)) < 1e-12);
  CHECK(std::abs(reduced(1, 1) - Complex(0.5, 0.0)) < 1e-12);
  CHECK(std::abs(reduced(0, 1)) < 1e-12);
  CHECK(von_neumann_entropy(reduced) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("tagged Bell mixture separates quantum and classical correlations") {
  const BellRegisterReport report = bell_register_example();
  CHECK(report.en_first_vs_rest ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
  CHECK(report.en_pair_vs_register == doctest::Approx(0.0));
  CHECK(report.mi_pair_register ==
        doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("trajectory average reproduces the master equation") {
  const HilbertSpec space{{2, 2}};
  const DenseOperator sig =
      Complex(0.5, 0.0) *
      (pauli(space, 0, 'x') + Complex(0.7, 0.0) * pauli(space, 1, 'x'));
  const DenseOperator h = Complex(0.0, 0.0) * identity_op(space);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(3) = 1.0;
  const double rate = 1.0, t = 0.5;

  // Unconditional reference: Hermitian jump at the same rate.
  const DenseState lind = evolve_lindblad(
      DenseState::pure(space, psi), h,
      {Complex(std::sqrt(rate), 0.0) * sig}, t);

  Eigen::MatrixXcd mean_rho = Eigen::MatrixXcd::Zero(4, 4);
  const int count = 300;
  for (int k = 0; k < count; ++k) {
    const SmeResult traj = sample_sme_trajectory(
        space, psi, h, sig, rate, t, {t}, 1e-4, 9000 + k);
    REQUIRE(traj.psis.size() == 1);
    const Eigen::VectorXcd& end = traj.psis[0];
    CHECK(std::abs(end.norm() - 1.0) < 1e-10);
    mean_rho += end * end.adjoint();
  }
  mean_rho /= count;
  CHECK((mean_rho - lind.rho).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("sme ensemble is worker-count invariant") {
  const HilbertSpec space{{2, 2}};
  const DenseOperator sig =
      Complex(0.5, 0.0) *
      (pauli(space, 0, 'x') + Complex(0.7, 0.0) * pauli(space, 1, 'x'));
  const DenseOperator h = Complex(0.0, 0.0) * identity_op(space);
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(3) = 1.0;
  const std::vector<double> samples = {0.1, 0.2};
  const SmeEnsemble one = sme_mean_log_negativity(
      space, psi, h, sig, 1.0, 0.2, samples, 1e-4, 321, 23, {0}, 1);
  const SmeEnsemble many = sme_mean_log_negativity(
      space, psi, h, sig, 1.0, 0.2, samples, 1e-4, 321, 23, {0}, 6);
  REQUIRE(one.mean_en.size() == many.mean_en.size());
  for (std::size_t i = 0; i < one.mean_en.size(); ++i) {
    CHECK(one.mean_en[i] == many.mean_en[i]);
    CHECK(one.sem_en[i] == many.sem_en[i]);
  }
  // Monitoring two qubits can never exceed one ebit.
  for (double v : one.mean_en) {
    CHECK(v <= std::log(2.0) + 1e-9);
    CHECK(v >= 0.0);
  }
}

TEST_CASE("cross-engine oracle agrees on the adaptive protocol") {
  ScenarioParams p;
  p.variant = Variant::feedforward;
  p.M = 1;
  p.eta = 1.0;
  p.t_f = 0.2;
  const BuiltScenario scenario = build_two_mode_scenario(p);
  const OracleReport coarse =
      oracle_compare(scenario, /*n_tr=*/6, /*horizon=*/0.2, {0.1, 0.2});
  const OracleReport fine =
      oracle_compare(scenario, /*n_tr=*/8, /*horizon=*/0.2, {0.1, 0.2});
  CHECK(fine.max_abs_en_error < 2e-2);
  CHECK(fine.max_moment_error < 2e-4);
  CHECK(!fine.truncation_warning);
  // The residual is Fock-space truncation: it shrinks as levels are added.
  CHECK(fine.max_moment_error < coarse.max_moment_error);
}

TEST_CASE("cross-engine oracle refuses monitored schedules") {
  ScenarioParams p;
  p.variant = Variant::conditional;
  const BuiltScenario scenario = build_two_mode_scenario(p);
  CHECK_THROWS_AS(oracle_compare(scenario, 6, 0.1, {0.1}), ConfigError);
}

TEST_CASE("pure-state constructor normalizes and rejects null vectors") {
  const HilbertSpec space{{2}};
  Eigen::VectorXcd big(2);
  big << 2.0, 0.0;
  const DenseState state = DenseState::pure(space, big);
  CHECK(std::abs(state.rho(0, 0) - Complex(1.0, 0.0)) < 1e-14);
  Eigen::VectorXcd null_vec = Eigen::VectorXcd::Zero(2);
  CHECK_THROWS_AS(DenseState::pure(space, null_vec), ConfigError);
}
