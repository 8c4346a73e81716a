#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <vector>

#include "quadsim/scenario.hpp"

namespace quadsim::dense {

using SparseOp = Eigen::SparseMatrix<std::complex<double>>;

// Tensor-product Hilbert space of finite-dimensional subsystems.
struct HilbertSpec {
  std::vector<int> dims;
  int max_total = 4096;

  int total() const;
  int n_sites() const { return static_cast<int>(dims.size()); }
  // Throws ConfigError if any dim < 2 or the product exceeds max_total.
  void validate() const;
};

struct DenseOperator {
  HilbertSpec space;
  SparseOp mat;
};

DenseOperator identity_op(const HilbertSpec& space);
// Pauli operator on a dimension-2 site; axis is 'x', 'y' or 'z'.
DenseOperator pauli(const HilbertSpec& space, int site, char axis);
DenseOperator lowering(const HilbertSpec& space, int site);
DenseOperator number_op(const HilbertSpec& space, int site);
// Truncated quadratures (a + a^+)/sqrt(2) and -i(a - a^+)/sqrt(2) on the
// lowest dims[site] levels; at dims[site] = 2 the position quadrature is
// sigma_x/sqrt(2).
DenseOperator truncated_x(const HilbertSpec& space, int site);
DenseOperator truncated_p(const HilbertSpec& space, int site);

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);
DenseOperator operator*(std::complex<double> scale, const DenseOperator& a);

struct DenseState {
  HilbertSpec space;
  Eigen::MatrixXcd rho;

  static DenseState pure(const HilbertSpec& space,
                         const Eigen::VectorXcd& psi);
  static DenseState ground(const HilbertSpec& space);  // |0...0>
};

// Fixed-step RK4 master-equation propagator
//   drho/dt = -i[H, rho] + sum_j (L_j rho L_j^+ - {L_j^+ L_j, rho}/2).
// rho is re-Hermitized and trace-renormalized every step; a per-step trace
// drift above 1e-8 raises PhysicsError.
DenseState evolve_lindblad(DenseState state, const DenseOperator& H,
                           const std::vector<DenseOperator>& jumps,
                           double duration, double dt = 1e-3);

struct DenseSeries {
  std::vector<double> times;
  std::vector<DenseState> states;
};

// As evolve_lindblad, storing snapshots at the requested times (clamped to
// [0, duration]; steps never straddle a snapshot).
DenseSeries run_lindblad(DenseState state, const DenseOperator& H,
                         const std::vector<DenseOperator>& jumps,
                         double duration, const std::vector<double>& sample_times,
                         double dt = 1e-3);

struct SmeResult {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> psis;  // normalized state at each sample time
};

// Diffusive unraveling of continuous monitoring of the Hermitian `monitor` at
// rate `rate` (unit efficiency), Euler-Maruyama with per-step renormalization:
//   dpsi = [-iH dt - (rate/2)(monitor - <monitor>)^2 dt
//           + sqrt(rate)(monitor - <monitor>) dW] psi.
// Deterministic per (seed, step).
SmeResult sample_sme_trajectory(const HilbertSpec& space,
                                const Eigen::VectorXcd& psi0,
                                const DenseOperator& H,
                                const DenseOperator& monitor, double rate,
                                double duration,
                                const std::vector<double>& sample_times,
                                double dt, std::uint64_t seed);

// Log-negativity ln ||rho^(T_A)||_1 across sites(side A) | rest, in nats.
double dense_log_negativity(const DenseState& state,
                            const std::vector<int>& side_a_sites);

Eigen::MatrixXcd partial_trace(const DenseState& state,
                               const std::vector<int>& keep_sites);
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

struct SmeEnsemble {
  std::vector<double> times;
  std::vector<double> mean_en;  // trajectory-averaged log-negativity
  std::vector<double> sem_en;   // standard error of that mean
};

// Trajectory-averaged log-negativity across sites(side A) | rest for `count`
// monitored trajectories (seeds base_seed + k). Parallel over trajectories,
// reduced in seed order (bit-identical for any worker count).
SmeEnsemble sme_mean_log_negativity(const HilbertSpec& space,
                                    const Eigen::VectorXcd& psi0,
                                    const DenseOperator& H,
                                    const DenseOperator& monitor, double rate,
                                    double duration,
                                    const std::vector<double>& sample_times,
                                    double dt, std::uint64_t base_seed,
                                    int count,
                                    const std::vector<int>& side_a_sites,
                                    int workers = 0);

struct BellRegisterReport {
  double en_first_vs_rest;     // qubit 1 | (qubit 2, register)
  double en_pair_vs_register;  // (qubit 1, qubit 2) | register
  double mi_pair_register;     // mutual information I(12 : 3)
};

// Three-qubit classical-quantum benchmark: an equal mixture of two Bell
// pairs, each tagged by an orthogonal register state. Entanglement across
// 1|23 survives (ln 2) while 12|3 carries only classical correlations.
BellRegisterReport bell_register_example();

struct OracleReport {
  double max_abs_en_error;     // |E_N(dense) - E_N(gaussian)| over samples
  double max_moment_error;     // first and second moments, same grid
  double max_top_population;   // largest top-Fock-level occupation seen
  bool truncation_warning;     // max_top_population > 1e-4
};

// Cross-engine validation: re-runs the scenario's schedule in a truncated
// Fock space (n_tr levels per mode) with the same operators and compares
// moments and log-negativity at the sample times.
OracleReport oracle_compare(const BuiltScenario& scenario, int n_tr,
                            double horizon,
                            const std::vector<double>& sample_times,
                            double dt = 1e-3);

}  // namespace quadsim::dense
