#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "quadsim/layout.hpp"

namespace quadsim {

// Quadratic Hamiltonian H = (1/2) r^T G r + f^T r with G symmetric.
struct QuadraticHamiltonian {
  Eigen::MatrixXd G;
  Eigen::VectorXd f;

  static QuadraticHamiltonian zero(int dim);
};

// Jump operator linear in the quadratures, L = c^T r (rates are folded into
// the magnitude of c).
struct LinearJump {
  Eigen::VectorXcd c;
};

// Continuously monitored Hermitian quadrature v^T r (v real, unit norm) with
// measurement rate `rate` and unit detection efficiency.
struct MonitoredQuadrature {
  Eigen::VectorXd v;
  double rate = 0.0;
};

// Compiled moment-equation generators:
//   d<r>/dt   = A <r> + drive
//   dcov/dt   = A cov + cov A^T + D                          (unconditional)
//   dcov/dt   = A cov + cov A^T + D
//               - sum_k 2 rate_k (cov v_k)(cov v_k)^T        (conditional)
// A is sparse (local couplings); D is dense symmetric PSD.
struct GeneratorSet {
  Eigen::SparseMatrix<double> A;
  Eigen::MatrixXd D;
  Eigen::VectorXd drive;
  std::vector<MonitoredQuadrature> monitors;
  int dim = 0;
};

// Builds A = Omega (G + sum_j Im(conj(c_j) c_j^T)),
//        D = 2 Omega (sum_j Re(conj(c_j) c_j^T)
//                     + sum_k rate_k v_k v_k^T) Omega^T,
//        drive = Omega f.
// Throws ConfigError on dimension mismatches, non-symmetric G, monitor
// vectors that are not unit norm, or monitored quadratures that fail to
// commute (v_j^T Omega v_k != 0).
GeneratorSet assemble_generators(const QuadraticHamiltonian& H,
                                 const std::vector<LinearJump>& jumps,
                                 const std::vector<MonitoredQuadrature>& monitors);

// Direction vector from per-mode x and p weights, e.g. (x_a + x_b)/sqrt(2).
Eigen::VectorXd quadrature_direction(
    const ModeLayout& layout,
    const std::vector<std::pair<std::string, double>>& x_weights,
    const std::vector<std::pair<std::string, double>>& p_weights);

// sqrt(rate) * annihilation operator of `mode`.
LinearJump lowering_jump(const ModeLayout& layout, const std::string& mode,
                         double rate);

}  // namespace quadsim
