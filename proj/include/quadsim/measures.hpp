#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "quadsim/state.hpp"

namespace quadsim {

// Symplectic eigenvalues of a covariance matrix: the absolute values of the
// eigenvalues of Omega*cov, which come in (+nu, -nu) pairs; each pair is
// averaged and reported once, sorted ascending. Physical states have every
// value >= 1 - tol.
Eigen::VectorXd symplectic_spectrum(const Eigen::MatrixXd& cov);

// Momentum-flip partial transpose: negates the p rows/columns of side_b.
Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& cov,
                                  const ModeLayout& layout,
                                  const Partition& partition);

// Logarithmic negativity across `partition`, in nats:
//   E_N = sum over partial-transpose symplectic eigenvalues nu < 1 of -ln nu.
// When `validate` is set (default), throws PhysicsError if the input state
// itself is unphysical beyond a loose 1e-6 guard.
double log_negativity(const GaussianState& s, const Partition& partition,
                      bool validate = true);

// Entropy contribution of one symplectic eigenvalue:
//   ((nu+1)/2) ln((nu+1)/2) - ((nu-1)/2) ln((nu-1)/2), 0 at nu <= 1.
double thermal_entropy(double nu);

// Entanglement entropy of `side` in nats: the von Neumann entropy of the
// reduced state. Defined only when the global state is pure within
// kPureStateTol; returns nullopt otherwise.
std::optional<double> entanglement_entropy(const GaussianState& s,
                                           const std::vector<std::string>& side);

// 1/sqrt(det cov). Throws PhysicsError on a non-positive determinant.
double purity(const GaussianState& s);

// Gaussian entanglement of formation of an exchange-symmetric two-mode state,
// in nats. Throws ConfigError unless the state has exactly two modes and is
// symmetric under their exchange to within `symmetry_tol`.
double eof_symmetric_two_mode(const GaussianState& s,
                              double symmetry_tol = 1e-6);

// Mode-pair second moments of a zero-mean-convention state, reconstructed
// from the quadrature covariances:
//   pairing:        <a_l a_m>   = (C_xx - C_pp + i(C_xp + C_px))/4
//   normal-ordered: <a_l^+ a_m> = (C_xx + C_pp + i(C_xp - C_px))/4 - d_lm/2
Eigen::MatrixXcd pairing_correlators(const GaussianState& s);
Eigen::MatrixXcd normal_ordered_correlators(const GaussianState& s);

struct EntanglementReport {
  double log_negativity;
  std::optional<double> entropy;  // of side_a; set only for pure global states
  double purity;
  Eigen::VectorXd pt_spectrum;    // PT symplectic eigenvalues, ascending
};

EntanglementReport entanglement_report(const GaussianState& s,
                                       const Partition& partition);

}  // namespace quadsim
