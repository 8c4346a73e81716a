#pragma once

#include <Eigen/Dense>
#include <vector>

#include "quadsim/layout.hpp"

namespace quadsim {

// Tolerance against which physicality (cov + i*Omega >= 0) is enforced.
inline constexpr double kPhysicalityTol = 1e-9;
// Purity threshold above which a global state counts as pure.
inline constexpr double kPureStateTol = 1e-6;

// Gaussian state of the modes in `layout`: mean quadrature vector and
// symmetrized covariance matrix (vacuum = identity).
struct GaussianState {
  ModeLayout layout;
  Eigen::VectorXd mean;  // length layout.dim()
  Eigen::MatrixXd cov;   // layout.dim() x layout.dim(), symmetric

  void symmetrize() { cov = ((cov + cov.transpose()) * 0.5).eval(); }
};

GaussianState vacuum_state(const ModeLayout& layout);

struct StateDiagnostics {
  double max_asymmetry;       // max |cov - cov^T|
  double min_physical_eig;    // min eig of cov + i*Omega; >= -tol if physical
  double min_symplectic_eig;  // smallest symplectic eigenvalue; >= 1 - tol
};

// Diagnostics only; never throws on unphysical input.
StateDiagnostics validate_state(const GaussianState& s);

// Gaussian partial trace: keeps `keep` (in the given order), drops the rest.
GaussianState reduce_state(const GaussianState& s,
                           const std::vector<std::string>& keep);

}  // namespace quadsim
