#include "quadsim/state.hpp"

#include <Eigen/Eigenvalues>
#include <complex>

#include "quadsim/errors.hpp"
#include "quadsim/measures.hpp"

namespace quadsim {

GaussianState vacuum_state(const ModeLayout& layout) {
  GaussianState s;
  s.layout = layout;
  s.mean = Eigen::VectorXd::Zero(layout.dim());
  s.cov = Eigen::MatrixXd::Identity(layout.dim(), layout.dim());
  return s;
}

StateDiagnostics validate_state(const GaussianState& s) {
  const int dim = s.layout.dim();
  if (s.mean.size() != dim || s.cov.rows() != dim || s.cov.cols() != dim) {
    throw ConfigError("state dimensions do not match the layout");
  }

  StateDiagnostics out;
  out.max_asymmetry = (s.cov - s.cov.transpose()).cwiseAbs().maxCoeff();

  // Hermitian part of cov + i*Omega; its smallest eigenvalue certifies the
  // uncertainty relation.
  const Eigen::MatrixXd omega = symplectic_form(s.layout.n_modes());
  Eigen::MatrixXcd herm =
      s.cov.cast<std::complex<double>>() +
      std::complex<double>(0.0, 1.0) * omega.cast<std::complex<double>>();
  herm = ((herm + herm.adjoint()) * 0.5).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  if (es.info() != Eigen::Success) {
    throw PhysicsError("eigensolve failed while validating a state");
  }
  out.min_physical_eig = es.eigenvalues().minCoeff();

  const Eigen::VectorXd nus = symplectic_spectrum(s.cov);
  out.min_symplectic_eig = nus.minCoeff();
  return out;
}

GaussianState reduce_state(const GaussianState& s,
                           const std::vector<std::string>& keep) {
  if (keep.empty()) {
    throw ConfigError("cannot reduce a state to zero modes");
  }
  GaussianState out;
  out.layout = ModeLayout::of(keep);
  out.mean = Eigen::VectorXd::Zero(out.layout.dim());
  out.cov = Eigen::MatrixXd::Zero(out.layout.dim(), out.layout.dim());

  std::vector<int> rows(out.layout.dim());
  for (int m = 0; m < out.layout.n_modes(); ++m) {
    const int src = s.layout.index_of(keep[m]);
    rows[2 * m] = 2 * src;
    rows[2 * m + 1] = 2 * src + 1;
  }
  for (int i = 0; i < out.layout.dim(); ++i) {
    out.mean(i) = s.mean(rows[i]);
    for (int j = 0; j < out.layout.dim(); ++j) {
      out.cov(i, j) = s.cov(rows[i], rows[j]);
    }
  }
  return out;
}

}  // namespace quadsim
