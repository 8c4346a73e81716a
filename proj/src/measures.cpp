#include "quadsim/measures.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "quadsim/errors.hpp"

namespace quadsim {

namespace {

// Loose physicality guard applied to *input* states of entanglement measures;
// wider than kPhysicalityTol to absorb integrator drift.
constexpr double kInputGuard = 1e-6;

void check_physical_input(const GaussianState& s, const char* where) {
  const Eigen::VectorXd nus = symplectic_spectrum(s.cov);
  if (nus.minCoeff() < 1.0 - kInputGuard) {
    throw PhysicsError(std::string(where) +
                       ": input state is unphysical (smallest symplectic "
                       "eigenvalue " +
                       std::to_string(nus.minCoeff()) + ")");
  }
}

}  // namespace

Eigen::VectorXd symplectic_spectrum(const Eigen::MatrixXd& cov) {
  const int dim = static_cast<int>(cov.rows());
  if (dim == 0 || dim % 2 != 0 || cov.cols() != dim) {
    throw ConfigError("covariance matrix must be square and even-dimensional");
  }
  const Eigen::MatrixXd omega = symplectic_form(dim / 2);
  Eigen::EigenSolver<Eigen::MatrixXd> es(omega * cov, false);
  if (es.info() != Eigen::Success) {
    throw PhysicsError("eigensolve failed in symplectic_spectrum");
  }

  std::vector<double> mags(dim);
  for (int i = 0; i < dim; ++i) {
    mags[i] = std::abs(es.eigenvalues()(i));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());

  // Eigenvalues of Omega*cov come in (+i nu, -i nu) pairs; after sorting by
  // magnitude, adjacent entries belong to the same pair.
  Eigen::VectorXd nus(dim / 2);
  for (int k = 0; k < dim / 2; ++k) {
    const double hi = mags[2 * k];
    const double lo = mags[2 * k + 1];
    if (hi - lo > 1e-6 * std::max(1.0, hi)) {
      throw PhysicsError("symplectic eigenvalues failed to pair up (" +
                         std::to_string(hi) + " vs " + std::to_string(lo) +
                         ")");
    }
    nus(dim / 2 - 1 - k) = 0.5 * (hi + lo);
  }
  return nus;
}

Eigen::MatrixXd partial_transpose(const Eigen::MatrixXd& cov,
                                  const ModeLayout& layout,
                                  const Partition& partition) {
  partition.validate(layout);
  Eigen::VectorXd flip = Eigen::VectorXd::Ones(layout.dim());
  for (const auto& label : partition.side_b) {
    flip(ModeLayout::p_index(layout.index_of(label))) = -1.0;
  }
  return flip.asDiagonal() * cov * flip.asDiagonal();
}

double log_negativity(const GaussianState& s, const Partition& partition,
                      bool validate) {
  if (validate) {
    check_physical_input(s, "log_negativity");
  }
  const Eigen::MatrixXd pt = partial_transpose(s.cov, s.layout, partition);
  const Eigen::VectorXd nus = symplectic_spectrum(pt);
  double en = 0.0;
  for (int k = 0; k < nus.size(); ++k) {
    if (nus(k) < 1.0) {
      en -= std::log(nus(k));
    }
  }
  return en;
}

double thermal_entropy(double nu) {
  if (nu <= 1.0 + 1e-12) {
    return 0.0;
  }
  const double up = 0.5 * (nu + 1.0);
  const double dn = 0.5 * (nu - 1.0);
  return up * std::log(up) - dn * std::log(dn);
}

std::optional<double> entanglement_entropy(
    const GaussianState& s, const std::vector<std::string>& side) {
  if (purity(s) < 1.0 - kPureStateTol) {
    return std::nullopt;
  }
  const GaussianState reduced = reduce_state(s, side);
  const Eigen::VectorXd nus = symplectic_spectrum(reduced.cov);
  double entropy = 0.0;
  for (int k = 0; k < nus.size(); ++k) {
    entropy += thermal_entropy(nus(k));
  }
  return entropy;
}

double purity(const GaussianState& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s.cov);
  if (llt.info() != Eigen::Success) {
    throw PhysicsError("purity: covariance is not positive definite");
  }
  // det cov = prod L_ii^2, accumulated in log space for stability.
  double half_log_det = 0.0;
  const auto& chol = llt.matrixLLT();
  for (int i = 0; i < s.cov.rows(); ++i) {
    half_log_det += std::log(chol(i, i));
  }
  return std::exp(-half_log_det);
}

double eof_symmetric_two_mode(const GaussianState& s, double symmetry_tol) {
  if (s.layout.n_modes() != 2) {
    throw ConfigError("eof_symmetric_two_mode requires exactly two modes");
  }
  Eigen::MatrixXd swapped(4, 4);
  const int perm[4] = {2, 3, 0, 1};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      swapped(i, j) = s.cov(perm[i], perm[j]);
    }
  }
  const double asym = (s.cov - swapped).cwiseAbs().maxCoeff();
  if (asym > symmetry_tol) {
    throw ConfigError(
        "eof_symmetric_two_mode requires an exchange-symmetric state "
        "(asymmetry " +
        std::to_string(asym) + ")");
  }
  check_physical_input(s, "eof_symmetric_two_mode");

  const Eigen::MatrixXd pt = partial_transpose(
      s.cov, s.layout, Partition{{s.layout.labels[0]}, {s.layout.labels[1]}});
  const double nu_min = symplectic_spectrum(pt).minCoeff();
  if (nu_min >= 1.0) {
    return 0.0;
  }
  const double root = std::sqrt(nu_min);
  const double c_plus = 0.25 * std::pow(1.0 / root + root, 2);
  const double c_minus = 0.25 * std::pow(1.0 / root - root, 2);
  double eof = c_plus * std::log(c_plus);
  if (c_minus > 0.0) {
    eof -= c_minus * std::log(c_minus);
  }
  return eof;
}

namespace {

// Shared kernel: returns annihilation-operator second moments; `pairing`
// selects <a_l a_m> over <a_l^+ a_m>.
Eigen::MatrixXcd ladder_moments(const GaussianState& s, bool pairing) {
  const int n = s.layout.n_modes();
  Eigen::MatrixXcd out(n, n);
  for (int l = 0; l < n; ++l) {
    for (int m = 0; m < n; ++m) {
      const double cxx = s.cov(2 * l, 2 * m);
      const double cpp = s.cov(2 * l + 1, 2 * m + 1);
      const double cxp = s.cov(2 * l, 2 * m + 1);
      const double cpx = s.cov(2 * l + 1, 2 * m);
      if (pairing) {
        out(l, m) = 0.25 * std::complex<double>(cxx - cpp, cxp + cpx);
      } else {
        out(l, m) = 0.25 * std::complex<double>(cxx + cpp, cxp - cpx);
        if (l == m) {
          out(l, m) -= 0.5;
        }
      }
    }
  }
  return out;
}

}  // namespace

Eigen::MatrixXcd pairing_correlators(const GaussianState& s) {
  return ladder_moments(s, true);
}

Eigen::MatrixXcd normal_ordered_correlators(const GaussianState& s) {
  return ladder_moments(s, false);
}

EntanglementReport entanglement_report(const GaussianState& s,
                                       const Partition& partition) {
  EntanglementReport report;
  const Eigen::MatrixXd pt = partial_transpose(s.cov, s.layout, partition);
  report.pt_spectrum = symplectic_spectrum(pt);
  report.log_negativity = 0.0;
  for (int k = 0; k < report.pt_spectrum.size(); ++k) {
    if (report.pt_spectrum(k) < 1.0) {
      report.log_negativity -= std::log(report.pt_spectrum(k));
    }
  }
  report.purity = purity(s);
  report.entropy = entanglement_entropy(s, partition.side_a);
  return report;
}

}  // namespace quadsim
