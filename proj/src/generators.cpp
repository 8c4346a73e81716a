#include "quadsim/generators.hpp"

#include <cmath>

#include "quadsim/errors.hpp"

namespace quadsim {

QuadraticHamiltonian QuadraticHamiltonian::zero(int dim) {
  return QuadraticHamiltonian{Eigen::MatrixXd::Zero(dim, dim),
                              Eigen::VectorXd::Zero(dim)};
}

GeneratorSet assemble_generators(
    const QuadraticHamiltonian& H, const std::vector<LinearJump>& jumps,
    const std::vector<MonitoredQuadrature>& monitors) {
  const int dim = static_cast<int>(H.G.rows());
  if (dim == 0 || dim % 2 != 0 || H.G.cols() != dim || H.f.size() != dim) {
    throw ConfigError("Hamiltonian dimensions must be even and consistent");
  }
  const double g_scale = std::max(1.0, H.G.cwiseAbs().maxCoeff());
  if ((H.G - H.G.transpose()).cwiseAbs().maxCoeff() > 1e-12 * g_scale) {
    throw ConfigError("Hamiltonian matrix G must be symmetric");
  }
  for (const auto& jump : jumps) {
    if (jump.c.size() != dim) {
      throw ConfigError("jump operator dimension does not match the layout");
    }
  }

  const Eigen::MatrixXd omega = symplectic_form(dim / 2);
  for (const auto& mon : monitors) {
    if (mon.v.size() != dim) {
      throw ConfigError("monitor dimension does not match the layout");
    }
    if (std::abs(mon.v.norm() - 1.0) > 1e-9) {
      throw ConfigError("monitored quadrature directions must be unit norm");
    }
    if (mon.rate < 0.0) {
      throw ConfigError("monitor rates must be non-negative");
    }
  }
  for (std::size_t j = 0; j < monitors.size(); ++j) {
    for (std::size_t k = j + 1; k < monitors.size(); ++k) {
      const double overlap =
          monitors[j].v.dot(omega * monitors[k].v);
      if (std::abs(overlap) > 1e-10) {
        throw ConfigError(
            "simultaneously monitored quadratures must commute");
      }
    }
  }

  Eigen::MatrixXd imag_sum = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd real_sum = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& jump : jumps) {
    const Eigen::MatrixXcd outer =
        jump.c.conjugate() * jump.c.transpose();
    imag_sum += outer.imag();
    real_sum += outer.real();
  }
  for (const auto& mon : monitors) {
    real_sum += mon.rate * mon.v * mon.v.transpose();
  }

  GeneratorSet out;
  out.dim = dim;
  const Eigen::MatrixXd a_dense = omega * (H.G + imag_sum);
  out.A = a_dense.sparseView(1.0, 1e-300);
  out.A.makeCompressed();
  out.D = 2.0 * omega * real_sum * omega.transpose();
  out.D = ((out.D + out.D.transpose()) * 0.5).eval();
  out.drive = omega * H.f;
  out.monitors = monitors;
  return out;
}

Eigen::VectorXd quadrature_direction(
    const ModeLayout& layout,
    const std::vector<std::pair<std::string, double>>& x_weights,
    const std::vector<std::pair<std::string, double>>& p_weights) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.dim());
  for (const auto& [label, weight] : x_weights) {
    v(ModeLayout::x_index(layout.index_of(label))) += weight;
  }
  for (const auto& [label, weight] : p_weights) {
    v(ModeLayout::p_index(layout.index_of(label))) += weight;
  }
  return v;
}

LinearJump lowering_jump(const ModeLayout& layout, const std::string& mode,
                         double rate) {
  if (rate < 0.0) {
    throw ConfigError("jump rates must be non-negative");
  }
  const int m = layout.index_of(mode);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(layout.dim());
  const double amp = std::sqrt(rate / 2.0);
  c(ModeLayout::x_index(m)) = amp;
  c(ModeLayout::p_index(m)) = std::complex<double>(0.0, amp);
  return LinearJump{c};
}

}  // namespace quadsim
