#include "quadsim/povm.hpp"

#include <algorithm>
#include <cmath>

#include "quadsim/errors.hpp"

namespace quadsim {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

}  // namespace

PovmResult condition_on_povm(const GaussianState& s, const PovmSpec& p) {
  if (p.mu <= 0.0) {
    throw ConfigError("measurement resolution mu must be positive");
  }
  const int target = s.layout.index_of(p.target_mode);
  const int dim = s.layout.dim();
  const int xt = ModeLayout::x_index(target);
  const int pt = ModeLayout::p_index(target);

  std::vector<int> keep_rows;
  keep_rows.reserve(dim - 2);
  for (int i = 0; i < dim; ++i) {
    if (i != xt && i != pt) {
      keep_rows.push_back(i);
    }
  }
  const int nk = static_cast<int>(keep_rows.size());
  if (nk == 0) {
    throw ConfigError("cannot condition away the only mode of a state");
  }

  Eigen::Matrix2d sigma_c;
  sigma_c << s.cov(xt, xt), s.cov(xt, pt), s.cov(pt, xt), s.cov(pt, pt);
  Eigen::MatrixXd eps(nk, 2);
  Eigen::MatrixXd sigma_s(nk, nk);
  for (int i = 0; i < nk; ++i) {
    eps(i, 0) = s.cov(keep_rows[i], xt);
    eps(i, 1) = s.cov(keep_rows[i], pt);
    for (int j = 0; j < nk; ++j) {
      sigma_s(i, j) = s.cov(keep_rows[i], keep_rows[j]);
    }
  }

  Eigen::Matrix2d kernel = Eigen::Matrix2d::Zero();
  kernel(0, 0) = 1.0 / p.mu;
  kernel(1, 1) = p.mu;

  const Eigen::Matrix2d gain = (sigma_c + kernel).inverse();
  Eigen::MatrixXd cond_cov = sigma_s - eps * gain * eps.transpose();
  cond_cov = ((cond_cov + cond_cov.transpose()) * 0.5).eval();

  const Eigen::Vector2d center(kSqrt2 * p.outcome.real(),
                               kSqrt2 * p.outcome.imag());
  const Eigen::Vector2d prior_mean(s.mean(xt), s.mean(pt));
  const Eigen::VectorXd shift = eps * (gain * (center - prior_mean));

  PovmResult out;
  out.state.layout = s.layout;
  out.state.mean = Eigen::VectorXd::Zero(dim);
  out.state.cov = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < nk; ++i) {
    out.state.mean(keep_rows[i]) = s.mean(keep_rows[i]) + shift(i);
    for (int j = 0; j < nk; ++j) {
      out.state.cov(keep_rows[i], keep_rows[j]) = cond_cov(i, j);
    }
  }
  // The measured mode collapses onto the (pure) measurement kernel centered
  // at the outcome, uncorrelated with everything else.
  out.state.cov(xt, xt) = kernel(0, 0);
  out.state.cov(pt, pt) = kernel(1, 1);
  out.state.mean(xt) = center(0);
  out.state.mean(pt) = center(1);

  for (int m = 0; m < s.layout.n_modes(); ++m) {
    if (m == target) {
      continue;
    }
    // Position of this mode's rows inside keep_rows: modes before the target
    // keep their offset, later ones shift down by one mode.
    const int local = (m < target) ? m : m - 1;
    out.displacements[s.layout.labels[m]] =
        std::complex<double>(shift(2 * local), shift(2 * local + 1)) / kSqrt2;
  }
  return out;
}

GaussianState recover(const GaussianState& s,
                      const std::vector<std::string>& registers, double mu) {
  if (registers.empty()) {
    throw ConfigError("recover needs at least one register to measure");
  }
  GaussianState work = s;
  for (const auto& reg : registers) {
    PovmSpec spec;
    spec.target_mode = reg;
    spec.mu = mu;
    spec.outcome = {0.0, 0.0};
    work = condition_on_povm(work, spec).state;
  }

  std::vector<std::string> kept;
  for (const auto& label : work.layout.labels) {
    if (std::find(registers.begin(), registers.end(), label) ==
        registers.end()) {
      kept.push_back(label);
    }
  }
  GaussianState out = reduce_state(work, kept);
  // The feedback displacement undoes the outcome-conditioned mean kick
  // exactly, so the recovered mean is the input marginal mean.
  const GaussianState marginal = reduce_state(s, kept);
  out.mean = marginal.mean;
  return out;
}

}  // namespace quadsim
