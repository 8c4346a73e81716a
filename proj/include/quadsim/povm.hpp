#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "quadsim/state.hpp"

namespace quadsim {

// Finite-resolution Gaussian measurement of a single mode. The measurement
// kernel has covariance V_mu = diag(1/mu, mu) in the target mode's (x, p), so
// mu -> 0 approaches a sharp projection onto the momentum quadrature and
// mu = 1 is a vacuum-resolution (heterodyne-like) readout.
struct PovmSpec {
  std::string target_mode;
  double mu = 1.0;
  // Outcome amplitude zeta; the kernel is centered at
  // (x, p) = sqrt(2) (Re zeta, Im zeta).
  std::complex<double> outcome{0.0, 0.0};
};

struct PovmResult {
  // Same layout as the input; the target mode is reset to the measurement
  // kernel state (covariance V_mu, mean at the outcome center) and the other
  // modes carry the conditioned moments.
  GaussianState state;
  // Outcome-induced mean offset of each remaining mode as a complex amplitude
  // (mean_x + i mean_p)/sqrt(2). Displacing a mode by the negative of its
  // amplitude maps the conditioned state onto the zeta = 0 one.
  std::map<std::string, std::complex<double>> displacements;
};

// Gaussian conditioning of the state on the measurement outcome. The
// conditional covariance of the remaining modes is independent of zeta.
PovmResult condition_on_povm(const GaussianState& s, const PovmSpec& p);

// Measures every listed register at outcome zeta = 0 with resolution mu
// (sequentially; the order does not matter) and returns the marginal state of
// the remaining modes, with the outcome-conditioned displacements undone so
// the result is the deterministic recovered state.
GaussianState recover(const GaussianState& s,
                      const std::vector<std::string>& registers, double mu);

}  // namespace quadsim
