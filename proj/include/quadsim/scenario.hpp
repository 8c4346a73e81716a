#pragma once

#include <map>
#include <string>
#include <vector>

#include "quadsim/integrate.hpp"
#include "quadsim/layout.hpp"

namespace quadsim {

// Two-mode protocol variants:
//   conditional          - continuous collective monitoring, no registers
//   feedforward          - register-mediated adaptive protocol (M windows)
//   dephasing            - collective jump only, no registers, no feedback
//   dissipative_only     - single non-directional engineered jump, one register
//   reservoir_engineered - physical reservoir mode adiabatically mimicking
//                          the single-register adaptive coupling
enum class Variant {
  conditional,
  feedforward,
  dephasing,
  dissipative_only,
  reservoir_engineered,
};

Variant variant_from_string(const std::string& name);  // throws ConfigError
std::string to_string(Variant v);

struct ScenarioParams {
  double gamma = 1.0;        // collective measurement rate; sets the time unit
  double eta = 1.0;          // feedforward gain
  int M = 1;                 // registers per measured operator
  double t_f = 10.0;         // protocol time
  double omega = 0.0;        // staggered-sign oscillator rate
  double delta_omega = 0.0;  // uniform detuning
  int n = 2;                 // number of lattice sites (ring); must be even
  double mu = 1e-8;          // register-readout resolution used by recovery
  double kappa = 100.0;      // engineered-reservoir linewidth
  Variant variant = Variant::conditional;
};

struct BuiltScenario {
  ModeLayout layout;
  Schedule schedule;
  Partition partition;  // default: first system mode against the rest
  std::vector<std::string> system_modes;
  std::vector<std::string> register_modes;  // ascending window order
  ScenarioParams params;
};

// Modes "a", "b" plus registers "c1".."cM" (feedforward), "c1" (dissipative
// only), or "c1" and reservoir "z" (reservoir engineered). Throws ConfigError
// on non-positive rates/times, M < 1 where registers are required, or
// unbounded layouts.
BuiltScenario build_two_mode_scenario(const ScenarioParams& p);

struct LatticeScenario {
  BuiltScenario base;                   // partition: half chain | rest
  std::vector<std::string> site_order;  // ring order, "a1".."an"
  // 1-based bond index j (bond j couples sites j, j+1; bond n wraps) to the
  // register labels "c<j>_<window>" attached to that bond.
  std::map<int, std::vector<std::string>> registers_by_bond;
};

// Ring of n sites with every bond average measured/fed forward. Variants:
// conditional, feedforward. Throws ConfigError for odd or tiny n, M < 1 in
// the feedforward variant, or layouts beyond the size guard.
LatticeScenario build_lattice_scenario(const ScenarioParams& p);

struct BondSpectrum {
  Eigen::VectorXd lambdas;  // eigenvalues of the bond overlap kernel, desc.
  Eigen::MatrixXd basis;    // orthonormal columns matched to lambdas
};

// Normal-mode decomposition of the ring's bond-average coupling pattern;
// eigenvalues are 1 + cos(2 pi k / n) (one exact zero at even n).
BondSpectrum bond_spectrum(int n);

// Log-negativity across every chain cut j = 1..n-1: side A holds sites
// 1..j plus the registers of bonds lying wholly inside it; registers of the
// two cut bonds (j and the wrap-around bond) count toward side B.
std::vector<double> page_curve(
    const GaussianState& s, const std::vector<std::string>& site_order,
    const std::map<int, std::vector<std::string>>& registers_by_bond);

struct Inefficiency {
  std::vector<double> pointwise;  // (e_ref - e_det)/e_ref, with 0/0 -> 0
  double rms;                     // sqrt(mean of (e_ref - e_det)^2)
};

// Pointwise relative shortfall of a deterministic curve against its
// conditional reference, plus the RMS absolute error over the sweep.
Inefficiency inefficiency_metrics(const std::vector<double>& e_ref,
                                  const std::vector<double>& e_det);

// First sampled time from which |de/dt|, averaged over a trailing window of
// the given width, stays below rate_tol; `cap` if that never happens.
double stabilization_time(const std::vector<double>& times,
                          const std::vector<double>& values, double rate_tol,
                          double window, double cap);

}  // namespace quadsim
