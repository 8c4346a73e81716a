#pragma once

#include <cstdint>
#include <vector>

#include "quadsim/generators.hpp"
#include "quadsim/state.hpp"

namespace quadsim {

struct IntegratorConfig {
  double max_step = 1e-3;    // RK4 step bound for the moment equations
  double sde_step = 1e-4;    // Euler-Maruyama step for sampled trajectories
  bool check_physicality = true;  // validate at snapshots/segment boundaries
  double physicality_tol = 1e-7;  // drift allowance on min eig(cov + i Omega)
};

// Raw operator content of a schedule segment, kept alongside the compiled
// generators so that other engines can reconstruct identical dynamics.
struct SegmentOps {
  QuadraticHamiltonian H;
  std::vector<LinearJump> jumps;
  std::vector<MonitoredQuadrature> monitors;
};

struct Segment {
  double duration = 0.0;
  GeneratorSet generators;
  SegmentOps ops;
};

struct Schedule {
  std::vector<Segment> segments;
  double total_time() const;
};

enum class EvolutionMode { unconditional, conditional };

// Fixed-step RK4 on the first/second-moment equations. `unconditional`
// advances mean and covariance; `conditional` advances the deterministic
// measurement-conditioned covariance and leaves the mean untouched (means
// along measurement records are produced by sample_trajectory).
GaussianState evolve_unconditional(GaussianState s, const GeneratorSet& g,
                                   double duration,
                                   const IntegratorConfig& cfg = {});
GaussianState evolve_conditional(GaussianState s, const GeneratorSet& g,
                                 double duration,
                                 const IntegratorConfig& cfg = {});

struct SnapshotSeries {
  std::vector<double> times;
  std::vector<GaussianState> states;
};

// Integrates the schedule segment by segment; integration steps never
// straddle a segment boundary or a requested sample time. Sample times
// outside [0, total] are clamped. Physicality is checked at every snapshot
// and segment boundary when cfg.check_physicality is set (PhysicsError).
SnapshotSeries run_schedule(const GaussianState& initial, const Schedule& sched,
                            EvolutionMode mode,
                            const std::vector<double>& sample_times,
                            const IntegratorConfig& cfg = {});

struct TrajectoryResult {
  std::vector<double> times;
  Eigen::MatrixXd means;    // one row per stored time
  Eigen::MatrixXd records;  // integrated record I_k(t), one column per monitor
};

// Diffusive unraveling of the monitored dynamics on top of the deterministic
// conditional covariance path cov(t):
//   d<r> = (A <r> + drive) dt + sum_k sqrt(rate_k) (cov(t) v_k) dW_k
//   dI_k = 2 sqrt(rate_k) (v_k . <r>) dt + dW_k
// Deterministic per (seed, step); every `keep_every`-th point is stored.
TrajectoryResult sample_trajectory(const GaussianState& initial,
                                   const GeneratorSet& g, double duration,
                                   std::uint64_t seed,
                                   const IntegratorConfig& cfg = {},
                                   int keep_every = 10);

struct EnsembleStats {
  std::vector<double> times;
  Eigen::MatrixXd mean_of_means;  // rows: stored times
  // Sample covariance of the trajectory means at each stored time, doubled to
  // match the vacuum-=-identity covariance normalization (so that
  // cov_uncond = cov_cond + scaled_cov_of_means).
  std::vector<Eigen::MatrixXd> scaled_cov_of_means;
};

// Runs `count` trajectories with seeds base_seed, base_seed+1, ... sharing a
// single precomputed covariance path. Trajectories are computed in parallel
// but reduced in seed order, so the result is bit-identical for any worker
// count.
EnsembleStats sample_trajectory_ensemble(const GaussianState& initial,
                                         const GeneratorSet& g, double duration,
                                         std::uint64_t base_seed, int count,
                                         const IntegratorConfig& cfg = {},
                                         int keep_every = 100, int workers = 0);

}  // namespace quadsim
