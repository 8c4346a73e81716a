#include "quadsim/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "quadsim/errors.hpp"
#include "quadsim/rng.hpp"
#include "quadsim/threading.hpp"

namespace quadsim {

double Schedule::total_time() const {
  double total = 0.0;
  for (const auto& seg : segments) {
    total += seg.duration;
  }
  return total;
}

namespace {

// Fixed-step RK4 on the moment equations with preallocated workspace.
class MomentStepper {
 public:
  MomentStepper(const GeneratorSet& g, bool conditional, bool advance_mean)
      : g_(g), conditional_(conditional), advance_mean_(advance_mean) {
    const int dim = g.dim;
    k1_.resize(dim, dim);
    k2_.resize(dim, dim);
    k3_.resize(dim, dim);
    k4_.resize(dim, dim);
    stage_.resize(dim, dim);
    prod_.resize(dim, dim);
    backaction_.resize(dim);
  }

  void step(double h, Eigen::MatrixXd& cov, Eigen::VectorXd& mean) {
    cov_rhs(cov, k1_);
    stage_ = cov + (0.5 * h) * k1_;
    cov_rhs(stage_, k2_);
    stage_ = cov + (0.5 * h) * k2_;
    cov_rhs(stage_, k3_);
    stage_ = cov + h * k3_;
    cov_rhs(stage_, k4_);
    cov += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    cov = ((cov + cov.transpose()) * 0.5).eval();

    if (advance_mean_) {
      const Eigen::VectorXd l1 = g_.A * mean + g_.drive;
      const Eigen::VectorXd l2 =
          g_.A * (mean + (0.5 * h) * l1).eval() + g_.drive;
      const Eigen::VectorXd l3 =
          g_.A * (mean + (0.5 * h) * l2).eval() + g_.drive;
      const Eigen::VectorXd l4 = g_.A * (mean + h * l3).eval() + g_.drive;
      mean += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
    }
  }

  // out <- A cov + cov A^T + D [- backaction]; cov must be symmetric.
  void cov_rhs(const Eigen::MatrixXd& cov, Eigen::MatrixXd& out) {
    prod_.noalias() = g_.A * cov;
    out = prod_ + prod_.transpose();
    out += g_.D;
    if (conditional_) {
      for (const auto& mon : g_.monitors) {
        if (mon.rate <= 0.0) {
          continue;
        }
        backaction_.noalias() = cov * mon.v;
        out.noalias() -=
            (2.0 * mon.rate) * (backaction_ * backaction_.transpose());
      }
    }
  }

 private:
  const GeneratorSet& g_;
  bool conditional_;
  bool advance_mean_;
  Eigen::MatrixXd k1_, k2_, k3_, k4_, stage_, prod_;
  Eigen::VectorXd backaction_;
};

void check_dims(const GaussianState& s, const GeneratorSet& g) {
  if (s.layout.dim() != g.dim || s.cov.rows() != g.dim ||
      s.mean.size() != g.dim) {
    throw ConfigError("state and generators have mismatched dimensions");
  }
}

GaussianState evolve(GaussianState s, const GeneratorSet& g, double duration,
                     const IntegratorConfig& cfg, bool conditional) {
  check_dims(s, g);
  if (duration < 0.0) {
    throw ConfigError("evolution duration must be non-negative");
  }
  if (duration == 0.0) {
    return s;
  }
  const int steps =
      std::max(1, static_cast<int>(std::ceil(duration / cfg.max_step)));
  const double h = duration / steps;
  MomentStepper stepper(g, conditional, /*advance_mean=*/!conditional);
  for (int i = 0; i < steps; ++i) {
    stepper.step(h, s.cov, s.mean);
  }
  return s;
}

}  // namespace

GaussianState evolve_unconditional(GaussianState s, const GeneratorSet& g,
                                   double duration,
                                   const IntegratorConfig& cfg) {
  return evolve(std::move(s), g, duration, cfg, /*conditional=*/false);
}

GaussianState evolve_conditional(GaussianState s, const GeneratorSet& g,
                                 double duration,
                                 const IntegratorConfig& cfg) {
  return evolve(std::move(s), g, duration, cfg, /*conditional=*/true);
}

SnapshotSeries run_schedule(const GaussianState& initial, const Schedule& sched,
                            EvolutionMode mode,
                            const std::vector<double>& sample_times,
                            const IntegratorConfig& cfg) {
  const double total = sched.total_time();
  for (const auto& seg : sched.segments) {
    if (seg.duration < 0.0) {
      throw ConfigError("segment durations must be non-negative");
    }
    check_dims(initial, seg.generators);
  }

  // Landing points: segment boundaries plus (clamped) sample times, deduped.
  std::vector<double> samples;
  samples.reserve(sample_times.size());
  for (double t : sample_times) {
    samples.push_back(std::clamp(t, 0.0, total));
  }
  std::vector<double> sorted_samples = samples;
  std::sort(sorted_samples.begin(), sorted_samples.end());

  const bool conditional = (mode == EvolutionMode::conditional);
  GaussianState state = initial;
  SnapshotSeries out;

  const auto maybe_check = [&](double t) {
    if (!cfg.check_physicality) {
      return;
    }
    const StateDiagnostics diag = validate_state(state);
    if (diag.min_physical_eig < -cfg.physicality_tol) {
      throw PhysicsError("state lost physicality at t=" + std::to_string(t) +
                         " (min eig " +
                         std::to_string(diag.min_physical_eig) + ")");
    }
  };

  // Record snapshots at distinct landing times; expand to the caller's
  // requested order at the end.
  std::vector<double> landing_times;
  std::vector<GaussianState> landing_states;
  const auto land = [&](double t, bool is_sample, bool is_boundary) {
    if (is_sample || is_boundary) {
      maybe_check(t);
    }
    if (is_sample) {
      landing_times.push_back(t);
      landing_states.push_back(state);
    }
  };

  std::size_t next_sample = 0;
  double t_global = 0.0;
  const double time_tol = 1e-12 * std::max(1.0, total);

  // Snapshots requested at t = 0.
  {
    bool sampled_here = false;
    while (next_sample < sorted_samples.size() &&
           sorted_samples[next_sample] <= time_tol) {
      ++next_sample;
      sampled_here = true;
    }
    land(0.0, sampled_here, /*is_boundary=*/true);
  }

  for (const auto& seg : sched.segments) {
    const double seg_end = t_global + seg.duration;
    MomentStepper stepper(seg.generators, conditional,
                          /*advance_mean=*/!conditional);
    double t = t_global;
    while (t < seg_end - time_tol) {
      // Next landing inside this segment: the next sample time or seg end.
      double t_stop = seg_end;
      bool stop_is_sample = false;
      if (next_sample < sorted_samples.size() &&
          sorted_samples[next_sample] < seg_end - time_tol) {
        t_stop = sorted_samples[next_sample];
        stop_is_sample = true;
      }
      const double span = t_stop - t;
      if (span > time_tol) {
        const int steps =
            std::max(1, static_cast<int>(std::ceil(span / cfg.max_step)));
        const double h = span / steps;
        for (int i = 0; i < steps; ++i) {
          stepper.step(h, state.cov, state.mean);
        }
      }
      t = t_stop;
      if (stop_is_sample) {
        bool sampled_here = false;
        while (next_sample < sorted_samples.size() &&
               sorted_samples[next_sample] <= t + time_tol) {
          ++next_sample;
          sampled_here = true;
        }
        land(t, sampled_here, /*is_boundary=*/false);
      }
    }
    t_global = seg_end;
    // Segment boundary (and possibly a sample time exactly here).
    bool sampled_here = false;
    while (next_sample < sorted_samples.size() &&
           sorted_samples[next_sample] <= t_global + time_tol) {
      ++next_sample;
      sampled_here = true;
    }
    land(t_global, sampled_here, /*is_boundary=*/true);
  }

  // Expand distinct landing snapshots back to the caller's request order.
  out.times.reserve(sample_times.size());
  out.states.reserve(sample_times.size());
  for (double t_req : sample_times) {
    const double t = std::clamp(t_req, 0.0, total);
    // Find the landing with the closest time (they were clamped/deduped).
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < landing_times.size(); ++i) {
      const double err = std::abs(landing_times[i] - t);
      if (err < best_err) {
        best_err = err;
        best = i;
      }
    }
    if (landing_times.empty() || best_err > 1e-9 * std::max(1.0, total)) {
      throw PhysicsError("internal error: snapshot time was not landed on");
    }
    // Report the caller's time when the clamp only absorbed accumulated
    // segment-duration roundoff; report the clamped time for genuine
    // out-of-range requests.
    const bool roundoff_only =
        std::abs(t_req - t) <= 1e-9 * std::max(1.0, std::abs(t_req));
    out.times.push_back(roundoff_only ? t_req : t);
    out.states.push_back(landing_states[best]);
  }
  return out;
}

TrajectoryResult sample_trajectory(const GaussianState& initial,
                                   const GeneratorSet& g, double duration,
                                   std::uint64_t seed,
                                   const IntegratorConfig& cfg,
                                   int keep_every) {
  check_dims(initial, g);
  if (duration <= 0.0) {
    throw ConfigError("trajectory duration must be positive");
  }
  if (keep_every < 1) {
    throw ConfigError("keep_every must be at least 1");
  }
  const int n_mon = static_cast<int>(g.monitors.size());
  const int steps =
      std::max(1, static_cast<int>(std::ceil(duration / cfg.sde_step)));
  const double h = duration / steps;
  const double sqrt_h = std::sqrt(h);

  // Deterministic conditional covariance path; only cov(t) v_k is needed.
  MomentStepper cov_stepper(g, /*conditional=*/true, /*advance_mean=*/false);
  Eigen::MatrixXd cov = initial.cov;
  Eigen::VectorXd unused_mean = initial.mean;

  NormalStream rng(seed);
  Eigen::VectorXd mean = initial.mean;
  Eigen::VectorXd record = Eigen::VectorXd::Zero(n_mon);

  TrajectoryResult out;
  const int stored = steps / keep_every + 1 + (steps % keep_every != 0);
  out.times.reserve(stored);
  out.means.resize(stored, g.dim);
  out.records.resize(stored, n_mon);

  int row = 0;
  const auto store = [&](double t) {
    out.times.push_back(t);
    out.means.row(row) = mean.transpose();
    out.records.row(row) = record.transpose();
    ++row;
  };
  store(0.0);

  Eigen::VectorXd drift(g.dim);
  for (int i = 0; i < steps; ++i) {
    drift.noalias() = g.A * mean;
    drift += g.drive;
    Eigen::VectorXd new_mean = mean + h * drift;
    for (int k = 0; k < n_mon; ++k) {
      const auto& mon = g.monitors[k];
      const double dw = sqrt_h * rng.next();
      const double root_rate = std::sqrt(mon.rate);
      new_mean.noalias() += (root_rate * dw) * (cov * mon.v);
      record(k) += 2.0 * root_rate * mon.v.dot(mean) * h + dw;
    }
    mean.swap(new_mean);
    cov_stepper.step(h, cov, unused_mean);
    if ((i + 1) % keep_every == 0 || i + 1 == steps) {
      store((i + 1) * h);
    }
  }
  out.means.conservativeResize(row, Eigen::NoChange);
  out.records.conservativeResize(row, Eigen::NoChange);
  return out;
}

EnsembleStats sample_trajectory_ensemble(const GaussianState& initial,
                                         const GeneratorSet& g, double duration,
                                         std::uint64_t base_seed, int count,
                                         const IntegratorConfig& cfg,
                                         int keep_every, int workers) {
  check_dims(initial, g);
  if (count < 2) {
    throw ConfigError("ensemble needs at least two trajectories");
  }
  if (duration <= 0.0 || keep_every < 1) {
    throw ConfigError("invalid ensemble parameters");
  }
  const int n_mon = static_cast<int>(g.monitors.size());
  const int steps =
      std::max(1, static_cast<int>(std::ceil(duration / cfg.sde_step)));
  const double h = duration / steps;
  const double sqrt_h = std::sqrt(h);

  // Shared covariance path: precompute sqrt(rate_k) * cov(t) v_k per step.
  std::vector<Eigen::MatrixXd> kick(steps);  // dim x n_mon at step start
  {
    MomentStepper cov_stepper(g, /*conditional=*/true, /*advance_mean=*/false);
    Eigen::MatrixXd cov = initial.cov;
    Eigen::VectorXd unused_mean = initial.mean;
    for (int i = 0; i < steps; ++i) {
      kick[i].resize(g.dim, n_mon);
      for (int k = 0; k < n_mon; ++k) {
        kick[i].col(k) = std::sqrt(g.monitors[k].rate) * (cov * g.monitors[k].v);
      }
      cov_stepper.step(h, cov, unused_mean);
    }
  }

  std::vector<int> stored_steps;
  for (int i = 0; i <= steps; ++i) {
    if (i % keep_every == 0 || i == steps) {
      stored_steps.push_back(i);
    }
  }
  const int n_stored = static_cast<int>(stored_steps.size());

  EnsembleStats out;
  out.times.resize(n_stored);
  for (int j = 0; j < n_stored; ++j) {
    out.times[j] = stored_steps[j] * h;
  }

  std::vector<Eigen::VectorXd> sum_mean(
      n_stored, Eigen::VectorXd::Zero(g.dim));
  std::vector<Eigen::MatrixXd> sum_outer(
      n_stored, Eigen::MatrixXd::Zero(g.dim, g.dim));

  // Trajectories run in parallel chunks but are reduced strictly in seed
  // order, so the result does not depend on the worker count.
  const int chunk = 64;
  std::vector<Eigen::MatrixXd> buffer(chunk);
  for (int start = 0; start < count; start += chunk) {
    const int batch = std::min(chunk, count - start);
    parallel_for(batch, workers, [&](int b) {
      NormalStream rng(base_seed + static_cast<std::uint64_t>(start + b));
      Eigen::VectorXd mean = initial.mean;
      Eigen::MatrixXd& rows = buffer[b];
      rows.resize(n_stored, g.dim);
      int next_store = 0;
      if (stored_steps[0] == 0) {
        rows.row(0) = mean.transpose();
        next_store = 1;
      }
      Eigen::VectorXd drift(g.dim);
      for (int i = 0; i < steps; ++i) {
        drift.noalias() = g.A * mean;
        drift += g.drive;
        mean += h * drift;
        for (int k = 0; k < n_mon; ++k) {
          mean.noalias() += (sqrt_h * rng.next()) * kick[i].col(k);
        }
        if (next_store < n_stored && stored_steps[next_store] == i + 1) {
          rows.row(next_store) = mean.transpose();
          ++next_store;
        }
      }
    });
    for (int b = 0; b < batch; ++b) {
      for (int j = 0; j < n_stored; ++j) {
        const Eigen::VectorXd m = buffer[b].row(j).transpose();
        sum_mean[j] += m;
        sum_outer[j].noalias() += m * m.transpose();
      }
    }
  }

  out.mean_of_means.resize(n_stored, g.dim);
  out.scaled_cov_of_means.resize(n_stored);
  for (int j = 0; j < n_stored; ++j) {
    const Eigen::VectorXd mbar = sum_mean[j] / count;
    out.mean_of_means.row(j) = mbar.transpose();
    Eigen::MatrixXd cov_sample =
        (sum_outer[j] - count * (mbar * mbar.transpose())) / (count - 1.0);
    // Factor 2: statistical covariance expressed in the vacuum-=-identity
    // second-moment normalization.
    out.scaled_cov_of_means[j] = 2.0 * cov_sample;
  }
  return out;
}

}  // namespace quadsim
