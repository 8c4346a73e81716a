// Release gate for the toolkit. Each criterion exercises one headline
// behavior end to end through the public library API and prints exactly one
// PASS/FAIL line with its measured numbers; the process exit code is the
// number of failed criteria. Tolerances are fixed here and are not tunable
// from the command line.
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "oracles.hpp"
#include "quadsim/dense.hpp"
#include "quadsim/measures.hpp"
#include "quadsim/povm.hpp"
#include "quadsim/scenario.hpp"
#include "quadsim/state.hpp"

namespace {

using namespace quadsim;

constexpr double kLn2 = 0.6931471805599453;

struct CheckResult {
  bool pass = true;
  std::string failures;  // accumulated failed clauses
  std::string summary;   // headline numbers, shown either way
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

void expect(CheckResult& r, bool ok, const std::string& clause) {
  if (!ok) {
    r.pass = false;
    if (!r.failures.empty()) {
      r.failures += "; ";
    }
    r.failures += clause;
  }
}

SnapshotSeries run_scenario(const BuiltScenario& sc, EvolutionMode mode,
                            const std::vector<double>& samples) {
  return run_schedule(vacuum_state(sc.layout), sc.schedule, mode, samples);
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

// Log-negativity of a two-mode protocol's unconditional run at each of the
// given times, across the scenario's own partition.
std::vector<double> en_series(const BuiltScenario& sc, EvolutionMode mode,
                              const std::vector<double>& samples) {
  const SnapshotSeries series = run_scenario(sc, mode, samples);
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out[i] = log_negativity(series.states[i], sc.partition);
  }
  return out;
}

// --------------------------------------------------------------------------
// 1. Continuous collective monitoring grows entanglement as (1/2)ln(1+2gt),
//    with the whole 0..100 sweep finishing inside one second.
// --------------------------------------------------------------------------
CheckResult conditional_growth_law() {
  CheckResult r;
  const auto start = std::chrono::steady_clock::now();
  ScenarioParams p;
  p.variant = Variant::conditional;
  p.t_f = 100.0;
  const BuiltScenario sc = build_two_mode_scenario(p);
  std::vector<double> samples;
  for (int k = 0; k <= 200; ++k) {
    samples.push_back(0.5 * k);
  }
  const SnapshotSeries series =
      run_scenario(sc, EvolutionMode::conditional, samples);
  double max_err = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double en = log_negativity(series.states[i], sc.partition);
    max_err = std::max(
        max_err, std::abs(en - oracles::conditional_log_negativity(samples[i])));
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  expect(r, max_err < 1e-6, "max error " + num(max_err) + " >= 1e-6");
  expect(r, seconds < 1.0, "runtime " + num(seconds) + " s >= 1 s");
  r.summary = "max err " + num(max_err) + ", " + num(seconds) + " s";
  return r;
}

// --------------------------------------------------------------------------
// 2. The monitored mode's marginal symplectic eigenvalue follows
//    (1+gt)/sqrt(1+2gt).
// --------------------------------------------------------------------------
CheckResult marginal_symplectic_eigenvalue() {
  CheckResult r;
  ScenarioParams p;
  p.variant = Variant::conditional;
  p.t_f = 10.0;
  const BuiltScenario sc = build_two_mode_scenario(p);
  const std::vector<double> samples = {0.0, 1.0, 10.0};
  const SnapshotSeries series =
      run_scenario(sc, EvolutionMode::conditional, samples);
  double max_err = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GaussianState marginal = reduce_state(series.states[i], {"a"});
    const Eigen::VectorXd nus = symplectic_spectrum(marginal.cov);
    max_err = std::max(
        max_err,
        std::abs(nus(0) - oracles::conditional_marginal_nu(samples[i])));
  }
  expect(r, max_err <= 1e-8, "max error " + num(max_err) + " > 1e-8");
  r.summary = "max err " + num(max_err) + " at gt in {0,1,10}";
  return r;
}

// --------------------------------------------------------------------------
// 3. The single-window adaptive protocol's unconditional covariance matches
//    its closed form entry by entry (six characteristic entries plus vacuum
//    everywhere else).
// --------------------------------------------------------------------------
CheckResult single_window_covariance() {
  CheckResult r;
  double max_dev = 0.0;
  for (const double T : {0.5, 1.0, 5.0}) {
    ScenarioParams p;
    p.variant = Variant::feedforward;
    p.M = 1;
    p.eta = 1.0;
    p.t_f = T;
    const BuiltScenario sc = build_two_mode_scenario(p);
    const SnapshotSeries series =
        run_scenario(sc, EvolutionMode::unconditional, {T});
    const Eigen::MatrixXd target = oracles::feedforward_cov(T, 1.0);
    max_dev = std::max(
        max_dev, (series.states[0].cov - target).cwiseAbs().maxCoeff());
  }
  expect(r, max_dev < 1e-6, "max entry deviation " + num(max_dev) + " >= 1e-6");
  r.summary = "max entry dev " + num(max_dev) + " over gt in {0.5,1,5}";
  return r;
}

// --------------------------------------------------------------------------
// 4. Mirror fidelity: the single-register protocol recovers at least 95% of
//    the conditional entanglement by gt=100, and a stronger feedforward gain
//    shrinks the shortfall at every sampled time.
// --------------------------------------------------------------------------
CheckResult mirror_fidelity() {
  CheckResult r;
  std::vector<double> samples;
  for (int k = 1; k <= 20; ++k) {
    samples.push_back(0.5 * k);
  }
  samples.push_back(100.0);

  ScenarioParams p;
  p.variant = Variant::conditional;
  p.t_f = 100.0;
  const std::vector<double> cond =
      en_series(build_two_mode_scenario(p), EvolutionMode::conditional, samples);

  p.variant = Variant::feedforward;
  p.M = 1;
  p.eta = 1.0;
  const std::vector<double> det1 =
      en_series(build_two_mode_scenario(p), EvolutionMode::unconditional,
                samples);
  p.eta = 5.0;
  const std::vector<double> det5 =
      en_series(build_two_mode_scenario(p), EvolutionMode::unconditional,
                samples);

  const double ratio = det1.back() / cond.back();
  expect(r, ratio >= 0.95, "E_N ratio at gt=100 " + num(ratio) + " < 0.95");
  bool ordered = true;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double ineff1 = (cond[i] - det1[i]) / cond[i];
    const double ineff5 = (cond[i] - det5[i]) / cond[i];
    if (!(ineff5 < ineff1)) {
      ordered = false;
      expect(r, false,
             "inefficiency not reduced by larger gain at gt=" +
                 num(samples[i]));
      break;
    }
  }
  r.summary = "ratio " + num(ratio) + " at gt=100, gain ordering " +
              (ordered ? "strict at all " + num(samples.size()) + " times"
                       : "violated");
  return r;
}

// --------------------------------------------------------------------------
// 5. Directionality: the system marginal of the adaptive run is exactly the
//    no-feedback collective-jump evolution, and that marginal is unentangled.
// --------------------------------------------------------------------------
CheckResult directional_invariant() {
  CheckResult r;
  const std::vector<double> samples = {0.5, 1.0, 2.0, 5.0, 10.0};
  ScenarioParams p;
  p.variant = Variant::feedforward;
  p.M = 3;
  p.eta = 1.5;
  p.t_f = 10.0;
  const SnapshotSeries det = run_scenario(build_two_mode_scenario(p),
                                          EvolutionMode::unconditional, samples);
  p.variant = Variant::dephasing;
  const BuiltScenario deph_sc = build_two_mode_scenario(p);
  const SnapshotSeries deph =
      run_scenario(deph_sc, EvolutionMode::unconditional, samples);

  double max_dev = 0.0;
  double max_en = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GaussianState marginal = reduce_state(det.states[i], {"a", "b"});
    max_dev = std::max(
        max_dev, (marginal.cov - deph.states[i].cov).cwiseAbs().maxCoeff());
    max_en =
        std::max(max_en, log_negativity(deph.states[i], deph_sc.partition));
  }
  expect(r, max_dev <= 1e-8, "marginal deviation " + num(max_dev) + " > 1e-8");
  expect(r, max_en <= 1e-10,
         "unconditioned marginal E_N " + num(max_en) + " > 1e-10");
  r.summary =
      "marginal dev " + num(max_dev) + ", marginal E_N " + num(max_en);
  return r;
}

// --------------------------------------------------------------------------
// 6. Register readout recovery: sharp readout at gt=10 restores a nearly
//    pure, nearly conditional-strength entangled pair; vacuum-resolution
//    readout halves the growth slope; the recovered covariance is outcome
//    independent.
// --------------------------------------------------------------------------
CheckResult register_recovery() {
  CheckResult r;
  ScenarioParams p;
  p.variant = Variant::feedforward;
  p.M = 1;
  p.eta = 1.0;
  p.t_f = 10.0;
  const BuiltScenario sc = build_two_mode_scenario(p);
  const SnapshotSeries series =
      run_scenario(sc, EvolutionMode::unconditional, {10.0});
  const GaussianState& full = series.states[0];

  const GaussianState sharp = recover(full, {"c1"}, 1e-8);
  const double pur = purity(sharp);
  const double en = log_negativity(
      sharp, Partition::against_rest(sharp.layout, {"a"}));
  const double target = oracles::conditional_log_negativity(10.0);
  expect(r, pur > 0.95, "recovered purity " + num(pur) + " <= 0.95");
  expect(r, std::abs(en - target) <= 0.1 * target,
         "recovered E_N " + num(en) + " not within 10% of " + num(target));

  // Vacuum-resolution readout: E_N grows as (1/2)ln(gt) at late times.
  std::vector<double> lnts, ens;
  for (int T = 20; T <= 100; T += 10) {
    ScenarioParams q = p;
    q.t_f = T;
    const SnapshotSeries s = run_scenario(build_two_mode_scenario(q),
                                          EvolutionMode::unconditional,
                                          {static_cast<double>(T)});
    const GaussianState rec = recover(s.states[0], {"c1"}, 1.0);
    lnts.push_back(std::log(static_cast<double>(T)));
    ens.push_back(
        log_negativity(rec, Partition::against_rest(rec.layout, {"a"})));
  }
  const double slope = lsq_slope(lnts, ens);
  expect(r, slope >= 0.45 && slope <= 0.55,
         "vacuum-resolution slope " + num(slope) + " outside 0.5 +- 0.05");

  // Outcome independence of the conditioned covariance.
  PovmSpec spec;
  spec.target_mode = "c1";
  spec.mu = 1e-8;
  spec.outcome = {0.0, 0.0};
  const Eigen::MatrixXd cov0 = condition_on_povm(full, spec).state.cov;
  spec.outcome = {0.7, -0.3};
  const Eigen::MatrixXd cov1 = condition_on_povm(full, spec).state.cov;
  const double zeta_dev = (cov0 - cov1).cwiseAbs().maxCoeff();
  expect(r, zeta_dev <= 1e-10,
         "outcome-dependent covariance, dev " + num(zeta_dev));

  r.summary = "purity " + num(pur) + ", E_N " + num(en) + " (target " +
              num(target) + "), slope " + num(slope) + ", outcome dev " +
              num(zeta_dev);
  return r;
}

// --------------------------------------------------------------------------
// 7. Detuning response: the fixed-time entanglement peaks at zero detuning,
//    the matched-frequency point doubles the late-time growth slope, full
//    detuning kills the entanglement at late times, and the windowed
//    adaptive protocol tracks the whole sweep with register-count
//    convergence.
// --------------------------------------------------------------------------
CheckResult detuning_response() {
  CheckResult r;
  const double omega = 1.2;
  const int n_sweep = 16;  // delta_omega = 0, 0.1, ..., 1.5

  std::vector<double> cond(n_sweep);
  std::vector<std::vector<double>> det(4);  // M = 5, 10, 15, 20
  const int m_values[4] = {5, 10, 15, 20};
  for (int k = 0; k < n_sweep; ++k) {
    ScenarioParams p;
    p.variant = Variant::conditional;
    p.omega = omega;
    p.delta_omega = 0.1 * k;
    p.t_f = 10.0;
    cond[k] = en_series(build_two_mode_scenario(p), EvolutionMode::conditional,
                        {10.0})[0];
    for (int m = 0; m < 4; ++m) {
      ScenarioParams q = p;
      q.variant = Variant::feedforward;
      q.M = m_values[m];
      q.eta = 5.0;
      det[m].push_back(en_series(build_two_mode_scenario(q),
                                 EvolutionMode::unconditional, {10.0})[0]);
    }
  }

  bool peak_at_zero = true;
  for (int k = 1; k < n_sweep; ++k) {
    peak_at_zero = peak_at_zero && cond[0] > cond[k];
  }
  expect(r, peak_at_zero, "fixed-time sweep does not peak at zero detuning");

  double track_dev = 0.0;
  for (int k = 0; k < n_sweep; ++k) {
    track_dev = std::max(track_dev, std::abs(det[3][k] - cond[k]));
  }
  expect(r, track_dev < 0.1,
         "20-register tracking deviation " + num(track_dev) + " >= 0.1");

  double rms[4];
  for (int m = 0; m < 4; ++m) {
    double acc = 0.0;
    for (int k = 0; k < n_sweep; ++k) {
      const double d = cond[k] - det[m][k];
      acc += d * d;
    }
    rms[m] = std::sqrt(acc / n_sweep);
  }
  expect(r, rms[0] > rms[1] && rms[1] > rms[2] && rms[2] > rms[3],
         "sweep RMS not strictly decreasing in register count (" + num(rms[0]) +
             ", " + num(rms[1]) + ", " + num(rms[2]) + ", " + num(rms[3]) +
             ")");

  // Late-time growth slopes: matched frequencies double the log-law rate.
  std::vector<double> lnts, en_matched, en_plain;
  for (int T = 20; T <= 100; T += 10) {
    lnts.push_back(std::log(static_cast<double>(T)));
    ScenarioParams p;
    p.variant = Variant::conditional;
    p.t_f = 100.0;
    p.omega = omega;
    en_matched.push_back(en_series(build_two_mode_scenario(p),
                                   EvolutionMode::conditional,
                                   {static_cast<double>(T)})[0]);
    p.omega = 0.0;
    en_plain.push_back(en_series(build_two_mode_scenario(p),
                                 EvolutionMode::conditional,
                                 {static_cast<double>(T)})[0]);
  }
  const double slope_ratio =
      lsq_slope(lnts, en_matched) / lsq_slope(lnts, en_plain);
  expect(r, slope_ratio >= 1.8 && slope_ratio <= 2.2,
         "slope ratio " + num(slope_ratio) + " outside 2 +- 0.2");

  // Full detuning: by gt=50 the entanglement has fallen an order of
  // magnitude below the sweep's zero-detuning peak value.
  ScenarioParams p;
  p.variant = Variant::conditional;
  p.omega = omega;
  p.delta_omega = omega;
  p.t_f = 50.0;
  std::vector<double> fine;
  for (int k = 0; k <= 1000; ++k) {
    fine.push_back(0.05 * k);
  }
  const std::vector<double> decay = en_series(
      build_two_mode_scenario(p), EvolutionMode::conditional, fine);
  double own_peak = 0.0;
  for (const double v : decay) {
    own_peak = std::max(own_peak, v);
  }
  const double late = decay.back();
  expect(r, late < 0.1 * cond[0],
         "matched-detuning E_N(50) " + num(late) + " >= 0.1 x sweep peak " +
             num(cond[0]));

  r.summary = "peak at 0, track dev " + num(track_dev) + ", RMS " +
              num(rms[0]) + ">" + num(rms[1]) + ">" + num(rms[2]) + ">" +
              num(rms[3]) + ", slope ratio " + num(slope_ratio) +
              ", decay frac " + num(late / cond[0]) + " of sweep peak (" +
              num(late / own_peak) + " of own peak)";
  return r;
}

// --------------------------------------------------------------------------
// 8. Ring lattice: the adaptive protocol reproduces the conditional
//    entanglement page curve in both the unbounded-growth and the stabilized
//    regime (the latter found by the stopping rule), and the bond kernel has
//    the expected normal-mode spectrum.
// --------------------------------------------------------------------------
CheckResult lattice_page_curves() {
  CheckResult r;
  const double cap = 50.0;
  double t_stars[2];
  double page_devs[2];
  const double detunings[2] = {0.0, 0.3};
  for (int regime = 0; regime < 2; ++regime) {
    ScenarioParams p;
    p.variant = Variant::conditional;
    p.n = 8;
    p.delta_omega = detunings[regime];
    p.t_f = cap;
    const LatticeScenario cond = build_lattice_scenario(p);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) {
      grid.push_back(0.25 * k);
    }
    const SnapshotSeries series =
        run_schedule(vacuum_state(cond.base.layout), cond.base.schedule,
                     EvolutionMode::conditional, grid);
    std::vector<double> half_en(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      half_en[i] = log_negativity(series.states[i], cond.base.partition,
                                  /*validate=*/false);
    }
    const double t_star = stabilization_time(grid, half_en, 1e-3, 1.0, cap);
    t_stars[regime] = t_star;
    std::size_t at = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i] - t_star) < std::abs(grid[at] - t_star)) {
        at = i;
      }
    }
    const std::vector<double> page_cond = page_curve(
        series.states[at], cond.site_order, cond.registers_by_bond);

    ScenarioParams q = p;
    q.variant = Variant::feedforward;
    q.M = 10;
    q.eta = 5.0;
    q.t_f = t_star;
    const LatticeScenario det = build_lattice_scenario(q);
    const SnapshotSeries det_series =
        run_schedule(vacuum_state(det.base.layout), det.base.schedule,
                     EvolutionMode::unconditional, {t_star});
    const std::vector<double> page_det = page_curve(
        det_series.states[0], det.site_order, det.registers_by_bond);

    double dev = 0.0;
    for (std::size_t c = 0; c < page_cond.size(); ++c) {
      dev = std::max(dev, std::abs(page_cond[c] - page_det[c]));
    }
    page_devs[regime] = dev;
    expect(r, dev <= 0.15,
           "page-curve deviation " + num(dev) + " > 0.15 at detuning " +
               num(detunings[regime]));
  }
  expect(r, t_stars[0] >= cap - 1e-9,
         "undetuned ring stabilized at " + num(t_stars[0]) +
             " despite unbounded growth");
  expect(r, t_stars[1] <= 25.0,
         "detuned ring not stabilized by the stopping rule (t* " +
             num(t_stars[1]) + ")");

  const BondSpectrum spec = bond_spectrum(4);
  const Eigen::Vector4d expected(2.0, 1.0, 1.0, 0.0);
  const double spec_dev = (spec.lambdas - expected).cwiseAbs().maxCoeff();
  expect(r, spec_dev <= 1e-9,
         "bond kernel spectrum deviates by " + num(spec_dev));

  r.summary = "page dev " + num(page_devs[0]) + " (open growth, t*=" +
              num(t_stars[0]) + ") / " + num(page_devs[1]) + " (stabilized, t*=" +
              num(t_stars[1]) + "), kernel spectrum dev " + num(spec_dev);
  return r;
}

// --------------------------------------------------------------------------
// 9. Cross-engine bridge: a truncated Fock-space rerun of the Gaussian
//    schedules reproduces log-negativity on both runs and second moments on
//    the no-feedback run, whose Fock ladder stays cold at every mode. The
//    adaptive run keeps a driven register mode whose truncation tail leaks
//    ~(2n+1)x(top population) into its own p-variance, so it binds E_N plus
//    the truncation-leak guard (top population <= 1e-4); its raw moment
//    deviation is reported alongside.
// --------------------------------------------------------------------------
CheckResult cross_engine_bridge() {
  CheckResult r;
  const std::vector<double> samples = {0.1, 0.2, 0.3};
  ScenarioParams p;
  p.variant = Variant::feedforward;
  p.M = 1;
  p.eta = 1.0;
  p.t_f = 0.3;
  const dense::OracleReport ff =
      dense::oracle_compare(build_two_mode_scenario(p), 10, 0.3, samples);
  p.variant = Variant::dephasing;
  const dense::OracleReport deph =
      dense::oracle_compare(build_two_mode_scenario(p), 10, 0.3, samples);

  expect(r, ff.max_abs_en_error < 2e-2,
         "adaptive-run E_N error " + num(ff.max_abs_en_error) + " >= 2e-2");
  expect(r, !ff.truncation_warning,
         "adaptive-run truncation leak: top population " +
             num(ff.max_top_population) + " > 1e-4");
  expect(r, deph.max_abs_en_error < 2e-2,
         "no-feedback E_N error " + num(deph.max_abs_en_error) + " >= 2e-2");
  expect(r, deph.max_moment_error < 1e-4,
         "no-feedback moment error " + num(deph.max_moment_error) + " >= 1e-4");
  r.summary = "adaptive E_N/moment err " + num(ff.max_abs_en_error) + "/" +
              num(ff.max_moment_error) + " (top pop " +
              num(ff.max_top_population) + "), no-feedback " +
              num(deph.max_abs_en_error) + "/" + num(deph.max_moment_error);
  return r;
}

// --------------------------------------------------------------------------
// 10. Finite registers: qudit-register curves rise, peak and decay with
//     dimension-ordered peaks; short-time entanglement is monotone in the
//     feedforward gain; the trajectory average of the monitored pair
//     upper-bounds the d=7 deterministic curve. The saturation-level check
//     against ln 2 is retained even though the trajectory average provably
//     plateaus at ln2/2 (the entangling branch carries Born weight 1/2), so
//     this criterion reports its measured maximum and fails honestly.
// --------------------------------------------------------------------------
CheckResult finite_register_curves() {
  CheckResult r;
  using namespace quadsim::dense;

  const double w2 = 0.7;
  std::vector<double> grid;
  for (int k = 1; k <= 80; ++k) {
    grid.push_back(0.1 * k);
  }

  std::vector<double> peak_vals, peak_times, d7_curve;
  for (int d = 2; d <= 7; ++d) {
    HilbertSpec space{{2, 2, d}};
    const DenseOperator sig =
        std::complex<double>(0.5, 0.0) *
        (pauli(space, 0, 'x') +
         std::complex<double>(w2, 0.0) * pauli(space, 1, 'x'));
    const DenseOperator f_op = truncated_x(space, 2);
    const DenseOperator h = std::complex<double>(1.0, 0.0) * (sig * f_op);
    const DenseOperator jump =
        std::complex<double>(1.0, 0.0) *
        (sig + std::complex<double>(0.0, -1.0) * f_op);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.total());
    psi(3 * d) = 1.0;  // both qubits down, empty register
    const DenseSeries series =
        run_lindblad(DenseState::pure(space, psi), h, {jump}, 8.0, grid);
    std::vector<double> en(grid.size());
    std::size_t peak = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      en[i] = dense_log_negativity(series.states[i], {0});
      if (en[i] > en[peak]) {
        peak = i;
      }
    }
    expect(r, peak > 0 && peak + 1 < grid.size(),
           "d=" + std::to_string(d) + " curve has no interior peak");
    expect(r, en.front() < en[peak] && en.back() < 0.5 * en[peak],
           "d=" + std::to_string(d) + " curve does not rise and decay");
    peak_vals.push_back(en[peak]);
    peak_times.push_back(grid[peak]);
    if (d == 7) {
      d7_curve = en;
    }
  }
  for (std::size_t i = 1; i < peak_vals.size(); ++i) {
    expect(r, peak_vals[i] >= peak_vals[i - 1] - 1e-9,
           "peak height decreases from d=" + std::to_string(i + 1));
    expect(r, peak_times[i] >= peak_times[i - 1] - 1e-9,
           "peak time decreases from d=" + std::to_string(i + 1));
  }

  // Short-time gain monotonicity with a register large enough that its
  // dynamic range does not saturate at the strongest gain.
  std::vector<double> short_en;
  for (const double eta : {0.5, 1.0, 2.0, 5.0}) {
    HilbertSpec space{{2, 2, 14}};
    const DenseOperator sig =
        std::complex<double>(0.5, 0.0) *
        (pauli(space, 0, 'x') +
         std::complex<double>(w2, 0.0) * pauli(space, 1, 'x'));
    const DenseOperator f_op = truncated_x(space, 2);
    const DenseOperator h = std::complex<double>(eta, 0.0) * (sig * f_op);
    const DenseOperator jump =
        std::complex<double>(1.0, 0.0) *
        (sig + std::complex<double>(0.0, -eta) * f_op);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.total());
    psi(3 * 14) = 1.0;
    const DenseSeries s =
        run_lindblad(DenseState::pure(space, psi), h, {jump}, 0.1, {0.1});
    short_en.push_back(dense_log_negativity(s.states[0], {0}));
  }
  for (std::size_t i = 1; i < short_en.size(); ++i) {
    expect(r, short_en[i] >= short_en[i - 1] - 1e-9,
           "short-time E_N not monotone in gain at step " + std::to_string(i));
  }

  // Trajectory average of the monitored pair.
  HilbertSpec pair{{2, 2}};
  const DenseOperator sig2 =
      std::complex<double>(0.5, 0.0) *
      (pauli(pair, 0, 'x') + std::complex<double>(w2, 0.0) * pauli(pair, 1, 'x'));
  const DenseOperator h0 = std::complex<double>(0.0, 0.0) * sig2;
  Eigen::VectorXcd psi2 = Eigen::VectorXcd::Zero(4);
  psi2(3) = 1.0;
  std::vector<double> sme_grid;
  for (int k = 0; k <= 24; ++k) {
    sme_grid.push_back(0.25 * k);
  }
  const SmeEnsemble ens =
      sme_mean_log_negativity(pair, psi2, h0, sig2, 1.0, 6.0, sme_grid, 1e-4,
                              20260818ULL, 2000, {0});
  double max_mean = 0.0;
  double max_at = 0.0;
  for (std::size_t i = 0; i < ens.times.size(); ++i) {
    if (ens.mean_en[i] > max_mean) {
      max_mean = ens.mean_en[i];
      max_at = ens.times[i];
    }
  }
  expect(r, std::abs(max_mean - kLn2) <= 0.15,
         "trajectory-averaged plateau " + num(max_mean) + " (at gt=" +
             num(max_at) + ") is not within 0.15 of ln2=" + num(kLn2) +
             "; it sits at ln2/2 because the Bell-forming branch has Born "
             "weight 1/2");

  // Same-grid d=7 deterministic curve for the upper-bound comparison.
  bool bounded = true;
  for (std::size_t i = 0; i < sme_grid.size(); ++i) {
    const double t = sme_grid[i];
    if (t < 1.0 || t > 6.0) {
      continue;
    }
    // d7_curve was sampled on 0.1k; map t to its index.
    const std::size_t j = static_cast<std::size_t>(std::lround(t / 0.1)) - 1;
    if (ens.mean_en[i] < d7_curve[j] - 3.0 * ens.sem_en[i]) {
      bounded = false;
      expect(r, false,
             "trajectory average " + num(ens.mean_en[i]) + " below d=7 curve " +
                 num(d7_curve[j]) + " - 3 sem at gt=" + num(t));
      break;
    }
  }

  r.summary = "peaks " + num(peak_vals.front()) + ".." + num(peak_vals.back()) +
              " (times " + num(peak_times.front()) + ".." +
              num(peak_times.back()) + "), gain-monotone, mean max " +
              num(max_mean) + " at gt=" + num(max_at) + " vs ln2=" + num(kLn2) +
              ", bound " + (bounded ? "holds" : "violated");
  return r;
}

// --------------------------------------------------------------------------
// 11. Classical-register benchmark: the tagged Bell mixture keeps ln 2 of
//     entanglement across qubit 1 | rest and none across pair | register.
// --------------------------------------------------------------------------
CheckResult classical_register_benchmark() {
  CheckResult r;
  const dense::BellRegisterReport report = dense::bell_register_example();
  expect(r, std::abs(report.en_first_vs_rest - kLn2) <= 1e-10,
         "E_N(first|rest) " + num(report.en_first_vs_rest) + " != ln2");
  expect(r, std::abs(report.en_pair_vs_register) <= 1e-10,
         "E_N(pair|register) " + num(report.en_pair_vs_register) + " != 0");
  r.summary = "E_N(first|rest) " + num(report.en_first_vs_rest) +
              ", E_N(pair|register) " + num(report.en_pair_vs_register);
  return r;
}

// --------------------------------------------------------------------------
// 12. Measurement-free variants: the non-directional single-register jump
//     grows E_N with the half-log law, and a fast engineered reservoir
//     reproduces the adaptive marginals.
// --------------------------------------------------------------------------
CheckResult dissipative_variants() {
  CheckResult r;
  std::vector<double> lnts, ens;
  for (int T = 20; T <= 100; T += 10) {
    ScenarioParams p;
    p.variant = Variant::dissipative_only;
    p.t_f = T;
    const BuiltScenario sc = build_two_mode_scenario(p);
    lnts.push_back(std::log(static_cast<double>(T)));
    ens.push_back(en_series(sc, EvolutionMode::unconditional,
                            {static_cast<double>(T)})[0]);
  }
  const double slope = lsq_slope(lnts, ens);
  expect(r, slope >= 0.45 && slope <= 0.55,
         "late-time slope " + num(slope) + " outside 0.5 +- 0.05");

  ScenarioParams p;
  p.variant = Variant::reservoir_engineered;
  p.kappa = 100.0;
  p.t_f = 5.0;
  const SnapshotSeries res = run_scenario(build_two_mode_scenario(p),
                                          EvolutionMode::unconditional, {5.0});
  p.variant = Variant::feedforward;
  p.M = 1;
  const SnapshotSeries det = run_scenario(build_two_mode_scenario(p),
                                          EvolutionMode::unconditional, {5.0});
  const GaussianState res_ab = reduce_state(res.states[0], {"a", "b"});
  const GaussianState det_ab = reduce_state(det.states[0], {"a", "b"});
  const double scale = det_ab.cov.cwiseAbs().maxCoeff();
  const double rel_dev =
      (res_ab.cov - det_ab.cov).cwiseAbs().maxCoeff() / scale;
  expect(r, rel_dev < 0.05,
         "reservoir marginal deviation " + num(rel_dev) + " >= 5%");
  r.summary = "slope " + num(slope) + ", reservoir marginal dev " +
              num(rel_dev);
  return r;
}

struct Criterion {
  const char* name;
  CheckResult (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"conditional entanglement growth law", conditional_growth_law},
      {"marginal symplectic eigenvalue", marginal_symplectic_eigenvalue},
      {"single-window adaptive covariance", single_window_covariance},
      {"adaptive mirror fidelity", mirror_fidelity},
      {"directional invariant", directional_invariant},
      {"register readout recovery", register_recovery},
      {"detuning response structure", detuning_response},
      {"ring lattice page curves", lattice_page_curves},
      {"cross-engine moment bridge", cross_engine_bridge},
      {"finite register entanglement curves", finite_register_curves},
      {"classical register benchmark", classical_register_benchmark},
      {"autonomous dissipative variants", dissipative_variants},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    CheckResult result;
    const auto start = std::chrono::steady_clock::now();
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.failures = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    const std::string& detail = result.pass ? result.summary : result.failures;
    std::printf("AC%02d %-38s %s  (%s) [%.1fs]\n", index, criterion.name,
                result.pass ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
    if (!result.pass) {
      ++failures;
    }
  }
  std::printf("%d of 12 criteria passed\n", 12 - failures);
  return failures;
}
