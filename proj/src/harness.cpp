#include "quadsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "quadsim/dense.hpp"
#include "quadsim/errors.hpp"
#include "quadsim/integrate.hpp"
#include "quadsim/measures.hpp"
#include "quadsim/povm.hpp"
#include "quadsim/scenario.hpp"
#include "quadsim/threading.hpp"

namespace quadsim::harness {

namespace {

using nlohmann::json;

std::string format_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// One output table: schema t,<measure>[,<axis>].
struct Table {
  std::string measure;
  std::string axis;  // empty when absent
  struct Row {
    std::string t;
    double value;
    std::string axis;
  };
  std::vector<Row> rows;

  std::string csv() const {
    std::string body = "t," + measure;
    if (!axis.empty()) {
      body += "," + axis;
    }
    body += "\n";
    for (const auto& row : rows) {
      body += row.t + "," + format_value(row.value);
      if (!axis.empty()) {
        body += "," + row.axis;
      }
      body += "\n";
    }
    return body;
  }
};

std::vector<double> expand_sample_times(const json& spec) {
  std::vector<double> out;
  if (spec.is_array()) {
    for (const auto& v : spec) {
      if (!v.is_number()) {
        throw ConfigError("sample_times array entries must be numbers");
      }
      out.push_back(v.get<double>());
    }
  } else if (spec.is_object()) {
    const double start = spec.value("start", 0.0);
    const double stop = spec.at("stop").get<double>();
    const double step = spec.at("step").get<double>();
    if (step <= 0.0 || stop < start) {
      throw ConfigError("sample_times needs step > 0 and stop >= start");
    }
    const int count = static_cast<int>(std::round((stop - start) / step));
    for (int k = 0; k <= count; ++k) {
      out.push_back(start + k * step);
    }
    if (out.empty() || std::abs(out.back() - stop) > 1e-9 * std::max(1.0, stop)) {
      out.push_back(stop);
    }
  } else {
    throw ConfigError("sample_times must be an array or a {start,stop,step}");
  }
  if (out.empty()) {
    throw ConfigError("sample_times must be nonempty");
  }
  return out;
}

double require_number(const json& obj, const std::string& key) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ConfigError("missing or non-numeric parameter '" + key + "'");
  }
  return obj.at(key).get<double>();
}

ScenarioParams scenario_params_from(const json& params, Variant variant) {
  ScenarioParams sp;
  sp.variant = variant;
  sp.gamma = params.value("gamma", 1.0);
  sp.eta = params.value("eta", 1.0);
  sp.M = params.value("M", 1);
  sp.t_f = params.value("t_f", 10.0);
  sp.omega = params.value("omega", 0.0);
  sp.delta_omega = params.value("delta_omega", 0.0);
  sp.n = params.value("n", 2);
  sp.mu = params.value("mu", 1e-8);
  sp.kappa = params.value("kappa", 100.0);
  return sp;
}

void apply_axis(ScenarioParams& sp, const std::string& axis, double value) {
  if (axis == "gamma") {
    sp.gamma = value;
  } else if (axis == "eta") {
    sp.eta = value;
  } else if (axis == "M") {
    sp.M = static_cast<int>(std::llround(value));
  } else if (axis == "t_f") {
    sp.t_f = value;
  } else if (axis == "omega") {
    sp.omega = value;
  } else if (axis == "delta_omega") {
    sp.delta_omega = value;
  } else if (axis == "n") {
    sp.n = static_cast<int>(std::llround(value));
  } else if (axis == "mu") {
    sp.mu = value;
  } else if (axis == "kappa") {
    sp.kappa = value;
  } else {
    throw ConfigError("unknown sweep axis '" + axis + "'");
  }
}

Partition partition_for(const GaussianState& state, const json& run,
                        const BuiltScenario& scenario, bool recovered) {
  if (run.contains("partition")) {
    const auto side_a =
        run.at("partition").at("side_a").get<std::vector<std::string>>();
    return Partition::against_rest(state.layout, side_a);
  }
  if (!recovered) {
    return scenario.partition;
  }
  // After recovery only the system modes survive; keep the scenario's
  // partition restricted to them.
  std::vector<std::string> side_a;
  for (const auto& label : scenario.partition.side_a) {
    if (state.layout.has(label)) {
      side_a.push_back(label);
    }
  }
  return Partition::against_rest(state.layout, side_a);
}

std::string mode_pair_label(const std::string& l, const std::string& m) {
  return l + ":" + m;
}

// ---------------------------------------------------------------------------
// Gaussian engine
// ---------------------------------------------------------------------------

struct GaussianRunOutput {
  std::vector<Table> tables;
};

void append_snapshot_measures(
    const json& run, const BuiltScenario& scenario,
    const SnapshotSeries& series, const std::string& axis_value,
    double recover_mu, std::map<std::string, Table>& tables,
    const LatticeScenario* lattice) {
  const bool recovered = run.contains("recover");
  if (recovered && scenario.register_modes.empty()) {
    throw ConfigError("recover requested but the variant has no registers");
  }
  const auto measures = run.at("measures").get<std::vector<std::string>>();

  for (std::size_t i = 0; i < series.times.size(); ++i) {
    const GaussianState* state = &series.states[i];
    GaussianState recovered_state;
    if (recovered) {
      recovered_state =
          recover(*state, scenario.register_modes, recover_mu);
      state = &recovered_state;
    }
    const std::string t_str = format_value(series.times[i]);
    const bool final_time = (i + 1 == series.times.size());

    for (const auto& measure : measures) {
      Table& table = tables[measure];
      table.measure = measure;
      if (measure == "log_negativity") {
        const Partition part =
            partition_for(*state, run, scenario, recovered);
        table.rows.push_back({t_str, log_negativity(*state, part),
                              axis_value});
      } else if (measure == "purity") {
        table.rows.push_back({t_str, purity(*state), axis_value});
      } else if (measure == "entropy") {
        const Partition part =
            partition_for(*state, run, scenario, recovered);
        const auto entropy = entanglement_entropy(*state, part.side_a);
        if (!entropy) {
          throw ConfigError(
              "entropy requested for a mixed global state (purity below the "
              "pure-state gate)");
        }
        table.rows.push_back({t_str, *entropy, axis_value});
      } else if (measure == "eof") {
        table.rows.push_back(
            {t_str, eof_symmetric_two_mode(*state), axis_value});
      } else if (measure == "pairing" || measure == "normal_ordered") {
        if (!final_time) {
          continue;  // correlator tables are reported at the final time only
        }
        if (!axis_value.empty()) {
          throw ConfigError("correlator measures cannot be combined with a "
                            "sweep (both use the third column)");
        }
        const GaussianState sites =
            lattice ? reduce_state(*state, lattice->site_order) : *state;
        const Eigen::MatrixXcd corr = (measure == "pairing")
                                          ? pairing_correlators(sites)
                                          : normal_ordered_correlators(sites);
        table.axis = "pair";
        for (int l = 0; l < sites.layout.n_modes(); ++l) {
          for (int m = l; m < sites.layout.n_modes(); ++m) {
            table.rows.push_back(
                {t_str, std::abs(corr(l, m)),
                 mode_pair_label(sites.layout.labels[l],
                                 sites.layout.labels[m])});
          }
        }
      } else if (measure == "page_curve") {
        if (!final_time) {
          continue;
        }
        if (!lattice) {
          throw ConfigError("page_curve requires a lattice scenario");
        }
        if (!axis_value.empty()) {
          throw ConfigError("page_curve cannot be combined with a sweep");
        }
        if (recovered) {
          throw ConfigError("page_curve applies to the unrecovered state");
        }
        const std::vector<double> curve = page_curve(
            *state, lattice->site_order, lattice->registers_by_bond);
        table.axis = "cut";
        for (std::size_t c = 0; c < curve.size(); ++c) {
          table.rows.push_back(
              {t_str, curve[c], std::to_string(c + 1)});
        }
      } else {
        throw ConfigError("unknown measure '" + measure + "'");
      }
    }
  }
}

GaussianRunOutput run_gaussian(const json& run) {
  const std::string variant_name = run.value("variant", "conditional");
  const json params = run.value("params", json::object());
  const std::vector<double> samples =
      expand_sample_times(run.at("sample_times"));

  std::vector<double> sweep_values = {};
  std::string sweep_axis;
  if (run.contains("sweep")) {
    sweep_axis = run.at("sweep").at("axis").get<std::string>();
    sweep_values = run.at("sweep").at("values").get<std::vector<double>>();
    if (sweep_values.empty()) {
      throw ConfigError("sweep.values must be nonempty");
    }
  }

  std::map<std::string, Table> tables;
  const auto run_one = [&](const std::string& axis_value,
                           const ScenarioParams& sp) {
    const bool lattice_run = sp.n > 2;
    BuiltScenario scenario;
    LatticeScenario lattice;
    const LatticeScenario* lattice_ptr = nullptr;
    if (lattice_run) {
      lattice = build_lattice_scenario(sp);
      scenario = lattice.base;
      lattice_ptr = &lattice;
    } else {
      scenario = build_two_mode_scenario(sp);
    }
    const EvolutionMode mode = (sp.variant == Variant::conditional)
                                   ? EvolutionMode::conditional
                                   : EvolutionMode::unconditional;
    const SnapshotSeries series = run_schedule(
        vacuum_state(scenario.layout), scenario.schedule, mode, samples);
    double recover_mu = 0.0;
    if (run.contains("recover")) {
      // The readout resolution follows the sweep when the sweep axis is mu.
      recover_mu = (sweep_axis == "mu") ? sp.mu
                                        : run.at("recover").value("mu", 1e-8);
    }
    append_snapshot_measures(run, scenario, series, axis_value, recover_mu,
                             tables, lattice_ptr);
  };

  Variant variant = variant_from_string(variant_name);
  if (sweep_axis.empty()) {
    run_one("", scenario_params_from(params, variant));
  } else {
    for (double value : sweep_values) {
      ScenarioParams sp = scenario_params_from(params, variant);
      apply_axis(sp, sweep_axis, value);
      run_one(format_value(value), sp);
    }
  }

  GaussianRunOutput out;
  for (auto& [name, table] : tables) {
    if (table.axis.empty() && !sweep_axis.empty()) {
      table.axis = sweep_axis;
    }
    out.tables.push_back(std::move(table));
  }
  return out;
}

// Conditional-vs-adaptive page-curve pair on the lattice. The stopping rule
// fixes the protocol time from the conditional half-chain curve; the same
// time is then used for the adaptive run (its measurement windows must span
// the whole protocol).
GaussianRunOutput run_lattice_page_pair(const json& run) {
  const json params = run.value("params", json::object());
  ScenarioParams cond = scenario_params_from(params, Variant::conditional);
  const double t_cap = params.value("t_cap", 50.0);
  const double sample_step = params.value("stopping_step", 0.25);

  std::vector<double> grid;
  for (double t = 0.0; t <= t_cap + 1e-9; t += sample_step) {
    grid.push_back(t);
  }
  cond.t_f = t_cap;
  const LatticeScenario cond_lattice = build_lattice_scenario(cond);
  const SnapshotSeries cond_series =
      run_schedule(vacuum_state(cond_lattice.base.layout),
                   cond_lattice.base.schedule, EvolutionMode::conditional,
                   grid);

  std::vector<double> half_en(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    half_en[i] = log_negativity(cond_series.states[i],
                                cond_lattice.base.partition,
                                /*validate=*/false);
  }
  const double t_star =
      stabilization_time(grid, half_en, 1e-3 * cond.gamma, 1.0 / cond.gamma,
                         t_cap);

  // Conditional page curve at the stabilization time.
  std::size_t at = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid[i] - t_star) < std::abs(grid[at] - t_star)) {
      at = i;
    }
  }
  const std::vector<double> page_cond =
      page_curve(cond_series.states[at], cond_lattice.site_order,
                 cond_lattice.registers_by_bond);

  // Adaptive run over the same protocol time.
  ScenarioParams det = scenario_params_from(params, Variant::feedforward);
  det.t_f = t_star;
  const LatticeScenario det_lattice = build_lattice_scenario(det);
  const SnapshotSeries det_series =
      run_schedule(vacuum_state(det_lattice.base.layout),
                   det_lattice.base.schedule, EvolutionMode::unconditional,
                   {t_star});
  const std::vector<double> page_det =
      page_curve(det_series.states[0], det_lattice.site_order,
                 det_lattice.registers_by_bond);

  GaussianRunOutput out;
  const std::string t_str = format_value(t_star);
  Table cond_table{"page_curve_conditional", "cut", {}};
  for (std::size_t c = 0; c < page_cond.size(); ++c) {
    cond_table.rows.push_back({t_str, page_cond[c], std::to_string(c + 1)});
  }
  Table det_table{"page_curve_feedforward", "cut", {}};
  for (std::size_t c = 0; c < page_det.size(); ++c) {
    det_table.rows.push_back({t_str, page_det[c], std::to_string(c + 1)});
  }
  Table halfcut{"log_negativity", "", {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    halfcut.rows.push_back({format_value(grid[i]), half_en[i], ""});
  }
  Table tstar{"stabilization_time", "", {}};
  tstar.rows.push_back({t_str, t_star, ""});
  out.tables = {std::move(cond_table), std::move(det_table),
                std::move(halfcut), std::move(tstar)};
  return out;
}

// RMS error of the adaptive half-chain log-negativity against the
// conditional one, swept over detunings, one row per window count.
GaussianRunOutput run_lattice_rms(const json& run) {
  const json params = run.value("params", json::object());
  const auto m_values = params.at("M_values").get<std::vector<int>>();
  const auto detunings =
      params.at("delta_omega_values").get<std::vector<double>>();
  const double t_cap = params.value("t_cap", 50.0);
  const double sample_step = params.value("stopping_step", 0.25);
  if (m_values.empty() || detunings.empty()) {
    throw ConfigError("M_values and delta_omega_values must be nonempty");
  }

  std::vector<double> grid;
  for (double t = 0.0; t <= t_cap + 1e-9; t += sample_step) {
    grid.push_back(t);
  }

  std::vector<double> t_stars(detunings.size());
  std::vector<double> e_ref(detunings.size());
  for (std::size_t k = 0; k < detunings.size(); ++k) {
    ScenarioParams cond = scenario_params_from(params, Variant::conditional);
    cond.delta_omega = detunings[k];
    cond.t_f = t_cap;
    const LatticeScenario lattice = build_lattice_scenario(cond);
    const SnapshotSeries series =
        run_schedule(vacuum_state(lattice.base.layout), lattice.base.schedule,
                     EvolutionMode::conditional, grid);
    std::vector<double> half_en(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      half_en[i] = log_negativity(series.states[i], lattice.base.partition,
                                  /*validate=*/false);
    }
    t_stars[k] = stabilization_time(grid, half_en, 1e-3 * cond.gamma,
                                    1.0 / cond.gamma, t_cap);
    std::size_t at = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::abs(grid[i] - t_stars[k]) < std::abs(grid[at] - t_stars[k])) {
        at = i;
      }
    }
    e_ref[k] = half_en[at];
  }

  Table rms_table{"rms_error", "M", {}};
  for (int m : m_values) {
    std::vector<double> e_det(detunings.size());
    for (std::size_t k = 0; k < detunings.size(); ++k) {
      ScenarioParams det = scenario_params_from(params, Variant::feedforward);
      det.delta_omega = detunings[k];
      det.M = m;
      det.t_f = t_stars[k];
      const LatticeScenario lattice = build_lattice_scenario(det);
      const SnapshotSeries series = run_schedule(
          vacuum_state(lattice.base.layout), lattice.base.schedule,
          EvolutionMode::unconditional, {t_stars[k]});
      e_det[k] = log_negativity(series.states[0], lattice.base.partition,
                                /*validate=*/false);
    }
    const Inefficiency ineff = inefficiency_metrics(e_ref, e_det);
    rms_table.rows.push_back(
        {format_value(t_cap), ineff.rms, std::to_string(m)});
  }

  GaussianRunOutput out;
  out.tables = {std::move(rms_table)};
  return out;
}

// ---------------------------------------------------------------------------
// Dense engine
// ---------------------------------------------------------------------------

struct DenseSetup {
  dense::HilbertSpec space;
  Eigen::VectorXcd psi0;
  dense::DenseOperator H;
  std::vector<dense::DenseOperator> jumps;
  std::optional<dense::DenseOperator> monitor;
  double rate = 0.0;
  std::vector<int> side_a_sites;
};

DenseSetup build_dense_setup(const std::string& variant, const json& params,
                             const json& run) {
  using namespace quadsim::dense;
  DenseSetup setup;
  const double gamma = params.value("gamma", 1.0);
  const double eta = params.value("eta", 1.0);
  const double w2 = params.value("w2", 0.7);
  if (gamma <= 0.0) {
    throw ConfigError("gamma must be positive");
  }

  if (variant == "qubit_register_feedforward") {
    const int d = static_cast<int>(require_number(params, "d"));
    setup.space = HilbertSpec{{2, 2, d}};
    setup.space.validate();
    const DenseOperator sig =
        std::complex<double>(0.5, 0.0) *
        (pauli(setup.space, 0, 'x') +
         std::complex<double>(w2, 0.0) * pauli(setup.space, 1, 'x'));
    const DenseOperator f_op = truncated_x(setup.space, 2);
    setup.H = std::complex<double>(gamma * eta, 0.0) * (sig * f_op);
    setup.jumps.push_back(
        std::complex<double>(std::sqrt(gamma), 0.0) *
        (sig + std::complex<double>(0.0, -eta) * f_op));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(setup.space.total());
    psi(3 * d) = 1.0;  // |down, down> x |0>
    setup.psi0 = psi;
  } else if (variant == "truncated_oscillator_feedforward") {
    const int d = static_cast<int>(require_number(params, "d"));
    setup.space = HilbertSpec{{d, d, d}};
    setup.space.validate();
    const DenseOperator x_plus =
        std::complex<double>(1.0 / std::sqrt(2.0), 0.0) *
        (truncated_x(setup.space, 0) + truncated_x(setup.space, 1));
    const DenseOperator y = truncated_x(setup.space, 2);
    setup.H = std::complex<double>(gamma * eta, 0.0) * (x_plus * y);
    setup.jumps.push_back(
        std::complex<double>(std::sqrt(gamma), 0.0) *
        (x_plus + std::complex<double>(0.0, -eta) * y));
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(setup.space.total());
    psi(0) = 1.0;
    setup.psi0 = psi;
  } else if (variant == "monitored_qubits_trajectories") {
    setup.space = HilbertSpec{{2, 2}};
    setup.space.validate();
    const DenseOperator sig =
        std::complex<double>(0.5, 0.0) *
        (pauli(setup.space, 0, 'x') +
         std::complex<double>(w2, 0.0) * pauli(setup.space, 1, 'x'));
    setup.H = std::complex<double>(0.0, 0.0) * sig;  // no Hamiltonian
    setup.monitor = sig;
    setup.rate = gamma;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(3) = 1.0;  // |down, down>
    setup.psi0 = psi;
  } else {
    throw ConfigError("unknown dense variant '" + variant + "'");
  }

  if (run.contains("partition")) {
    setup.side_a_sites =
        run.at("partition").at("side_a_sites").get<std::vector<int>>();
  } else {
    setup.side_a_sites = {0};
  }
  return setup;
}

std::vector<Table> run_dense(const json& run) {
  const std::string variant = run.at("variant").get<std::string>();
  const json params = run.value("params", json::object());
  const std::vector<double> samples =
      expand_sample_times(run.at("sample_times"));
  const double t_f = params.value("t_f", samples.back());
  const double dt = params.value("dt", 1e-3);
  const auto measures = run.at("measures").get<std::vector<std::string>>();

  std::vector<double> sweep_values;
  std::string sweep_axis;
  if (run.contains("sweep")) {
    sweep_axis = run.at("sweep").at("axis").get<std::string>();
    sweep_values = run.at("sweep").at("values").get<std::vector<double>>();
  }

  std::map<std::string, Table> tables;
  const auto run_one = [&](const std::string& axis_value,
                           const json& local_params) {
    const DenseSetup setup = build_dense_setup(variant, local_params, run);
    if (variant == "monitored_qubits_trajectories") {
      if (!run.contains("seeds")) {
        throw ConfigError("trajectory runs need a seeds {base, count} block");
      }
      const std::uint64_t base =
          run.at("seeds").value("base", std::uint64_t{20260818});
      const int count = run.at("seeds").value("count", 100);
      const double sde_dt = local_params.value("sde_dt", 1e-4);
      const dense::SmeEnsemble ens = dense::sme_mean_log_negativity(
          setup.space, setup.psi0, setup.H, *setup.monitor, setup.rate, t_f,
          samples, sde_dt, base, count, setup.side_a_sites);
      for (const auto& measure : measures) {
        Table& table = tables[measure];
        table.measure = measure;
        const std::vector<double>* vals = nullptr;
        if (measure == "log_negativity") {
          vals = &ens.mean_en;
        } else if (measure == "log_negativity_sem") {
          vals = &ens.sem_en;
        } else {
          throw ConfigError("unknown trajectory measure '" + measure + "'");
        }
        for (std::size_t i = 0; i < samples.size(); ++i) {
          table.rows.push_back(
              {format_value(samples[i]), (*vals)[i], axis_value});
        }
      }
    } else {
      dense::DenseState initial =
          dense::DenseState::pure(setup.space, setup.psi0);
      const dense::DenseSeries series = dense::run_lindblad(
          std::move(initial), setup.H, setup.jumps, t_f, samples, dt);
      for (const auto& measure : measures) {
        if (measure != "log_negativity") {
          throw ConfigError("unknown dense measure '" + measure + "'");
        }
        Table& table = tables[measure];
        table.measure = measure;
        for (std::size_t i = 0; i < samples.size(); ++i) {
          table.rows.push_back(
              {format_value(samples[i]),
               dense::dense_log_negativity(series.states[i],
                                           setup.side_a_sites),
               axis_value});
        }
      }
    }
  };

  if (sweep_axis.empty()) {
    run_one("", params);
  } else {
    for (double value : sweep_values) {
      json local = params;
      if (sweep_axis == "d") {
        local["d"] = static_cast<int>(std::llround(value));
      } else {
        local[sweep_axis] = value;
      }
      run_one(format_value(value), local);
    }
  }

  std::vector<Table> out;
  for (auto& [name, table] : tables) {
    if (table.axis.empty() && !sweep_axis.empty()) {
      table.axis = sweep_axis;
    }
    out.push_back(std::move(table));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Derived post-processing steps
// ---------------------------------------------------------------------------

using TableKey = std::pair<std::string, std::string>;  // (label, measure)

const Table& lookup(const std::map<TableKey, Table>& registry,
                    const json& ref) {
  const TableKey key{ref.value("label", ""), ref.at("measure").get<std::string>()};
  const auto it = registry.find(key);
  if (it == registry.end()) {
    throw ConfigError("derived step references unknown table '" + key.first +
                      "/" + key.second + "'");
  }
  return it->second;
}

Table derive_pointwise(const Table& ref, const Table& input,
                       const std::string& op, const std::string& out_name) {
  // Join on t, and on the axis when both tables carry the same axis.
  const bool join_axis = !ref.axis.empty() && ref.axis == input.axis;
  std::map<std::string, double> ref_by_key;
  for (const auto& row : ref.rows) {
    ref_by_key[row.t + "|" + (join_axis ? row.axis : "")] = row.value;
  }
  Table out;
  out.measure = out_name;
  out.axis = input.axis;
  for (const auto& row : input.rows) {
    const auto it = ref_by_key.find(row.t + "|" + (join_axis ? row.axis : ""));
    if (it == ref_by_key.end()) {
      throw ConfigError("derived step: no reference row for t=" + row.t);
    }
    const double r = it->second;
    const double v = row.value;
    double value = 0.0;
    if (op == "inefficiency") {
      value = (r > 0.0) ? (r - v) / r : 0.0;
    } else if (op == "ratio") {
      if (r > 1e-12) {
        value = v / r;
      } else {
        value = (std::abs(v) <= 1e-12) ? 1.0 : 0.0;
      }
    } else {
      throw ConfigError("unknown derived op '" + op + "'");
    }
    out.rows.push_back({row.t, value, row.axis});
  }
  return out;
}

Table derive_rms(const std::map<TableKey, Table>& registry, const json& step) {
  const Table& ref = lookup(registry, step.at("reference"));
  Table out;
  out.measure = step.value("output", "rms_error");
  out.axis = step.value("sweep_axis", "M");
  for (const auto& input_spec : step.at("inputs")) {
    const Table& input = lookup(registry, input_spec);
    std::map<std::string, double> ref_by_key;
    for (const auto& row : ref.rows) {
      ref_by_key[row.t + "|" + row.axis] = row.value;
    }
    double sq_sum = 0.0;
    int count = 0;
    std::string t_str;
    for (const auto& row : input.rows) {
      const auto it = ref_by_key.find(row.t + "|" + row.axis);
      if (it == ref_by_key.end()) {
        throw ConfigError("rms step: reference row missing for t=" + row.t);
      }
      const double diff = it->second - row.value;
      sq_sum += diff * diff;
      ++count;
      t_str = row.t;
    }
    if (count == 0) {
      throw ConfigError("rms step: empty input table");
    }
    out.rows.push_back({t_str, std::sqrt(sq_sum / count),
                        format_value(input_spec.at("value").get<double>())});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run driver
// ---------------------------------------------------------------------------

std::vector<Table> execute_run(const json& run) {
  const std::string engine = run.value("engine", "gaussian");
  if (engine == "gaussian") {
    const std::string variant = run.value("variant", "conditional");
    if (variant == "lattice_page_pair") {
      return run_lattice_page_pair(run).tables;
    }
    if (variant == "lattice_rms_vs_windows") {
      return run_lattice_rms(run).tables;
    }
    return run_gaussian(run).tables;
  }
  if (engine == "dense") {
    return run_dense(run);
  }
  throw ConfigError("unknown engine '" + engine + "'");
}

}  // namespace

std::string config_hash(const json& config) {
  const std::string dump = config.dump();
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

RunOutcome run_config_json(const json& config, const std::string& out_dir) {
  RunOutcome outcome;
  try {
    std::vector<json> runs;
    if (config.contains("runs")) {
      for (const auto& run : config.at("runs")) {
        runs.push_back(run);
      }
    } else {
      runs.push_back(config);
    }
    if (runs.empty()) {
      throw ConfigError("config contains no runs");
    }

    std::map<TableKey, Table> registry;
    std::vector<std::pair<std::string, Table>> outputs;  // (file stem, table)
    for (const auto& run : runs) {
      const std::string label = run.value("label", "");
      std::vector<Table> tables = execute_run(run);
      for (auto& table : tables) {
        const TableKey key{label, table.measure};
        if (registry.count(key)) {
          throw ConfigError("duplicate output table '" + label + "/" +
                            table.measure + "'");
        }
        const std::string stem =
            table.measure + (label.empty() ? "" : "_" + label);
        registry[key] = table;
        outputs.emplace_back(stem, std::move(table));
      }
    }

    if (config.contains("derived")) {
      for (const auto& step : config.at("derived")) {
        const std::string op = step.at("op").get<std::string>();
        Table table;
        if (op == "rms_vs_sweep") {
          table = derive_rms(registry, step);
        } else {
          const Table& ref = lookup(registry, step.at("reference"));
          const Table& input = lookup(registry, step.at("input"));
          table = derive_pointwise(ref, input, op,
                                   step.value("output", op));
        }
        const std::string stem = table.measure;
        const TableKey key{"derived", table.measure};
        if (registry.count(key)) {
          throw ConfigError("duplicate derived table '" + table.measure + "'");
        }
        registry[key] = table;
        outputs.emplace_back(stem, std::move(table));
      }
    }

    // All computation succeeded; only now touch the filesystem.
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    json meta;
    meta["version"] = kVersion;
    meta["config"] = config;
    meta["config_hash"] = config_hash(config);
    meta["integrator"] = {{"max_step", 1e-3}, {"sde_step", 1e-4}};
    meta["files"] = json::array();
    for (const auto& [stem, table] : outputs) {
      const std::string path = (fs::path(out_dir) / (stem + ".csv")).string();
      std::ofstream file(path, std::ios::binary);
      if (!file) {
        throw PhysicsError("cannot open output file " + path);
      }
      file << table.csv();
      outcome.files.push_back(path);
      meta["files"].push_back(stem + ".csv");
    }
    const std::string meta_path =
        (fs::path(out_dir) / "metadata.json").string();
    std::ofstream meta_file(meta_path, std::ios::binary);
    if (!meta_file) {
      throw PhysicsError("cannot open output file " + meta_path);
    }
    meta_file << meta.dump(2) << "\n";
    outcome.files.push_back(meta_path);
    outcome.exit_code = kExitOk;
    outcome.message =
        "wrote " + std::to_string(outcome.files.size()) + " files to " +
        out_dir;
  } catch (const ConfigError& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = std::string("config error: ") + e.what();
    outcome.files.clear();
  } catch (const json::exception& e) {
    outcome.exit_code = kExitConfigError;
    outcome.message = std::string("config error: ") + e.what();
    outcome.files.clear();
  } catch (const std::exception& e) {
    outcome.exit_code = kExitPhysicsError;
    outcome.message = std::string("runtime error: ") + e.what();
    outcome.files.clear();
  }
  return outcome;
}

RunOutcome run_config_file(const std::string& config_path,
                           const std::string& out_dir) {
  json config;
  try {
    std::ifstream file(config_path);
    if (!file) {
      throw ConfigError("cannot open config file " + config_path);
    }
    config = json::parse(file);
  } catch (const std::exception& e) {
    return RunOutcome{kExitConfigError,
                      std::string("config error: ") + e.what(),
                      {}};
  }
  return run_config_json(config, out_dir);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

json grid(double stop, double step) {
  return json{{"start", 0.0}, {"stop", stop}, {"step", step}};
}

json preset_fig2() {
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity", "entropy"}}});
  runs.push_back({{"label", "feedforward"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"M", 1}, {"t_f", 10.0}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity"}}});
  runs.push_back({{"label", "recovered"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"M", 1}, {"t_f", 10.0}}},
                  {"recover", {{"mu", 1e-8}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity"}}});
  return json{{"runs", runs}};
}

json preset_fig3a() {
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"omega", 1.2}, {"t_f", 10.0}}},
                  {"sweep", {{"axis", "delta_omega"}, {"values", {0.0, 0.3, 1.2}}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity"}}});
  return json{{"runs", runs}};
}

std::vector<double> linspace_grid(double start, double stop, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::round((stop - start) / step));
  for (int k = 0; k <= count; ++k) {
    out.push_back(start + k * step);
  }
  return out;
}

json preset_fig3b() {
  const std::vector<double> detunings = linspace_grid(0.0, 1.5, 0.1);
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"omega", 1.2}, {"t_f", 10.0}}},
                  {"sweep", {{"axis", "delta_omega"}, {"values", detunings}}},
                  {"sample_times", json::array({10.0})},
                  {"measures", {"log_negativity"}}});
  runs.push_back({{"label", "feedforward"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params",
                   {{"gamma", 1.0}, {"omega", 1.2}, {"eta", 5.0}, {"M", 20}, {"t_f", 10.0}}},
                  {"sweep", {{"axis", "delta_omega"}, {"values", detunings}}},
                  {"sample_times", json::array({10.0})},
                  {"measures", {"log_negativity"}}});
  json derived = json::array();
  derived.push_back(
      {{"op", "inefficiency"},
       {"reference", {{"label", "conditional"}, {"measure", "log_negativity"}}},
       {"input", {{"label", "feedforward"}, {"measure", "log_negativity"}}},
       {"output", "inefficiency"}});
  return json{{"runs", runs}, {"derived", derived}};
}

json preset_fig3c(bool full_scale) {
  const int n = full_scale ? 32 : 8;
  const int m = full_scale ? 15 : 10;
  json runs = json::array();
  for (const auto& [label, detuning] :
       std::vector<std::pair<std::string, double>>{{"log_law", 0.0},
                                                   {"area_law", 0.3}}) {
    runs.push_back({{"label", label},
                    {"engine", "gaussian"},
                    {"variant", "lattice_page_pair"},
                    {"params",
                     {{"gamma", 1.0},
                      {"eta", 5.0},
                      {"M", m},
                      {"n", n},
                      {"delta_omega", detuning},
                      {"t_cap", 50.0}}}});
  }
  return json{{"runs", runs}};
}

json preset_fig4() {
  json runs = json::array();
  runs.push_back({{"label", "deterministic"},
                  {"engine", "dense"},
                  {"variant", "qubit_register_feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"t_f", 10.0}, {"d", 2}}},
                  {"sweep", {{"axis", "d"}, {"values", {2, 3, 4, 5, 6, 7}}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity"}}});
  runs.push_back({{"label", "conditional"},
                  {"engine", "dense"},
                  {"variant", "monitored_qubits_trajectories"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}}},
                  {"seeds", {{"base", 20260818}, {"count", 2000}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "log_negativity_sem"}}});
  return json{{"runs", runs}};
}

json preset_figS2() {
  const std::vector<double> etas = {0.5, 1.0, 2.0, 5.0};
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity"}}});
  runs.push_back({{"label", "feedforward"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"M", 1}, {"t_f", 10.0}}},
                  {"sweep", {{"axis", "eta"}, {"values", etas}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity"}}});
  runs.push_back({{"label", "recovered"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"M", 1}, {"t_f", 10.0}}},
                  {"recover", {{"mu", 1e-8}}},
                  {"sweep", {{"axis", "eta"}, {"values", etas}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity"}}});
  json derived = json::array();
  derived.push_back(
      {{"op", "inefficiency"},
       {"reference", {{"label", "conditional"}, {"measure", "log_negativity"}}},
       {"input", {{"label", "feedforward"}, {"measure", "log_negativity"}}},
       {"output", "inefficiency_feedforward"}});
  derived.push_back(
      {{"op", "inefficiency"},
       {"reference", {{"label", "conditional"}, {"measure", "log_negativity"}}},
       {"input", {{"label", "recovered"}, {"measure", "log_negativity"}}},
       {"output", "inefficiency_recovered"}});
  return json{{"runs", runs}, {"derived", derived}};
}

json preset_figS3() {
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"eof"}}});
  runs.push_back({{"label", "recovered"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"M", 1}, {"t_f", 10.0}}},
                  {"recover", {{"mu", 1e-8}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"eof"}}});
  json derived = json::array();
  derived.push_back(
      {{"op", "ratio"},
       {"reference", {{"label", "conditional"}, {"measure", "eof"}}},
       {"input", {{"label", "recovered"}, {"measure", "eof"}}},
       {"output", "eof_ratio"}});
  return json{{"runs", runs}, {"derived", derived}};
}

json preset_figS4() {
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity"}}});
  runs.push_back({{"label", "recovered"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"M", 1}, {"t_f", 10.0}}},
                  {"recover", {{"mu", 1e-8}}},
                  {"sweep", {{"axis", "mu"}, {"values", {1e-8, 1.0}}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "purity"}}});
  return json{{"runs", runs}};
}

json preset_figS5() {
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"n", 20}, {"t_f", 10.0}}},
                  {"sample_times", json::array({10.0})},
                  {"measures", {"pairing", "normal_ordered"}}});
  return json{{"runs", runs}};
}

json preset_figS6() {
  const std::vector<double> detunings = linspace_grid(0.0, 1.5, 0.1);
  json runs = json::array();
  runs.push_back({{"label", "conditional"},
                  {"engine", "gaussian"},
                  {"variant", "conditional"},
                  {"params", {{"gamma", 1.0}, {"omega", 1.2}, {"t_f", 10.0}}},
                  {"sweep", {{"axis", "delta_omega"}, {"values", detunings}}},
                  {"sample_times", json::array({10.0})},
                  {"measures", {"log_negativity"}}});
  json inputs = json::array();
  for (int m : {5, 10, 15, 20}) {
    const std::string label = "feedforward_M" + std::to_string(m);
    runs.push_back(
        {{"label", label},
         {"engine", "gaussian"},
         {"variant", "feedforward"},
         {"params",
          {{"gamma", 1.0}, {"omega", 1.2}, {"eta", 5.0}, {"M", m}, {"t_f", 10.0}}},
         {"sweep", {{"axis", "delta_omega"}, {"values", detunings}}},
         {"sample_times", json::array({10.0})},
         {"measures", {"log_negativity"}}});
    inputs.push_back({{"label", label},
                      {"measure", "log_negativity"},
                      {"value", m}});
  }
  json derived = json::array();
  derived.push_back(
      {{"op", "rms_vs_sweep"},
       {"reference", {{"label", "conditional"}, {"measure", "log_negativity"}}},
       {"inputs", inputs},
       {"sweep_axis", "M"},
       {"output", "rms_error"}});
  return json{{"runs", runs}, {"derived", derived}};
}

json preset_figS7() {
  json runs = json::array();
  runs.push_back({{"label", "lattice"},
                  {"engine", "gaussian"},
                  {"variant", "lattice_rms_vs_windows"},
                  {"params",
                   {{"gamma", 1.0},
                    {"eta", 5.0},
                    {"n", 8},
                    {"M_values", {5, 10, 15}},
                    {"delta_omega_values", {0.1, 0.3, 0.5}},
                    {"t_cap", 50.0}}}});
  return json{{"runs", runs}};
}

json preset_figS9() {
  json runs = json::array();
  runs.push_back({{"label", "deterministic"},
                  {"engine", "dense"},
                  {"variant", "qubit_register_feedforward"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}, {"d", 5}}},
                  {"sweep", {{"axis", "eta"}, {"values", {0.5, 1.0, 2.0, 5.0}}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity"}}});
  runs.push_back({{"label", "conditional"},
                  {"engine", "dense"},
                  {"variant", "monitored_qubits_trajectories"},
                  {"params", {{"gamma", 1.0}, {"t_f", 10.0}}},
                  {"seeds", {{"base", 20260818}, {"count", 2000}}},
                  {"sample_times", grid(10.0, 0.1)},
                  {"measures", {"log_negativity", "log_negativity_sem"}}});
  return json{{"runs", runs}};
}

json preset_figS10() {
  json runs = json::array();
  runs.push_back({{"label", "truncated"},
                  {"engine", "dense"},
                  {"variant", "truncated_oscillator_feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"t_f", 5.0}, {"d", 2}}},
                  {"sweep", {{"axis", "d"}, {"values", {2, 3, 4, 5, 6, 7}}}},
                  {"sample_times", grid(5.0, 0.05)},
                  {"measures", {"log_negativity"}}});
  runs.push_back({{"label", "bosonic"},
                  {"engine", "gaussian"},
                  {"variant", "feedforward"},
                  {"params", {{"gamma", 1.0}, {"eta", 1.0}, {"M", 1}, {"t_f", 5.0}}},
                  {"sample_times", grid(5.0, 0.05)},
                  {"measures", {"log_negativity"}}});
  return json{{"runs", runs}};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2",  "fig3a", "fig3b", "fig3c", "fig4",  "figS2", "figS3",
          "figS4", "figS5", "figS6", "figS7", "figS9", "figS10"};
}

json preset_config(const std::string& name, bool full_scale) {
  json config;
  if (name == "fig2") {
    config = preset_fig2();
  } else if (name == "fig3a") {
    config = preset_fig3a();
  } else if (name == "fig3b") {
    config = preset_fig3b();
  } else if (name == "fig3c") {
    config = preset_fig3c(full_scale);
  } else if (name == "fig4") {
    config = preset_fig4();
  } else if (name == "figS2") {
    config = preset_figS2();
  } else if (name == "figS3") {
    config = preset_figS3();
  } else if (name == "figS4") {
    config = preset_figS4();
  } else if (name == "figS5") {
    config = preset_figS5();
  } else if (name == "figS6") {
    config = preset_figS6();
  } else if (name == "figS7") {
    config = preset_figS7();
  } else if (name == "figS9") {
    config = preset_figS9();
  } else if (name == "figS10") {
    config = preset_figS10();
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  config["name"] = name;
  return config;
}

// ---------------------------------------------------------------------------
// Table comparison
// ---------------------------------------------------------------------------

namespace {

struct ParsedCsv {
  std::vector<std::string> header;
  // Key = all non-value columns joined; value column index 1.
  std::map<std::string, double> rows;
};

ParsedCsv parse_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw ConfigError("cannot open CSV file " + path);
  }
  ParsedCsv out;
  std::string line;
  bool first = true;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    if (first) {
      out.header = cells;
      if (cells.size() < 2) {
        throw ConfigError("CSV " + path + " needs at least two columns");
      }
      first = false;
      continue;
    }
    if (cells.size() != out.header.size()) {
      throw ConfigError("CSV " + path + " has a ragged row");
    }
    std::string key = cells[0];
    for (std::size_t i = 2; i < cells.size(); ++i) {
      key += "|" + cells[i];
    }
    double value = 0.0;
    try {
      value = std::stod(cells[1]);
    } catch (...) {
      throw ConfigError("CSV " + path + " has a non-numeric value cell '" +
                        cells[1] + "'");
    }
    if (!out.rows.emplace(key, value).second) {
      throw ConfigError("CSV " + path + " has duplicate key " + key);
    }
  }
  if (first) {
    throw ConfigError("CSV " + path + " is empty");
  }
  return out;
}

}  // namespace

CompareReport compare_tables(const std::string& csv_a, const std::string& csv_b,
                             const std::string& tol_spec) {
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  bool have_tol = false;
  std::stringstream ss(tol_spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("tolerance spec parts must look like abs=X or rel=Y");
    }
    const std::string name = part.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(part.substr(eq + 1));
    } catch (...) {
      throw ConfigError("non-numeric tolerance in '" + part + "'");
    }
    if (value < 0.0) {
      throw ConfigError("tolerances must be non-negative");
    }
    if (name == "abs") {
      abs_tol = value;
      have_tol = true;
    } else if (name == "rel") {
      rel_tol = value;
      have_tol = true;
    } else {
      throw ConfigError("unknown tolerance '" + name + "'");
    }
  }
  if (!have_tol) {
    throw ConfigError("tolerance spec must set abs= and/or rel=");
  }

  const ParsedCsv a = parse_csv(csv_a);
  const ParsedCsv b = parse_csv(csv_b);

  CompareReport report;
  if (a.rows.size() != b.rows.size()) {
    report.pass = false;
    report.detail = "row counts differ (" + std::to_string(a.rows.size()) +
                    " vs " + std::to_string(b.rows.size()) + ")";
    return report;
  }
  report.pass = true;
  for (const auto& [key, value_a] : a.rows) {
    const auto it = b.rows.find(key);
    if (it == b.rows.end()) {
      report.pass = false;
      report.detail = "key '" + key + "' missing from " + csv_b;
      return report;
    }
    const double value_b = it->second;
    const double dev = std::abs(value_a - value_b);
    report.max_abs_dev = std::max(report.max_abs_dev, dev);
    if (std::abs(value_b) > 0.0) {
      report.max_rel_dev = std::max(report.max_rel_dev,
                                    dev / std::abs(value_b));
    }
    if (dev > abs_tol + rel_tol * std::abs(value_b)) {
      report.pass = false;
      if (report.detail.empty()) {
        report.detail = "key '" + key + "': |" + format_value(value_a) +
                        " - " + format_value(value_b) + "| exceeds tolerance";
      }
    }
  }
  if (report.pass && report.detail.empty()) {
    report.detail = "max abs dev " + format_value(report.max_abs_dev);
  }
  return report;
}

}  // namespace quadsim::harness
