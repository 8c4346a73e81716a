#include "quadsim/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "quadsim/errors.hpp"
#include "quadsim/measures.hpp"
#include "quadsim/threading.hpp"

namespace quadsim {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865476;
// Size guard on built layouts (quadratures).
constexpr int kMaxQuadratures = 4096;

// G += g * (u w^T + w u^T), i.e. the Hamiltonian term g * (u.r)(w.r) for
// commuting quadratures u.r and w.r.
void add_coupling(Eigen::MatrixXd& G, const Eigen::VectorXd& u,
                  const Eigen::VectorXd& w, double g) {
  G.noalias() += g * (u * w.transpose());
  G.noalias() += g * (w * u.transpose());
}

// Number-operator term: rate * (x_m^2 + p_m^2)/2 up to a constant.
void add_number_term(Eigen::MatrixXd& G, const ModeLayout& layout,
                     const std::string& mode, double rate) {
  const int m = layout.index_of(mode);
  G(ModeLayout::x_index(m), ModeLayout::x_index(m)) += rate;
  G(ModeLayout::p_index(m), ModeLayout::p_index(m)) += rate;
}

void check_common(const ScenarioParams& p) {
  if (p.gamma <= 0.0) {
    throw ConfigError("the measurement rate gamma must be positive");
  }
  if (p.t_f <= 0.0) {
    throw ConfigError("the protocol time t_f must be positive");
  }
  if (p.eta < 0.0) {
    throw ConfigError("the feedforward gain eta must be non-negative");
  }
}

}  // namespace

Variant variant_from_string(const std::string& name) {
  if (name == "conditional") return Variant::conditional;
  if (name == "feedforward") return Variant::feedforward;
  if (name == "dephasing") return Variant::dephasing;
  if (name == "dissipative_only") return Variant::dissipative_only;
  if (name == "reservoir_engineered") return Variant::reservoir_engineered;
  throw ConfigError("unknown variant '" + name + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::conditional:
      return "conditional";
    case Variant::feedforward:
      return "feedforward";
    case Variant::dephasing:
      return "dephasing";
    case Variant::dissipative_only:
      return "dissipative_only";
    case Variant::reservoir_engineered:
      return "reservoir_engineered";
  }
  throw ConfigError("invalid variant value");
}

BuiltScenario build_two_mode_scenario(const ScenarioParams& p) {
  check_common(p);

  BuiltScenario out;
  out.params = p;
  out.system_modes = {"a", "b"};

  const auto detuning = [&](const ModeLayout& layout, Eigen::MatrixXd& G) {
    add_number_term(G, layout, "a", p.omega + p.delta_omega);
    add_number_term(G, layout, "b", p.delta_omega - p.omega);
  };

  switch (p.variant) {
    case Variant::conditional: {
      out.layout = ModeLayout::of({"a", "b"});
      QuadraticHamiltonian H = QuadraticHamiltonian::zero(out.layout.dim());
      detuning(out.layout, H.G);
      const Eigen::VectorXd x_plus = quadrature_direction(
          out.layout, {{"a", kInvSqrt2}, {"b", kInvSqrt2}}, {});
      MonitoredQuadrature mon{x_plus, p.gamma};
      Segment seg;
      seg.duration = p.t_f;
      seg.ops = SegmentOps{H, {}, {mon}};
      seg.generators = assemble_generators(H, {}, {mon});
      out.schedule.segments.push_back(std::move(seg));
      break;
    }
    case Variant::dephasing: {
      out.layout = ModeLayout::of({"a", "b"});
      QuadraticHamiltonian H = QuadraticHamiltonian::zero(out.layout.dim());
      detuning(out.layout, H.G);
      const Eigen::VectorXd x_plus = quadrature_direction(
          out.layout, {{"a", kInvSqrt2}, {"b", kInvSqrt2}}, {});
      LinearJump jump{std::sqrt(p.gamma) *
                      x_plus.cast<std::complex<double>>()};
      Segment seg;
      seg.duration = p.t_f;
      seg.ops = SegmentOps{H, {jump}, {}};
      seg.generators = assemble_generators(H, {jump}, {});
      out.schedule.segments.push_back(std::move(seg));
      break;
    }
    case Variant::feedforward: {
      if (p.M < 1) {
        throw ConfigError(
            "the adaptive protocol needs at least one register (M >= 1)");
      }
      std::vector<std::string> labels = {"a", "b"};
      for (int l = 1; l <= p.M; ++l) {
        labels.push_back("c" + std::to_string(l));
      }
      out.layout = ModeLayout::of(labels);
      if (out.layout.dim() > kMaxQuadratures) {
        throw ConfigError("layout exceeds the size guard");
      }
      out.register_modes.assign(labels.begin() + 2, labels.end());

      const Eigen::VectorXd x_plus = quadrature_direction(
          out.layout, {{"a", kInvSqrt2}, {"b", kInvSqrt2}}, {});
      for (int l = 1; l <= p.M; ++l) {
        const std::string reg = "c" + std::to_string(l);
        QuadraticHamiltonian H = QuadraticHamiltonian::zero(out.layout.dim());
        detuning(out.layout, H.G);
        const Eigen::VectorXd y =
            quadrature_direction(out.layout, {{reg, 1.0}}, {});
        add_coupling(H.G, x_plus, y, p.gamma * p.eta);
        LinearJump jump{std::sqrt(p.gamma) *
                        (x_plus.cast<std::complex<double>>() -
                         std::complex<double>(0.0, p.eta) *
                             y.cast<std::complex<double>>())};
        Segment seg;
        seg.duration = p.t_f / p.M;
        seg.ops = SegmentOps{H, {jump}, {}};
        seg.generators = assemble_generators(H, {jump}, {});
        out.schedule.segments.push_back(std::move(seg));
      }
      break;
    }
    case Variant::dissipative_only: {
      // One engineered collective jump, no Hamiltonian: the non-directional
      // single-register analogue running at twice the base rate.
      out.layout = ModeLayout::of({"a", "b", "c1"});
      out.register_modes = {"c1"};
      const Eigen::VectorXd x_plus = quadrature_direction(
          out.layout, {{"a", kInvSqrt2}, {"b", kInvSqrt2}}, {});
      const Eigen::VectorXd y =
          quadrature_direction(out.layout, {{"c1", 1.0}}, {});
      QuadraticHamiltonian H = QuadraticHamiltonian::zero(out.layout.dim());
      LinearJump jump{std::sqrt(2.0 * p.gamma) *
                      (x_plus.cast<std::complex<double>>() -
                       std::complex<double>(0.0, p.eta) *
                           y.cast<std::complex<double>>())};
      Segment seg;
      seg.duration = p.t_f;
      seg.ops = SegmentOps{H, {jump}, {}};
      seg.generators = assemble_generators(H, {jump}, {});
      out.schedule.segments.push_back(std::move(seg));
      break;
    }
    case Variant::reservoir_engineered: {
      if (p.kappa <= 0.0) {
        throw ConfigError("the reservoir linewidth kappa must be positive");
      }
      out.layout = ModeLayout::of({"a", "b", "c1", "z"});
      out.register_modes = {"c1"};
      const Eigen::VectorXd x_plus = quadrature_direction(
          out.layout, {{"a", kInvSqrt2}, {"b", kInvSqrt2}}, {});
      const Eigen::VectorXd y =
          quadrature_direction(out.layout, {{"c1", 1.0}}, {});
      const Eigen::VectorXd x_z =
          quadrature_direction(out.layout, {{"z", 1.0}}, {});
      const Eigen::VectorXd p_z =
          quadrature_direction(out.layout, {}, {{"z", 1.0}});

      QuadraticHamiltonian H = QuadraticHamiltonian::zero(out.layout.dim());
      detuning(out.layout, H.G);
      add_coupling(H.G, x_plus, y, p.eta * p.gamma);
      const double g_sr = std::sqrt(p.gamma * p.kappa / 2.0);
      add_coupling(H.G, x_plus, x_z, g_sr);
      add_coupling(H.G, y, p_z, -p.eta * g_sr);
      const LinearJump jump = lowering_jump(out.layout, "z", p.kappa);
      Segment seg;
      seg.duration = p.t_f;
      seg.ops = SegmentOps{H, {jump}, {}};
      seg.generators = assemble_generators(H, {jump}, {});
      out.schedule.segments.push_back(std::move(seg));
      break;
    }
  }

  out.partition = Partition::against_rest(out.layout, {"a"});
  return out;
}

LatticeScenario build_lattice_scenario(const ScenarioParams& p) {
  check_common(p);
  if (p.n < 4 || p.n % 2 != 0) {
    throw ConfigError("the lattice size n must be even and at least 4");
  }
  if (p.variant != Variant::conditional && p.variant != Variant::feedforward) {
    throw ConfigError(
        "lattice scenarios support the conditional and feedforward variants");
  }

  LatticeScenario out;
  out.base.params = p;
  const int n = p.n;
  std::vector<std::string> labels;
  labels.reserve(n);
  for (int i = 1; i <= n; ++i) {
    labels.push_back("a" + std::to_string(i));
  }
  out.site_order = labels;
  out.base.system_modes = labels;

  const bool adaptive = (p.variant == Variant::feedforward);
  if (adaptive) {
    if (p.M < 1) {
      throw ConfigError(
          "the adaptive protocol needs at least one register (M >= 1)");
    }
    // Ascending window order: all bonds of window 1, then window 2, ...
    for (int l = 1; l <= p.M; ++l) {
      for (int j = 1; j <= n; ++j) {
        labels.push_back("c" + std::to_string(j) + "_" + std::to_string(l));
      }
    }
  }
  out.base.layout = ModeLayout::of(labels);
  if (out.base.layout.dim() > kMaxQuadratures) {
    throw ConfigError("lattice layout exceeds the size guard");
  }
  out.base.register_modes.assign(labels.begin() + n, labels.end());
  for (int j = 1; j <= n; ++j) {
    auto& regs = out.registers_by_bond[j];
    for (int l = 1; l <= p.M; ++l) {
      if (adaptive) {
        regs.push_back("c" + std::to_string(j) + "_" + std::to_string(l));
      }
    }
  }

  const ModeLayout& layout = out.base.layout;
  const auto detuning = [&](Eigen::MatrixXd& G) {
    for (int i = 1; i <= n; ++i) {
      const double rate =
          (i % 2 == 0) ? (p.omega + p.delta_omega) : (p.delta_omega - p.omega);
      add_number_term(G, layout, "a" + std::to_string(i), rate);
    }
  };
  const auto bond_direction = [&](int j) {
    const std::string left = "a" + std::to_string(j);
    const std::string right = "a" + std::to_string(j % n + 1);
    return quadrature_direction(layout,
                                {{left, kInvSqrt2}, {right, kInvSqrt2}}, {});
  };

  if (!adaptive) {
    QuadraticHamiltonian H = QuadraticHamiltonian::zero(layout.dim());
    detuning(H.G);
    std::vector<MonitoredQuadrature> monitors;
    for (int j = 1; j <= n; ++j) {
      monitors.push_back(MonitoredQuadrature{bond_direction(j), p.gamma});
    }
    Segment seg;
    seg.duration = p.t_f;
    seg.ops = SegmentOps{H, {}, monitors};
    seg.generators = assemble_generators(H, {}, monitors);
    out.base.schedule.segments.push_back(std::move(seg));
  } else {
    for (int l = 1; l <= p.M; ++l) {
      QuadraticHamiltonian H = QuadraticHamiltonian::zero(layout.dim());
      detuning(H.G);
      std::vector<LinearJump> jumps;
      for (int j = 1; j <= n; ++j) {
        const Eigen::VectorXd m_j = bond_direction(j);
        const Eigen::VectorXd y = quadrature_direction(
            layout,
            {{"c" + std::to_string(j) + "_" + std::to_string(l), 1.0}}, {});
        add_coupling(H.G, m_j, y, p.gamma * p.eta);
        jumps.push_back(
            LinearJump{std::sqrt(p.gamma) *
                       (m_j.cast<std::complex<double>>() -
                        std::complex<double>(0.0, p.eta) *
                            y.cast<std::complex<double>>())});
      }
      Segment seg;
      seg.duration = p.t_f / p.M;
      seg.ops = SegmentOps{H, jumps, {}};
      seg.generators = assemble_generators(H, jumps, {});
      out.base.schedule.segments.push_back(std::move(seg));
    }
  }

  // Half-chain partition: the first n/2 sites plus the registers of bonds
  // lying wholly inside them.
  std::vector<std::string> side_a;
  for (int i = 1; i <= n / 2; ++i) {
    side_a.push_back("a" + std::to_string(i));
  }
  for (int j = 1; j <= n / 2 - 1; ++j) {
    for (const auto& reg : out.registers_by_bond[j]) {
      side_a.push_back(reg);
    }
  }
  out.base.partition = Partition::against_rest(layout, side_a);
  return out;
}

BondSpectrum bond_spectrum(int n) {
  if (n < 4 || n % 2 != 0) {
    throw ConfigError("the lattice size n must be even and at least 4");
  }
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    kernel(j, j) = 1.0;
    kernel(j, (j + 1) % n) = 0.5;
    kernel((j + 1) % n, j) = 0.5;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kernel);
  if (es.info() != Eigen::Success) {
    throw PhysicsError("bond kernel eigensolve failed");
  }

  BondSpectrum out;
  out.lambdas.resize(n);
  out.basis.resize(n, n);
  for (int k = 0; k < n; ++k) {
    // Ascending from the solver; flip to descending.
    const int src = n - 1 - k;
    out.lambdas(k) = std::max(0.0, es.eigenvalues()(src));
    out.basis.col(k) = es.eigenvectors().col(src);
  }
  return out;
}

std::vector<double> page_curve(
    const GaussianState& s, const std::vector<std::string>& site_order,
    const std::map<int, std::vector<std::string>>& registers_by_bond) {
  const int n = static_cast<int>(site_order.size());
  if (n < 2) {
    throw ConfigError("page_curve needs at least two sites");
  }
  std::vector<double> values(n - 1, 0.0);
  parallel_for(n - 1, 0, [&](int idx) {
    const int cut = idx + 1;  // side A holds sites 1..cut
    std::vector<std::string> side_a(site_order.begin(),
                                    site_order.begin() + cut);
    for (const auto& [bond, regs] : registers_by_bond) {
      // Bond j couples sites j and j+1 (1-based; the last bond wraps), so it
      // lies wholly inside side A iff bond + 1 <= cut.
      if (bond + 1 <= cut) {
        side_a.insert(side_a.end(), regs.begin(), regs.end());
      }
    }
    const Partition partition = Partition::against_rest(s.layout, side_a);
    values[idx] = log_negativity(s, partition, /*validate=*/false);
  });
  return values;
}

Inefficiency inefficiency_metrics(const std::vector<double>& e_ref,
                                  const std::vector<double>& e_det) {
  if (e_ref.size() != e_det.size() || e_ref.empty()) {
    throw ConfigError("inefficiency inputs must be equal-length and nonempty");
  }
  Inefficiency out;
  out.pointwise.resize(e_ref.size());
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < e_ref.size(); ++i) {
    const double diff = e_ref[i] - e_det[i];
    out.pointwise[i] = (e_ref[i] > 0.0) ? diff / e_ref[i] : 0.0;
    sq_sum += diff * diff;
  }
  out.rms = std::sqrt(sq_sum / static_cast<double>(e_ref.size()));
  return out;
}

double stabilization_time(const std::vector<double>& times,
                          const std::vector<double>& values, double rate_tol,
                          double window, double cap) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ConfigError("stabilization_time needs matched series of length 2+");
  }
  if (window <= 0.0 || rate_tol <= 0.0) {
    throw ConfigError("stabilization window and tolerance must be positive");
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double t_hi = times[i];
    const double t_lo = t_hi - window;
    if (t_lo < times.front()) {
      continue;
    }
    // Average |dvalue/dt| over the trailing window: total variation / width.
    double variation = 0.0;
    double covered = 0.0;
    for (std::size_t j = 1; j <= i; ++j) {
      if (times[j] <= t_lo) {
        continue;
      }
      const double lo = std::max(times[j - 1], t_lo);
      const double span = times[j] - times[j - 1];
      if (span <= 0.0) {
        continue;
      }
      const double overlap = times[j] - lo;
      variation += std::abs(values[j] - values[j - 1]) * (overlap / span);
      covered += overlap;
    }
    if (covered >= 0.99 * window && variation / window < rate_tol) {
      return std::min(t_hi, cap);
    }
  }
  return cap;
}

}  // namespace quadsim
