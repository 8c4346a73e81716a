#include "quadsim/dense.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "quadsim/errors.hpp"
#include "quadsim/integrate.hpp"
#include "quadsim/measures.hpp"
#include "quadsim/rng.hpp"
#include "quadsim/threading.hpp"

namespace quadsim::dense {

namespace {

using Complex = std::complex<double>;

constexpr double kTraceDriftTol = 1e-8;

void check_same_space(const HilbertSpec& a, const HilbertSpec& b) {
  if (a.dims != b.dims) {
    throw ConfigError("operators act on different Hilbert spaces");
  }
}

// Digit decomposition of a global index, site 0 most significant.
std::vector<int> digits_of(int index, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
    out[s] = index % dims[s];
    index /= dims[s];
  }
  return out;
}

int index_of_digits(const std::vector<int>& digits,
                    const std::vector<int>& dims) {
  int index = 0;
  for (std::size_t s = 0; s < dims.size(); ++s) {
    index = index * dims[s] + digits[s];
  }
  return index;
}

// I_(before) x local x I_(after) as a sparse global operator.
SparseOp embed(const HilbertSpec& space, int site,
               const Eigen::MatrixXcd& local) {
  space.validate();
  if (site < 0 || site >= space.n_sites()) {
    throw ConfigError("operator site index out of range");
  }
  const int d = space.dims[site];
  if (local.rows() != d || local.cols() != d) {
    throw ConfigError("local operator does not match the site dimension");
  }
  int before = 1;
  int after = 1;
  for (int s = 0; s < site; ++s) {
    before *= space.dims[s];
  }
  for (int s = site + 1; s < space.n_sites(); ++s) {
    after *= space.dims[s];
  }

  std::vector<Eigen::Triplet<Complex>> trips;
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) {
      if (local(r, c) == Complex(0.0, 0.0)) {
        continue;
      }
      for (int b = 0; b < before; ++b) {
        for (int a = 0; a < after; ++a) {
          trips.emplace_back((b * d + r) * after + a, (b * d + c) * after + a,
                             local(r, c));
        }
      }
    }
  }
  SparseOp mat(space.total(), space.total());
  mat.setFromTriplets(trips.begin(), trips.end());
  mat.makeCompressed();
  return mat;
}

Eigen::MatrixXcd local_lowering(int d) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 1; n < d; ++n) {
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  }
  return a;
}

DenseOperator zero_op(const HilbertSpec& space) {
  return DenseOperator{space, SparseOp(space.total(), space.total())};
}

}  // namespace

int HilbertSpec::total() const {
  int prod = 1;
  for (int d : dims) {
    prod *= d;
  }
  return prod;
}

void HilbertSpec::validate() const {
  if (dims.empty()) {
    throw ConfigError("Hilbert space needs at least one subsystem");
  }
  long long prod = 1;
  for (int d : dims) {
    if (d < 2) {
      throw ConfigError("every subsystem dimension must be at least 2");
    }
    prod *= d;
    if (prod > max_total) {
      throw ConfigError("Hilbert space exceeds the size guard of " +
                        std::to_string(max_total));
    }
  }
}

DenseOperator identity_op(const HilbertSpec& space) {
  space.validate();
  SparseOp mat(space.total(), space.total());
  mat.setIdentity();
  return DenseOperator{space, std::move(mat)};
}

DenseOperator pauli(const HilbertSpec& space, int site, char axis) {
  if (site < 0 || site >= space.n_sites() || space.dims[site] != 2) {
    throw ConfigError("Pauli operators require a dimension-2 site");
  }
  Eigen::MatrixXcd local(2, 2);
  switch (axis) {
    case 'x':
      local << 0, 1, 1, 0;
      break;
    case 'y':
      local << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case 'z':
      local << 1, 0, 0, -1;
      break;
    default:
      throw ConfigError("Pauli axis must be 'x', 'y' or 'z'");
  }
  return DenseOperator{space, embed(space, site, local)};
}

DenseOperator lowering(const HilbertSpec& space, int site) {
  space.validate();
  return DenseOperator{space, embed(space, site,
                                    local_lowering(space.dims[site]))};
}

DenseOperator number_op(const HilbertSpec& space, int site) {
  space.validate();
  const int d = space.dims[site];
  Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 0; n < d; ++n) {
    local(n, n) = static_cast<double>(n);
  }
  return DenseOperator{space, embed(space, site, local)};
}

DenseOperator truncated_x(const HilbertSpec& space, int site) {
  space.validate();
  const Eigen::MatrixXcd a = local_lowering(space.dims[site]);
  const Eigen::MatrixXcd local = (a + a.adjoint()) / std::sqrt(2.0);
  return DenseOperator{space, embed(space, site, local)};
}

DenseOperator truncated_p(const HilbertSpec& space, int site) {
  space.validate();
  const Eigen::MatrixXcd a = local_lowering(space.dims[site]);
  const Eigen::MatrixXcd local =
      Complex(0, -1) * (a - a.adjoint()) / std::sqrt(2.0);
  return DenseOperator{space, embed(space, site, local)};
}

DenseOperator operator+(const DenseOperator& a, const DenseOperator& b) {
  check_same_space(a.space, b.space);
  return DenseOperator{a.space, a.mat + b.mat};
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  check_same_space(a.space, b.space);
  return DenseOperator{a.space, SparseOp(a.mat * b.mat)};
}

DenseOperator operator*(Complex scale, const DenseOperator& a) {
  return DenseOperator{a.space, SparseOp(scale * a.mat)};
}

DenseState DenseState::pure(const HilbertSpec& space,
                            const Eigen::VectorXcd& psi) {
  space.validate();
  if (psi.size() != space.total()) {
    throw ConfigError("state vector does not match the Hilbert space");
  }
  const double norm = psi.norm();
  if (norm < 1e-12) {
    throw ConfigError("state vector has (near-)zero norm");
  }
  DenseState out;
  out.space = space;
  out.rho = (psi * psi.adjoint()) / (norm * norm);
  return out;
}

DenseState DenseState::ground(const HilbertSpec& space) {
  space.validate();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.total());
  psi(0) = 1.0;
  return pure(space, psi);
}

namespace {

// Preassembled master-equation right-hand side
//   rhs(rho) = K rho + (K rho)^+ + sum_j L_j rho L_j^+,
// with K = -iH - (1/2) sum_j L_j^+ L_j, valid for Hermitian rho.
struct LindbladRhs {
  SparseOp K;
  std::vector<SparseOp> ls;
  int dim;

  LindbladRhs(const DenseOperator& H, const std::vector<DenseOperator>& jumps)
      : dim(H.space.total()) {
    SparseOp damp(dim, dim);
    for (const auto& jump : jumps) {
      check_same_space(H.space, jump.space);
      damp = SparseOp(damp + SparseOp(jump.mat.adjoint() * jump.mat));
      ls.push_back(jump.mat);
    }
    K = SparseOp(Complex(0, -1) * H.mat - Complex(0.5, 0) * damp);
    K.makeCompressed();
  }

  void operator()(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out,
                  Eigen::MatrixXcd& work) const {
    work.noalias() = K * rho;
    out = work + work.adjoint();
    for (const auto& l : ls) {
      work.noalias() = l * rho;
      out.noalias() += work * l.adjoint();
    }
  }
};

void rk4_lindblad_step(const LindbladRhs& rhs, double h, Eigen::MatrixXcd& rho,
                       Eigen::MatrixXcd& k1, Eigen::MatrixXcd& k2,
                       Eigen::MatrixXcd& k3, Eigen::MatrixXcd& k4,
                       Eigen::MatrixXcd& stage, Eigen::MatrixXcd& work) {
  rhs(rho, k1, work);
  stage = rho + (0.5 * h) * k1;
  rhs(stage, k2, work);
  stage = rho + (0.5 * h) * k2;
  rhs(stage, k3, work);
  stage = rho + h * k3;
  rhs(stage, k4, work);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

  rho = ((rho + rho.adjoint()) * 0.5).eval();
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > kTraceDriftTol) {
    throw PhysicsError("master-equation trace drifted by " +
                       std::to_string(std::abs(trace - 1.0)) +
                       " in one step");
  }
  rho /= trace;
}

}  // namespace

DenseState evolve_lindblad(DenseState state, const DenseOperator& H,
                           const std::vector<DenseOperator>& jumps,
                           double duration, double dt) {
  DenseSeries series = run_lindblad(std::move(state), H, jumps, duration,
                                    {duration}, dt);
  return std::move(series.states.back());
}

DenseSeries run_lindblad(DenseState state, const DenseOperator& H,
                         const std::vector<DenseOperator>& jumps,
                         double duration, const std::vector<double>& sample_times,
                         double dt) {
  check_same_space(state.space, H.space);
  if (duration < 0.0 || dt <= 0.0) {
    throw ConfigError("invalid master-equation duration or step");
  }
  const LindbladRhs rhs(H, jumps);
  const int dim = state.space.total();
  Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim),
      stage(dim, dim), work(dim, dim);

  std::vector<double> samples;
  for (double t : sample_times) {
    samples.push_back(std::clamp(t, 0.0, duration));
  }
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> landed_times;
  std::vector<DenseState> landed_states;
  double t = 0.0;
  std::size_t next = 0;
  const double tol = 1e-12 * std::max(1.0, duration);
  const auto land = [&](double at) {
    bool sampled = false;
    while (next < sorted.size() && sorted[next] <= at + tol) {
      ++next;
      sampled = true;
    }
    if (sampled) {
      landed_times.push_back(at);
      landed_states.push_back(state);
    }
  };
  land(0.0);
  while (t < duration - tol) {
    double stop = duration;
    if (next < sorted.size() && sorted[next] < duration - tol) {
      stop = sorted[next];
    }
    const double span = stop - t;
    if (span > tol) {
      const int steps = std::max(1, static_cast<int>(std::ceil(span / dt)));
      const double h = span / steps;
      for (int i = 0; i < steps; ++i) {
        rk4_lindblad_step(rhs, h, state.rho, k1, k2, k3, k4, stage, work);
      }
    }
    t = stop;
    land(t);
  }

  DenseSeries out;
  for (double want : samples) {
    std::size_t best = 0;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < landed_times.size(); ++i) {
      const double err = std::abs(landed_times[i] - want);
      if (err < best_err) {
        best_err = err;
        best = i;
      }
    }
    if (landed_times.empty() || best_err > 1e-9 * std::max(1.0, duration)) {
      throw PhysicsError("internal error: sample time was not landed on");
    }
    out.times.push_back(want);
    out.states.push_back(landed_states[best]);
  }
  return out;
}

SmeResult sample_sme_trajectory(const HilbertSpec& space,
                                const Eigen::VectorXcd& psi0,
                                const DenseOperator& H,
                                const DenseOperator& monitor, double rate,
                                double duration,
                                const std::vector<double>& sample_times,
                                double dt, std::uint64_t seed) {
  space.validate();
  check_same_space(space, H.space);
  check_same_space(space, monitor.space);
  if (psi0.size() != space.total()) {
    throw ConfigError("initial state does not match the Hilbert space");
  }
  if (rate <= 0.0 || duration <= 0.0 || dt <= 0.0) {
    throw ConfigError("invalid monitoring rate, duration or step");
  }

  const int steps =
      std::max(1, static_cast<int>(std::ceil(duration / dt)));
  const double h = duration / steps;
  const double sqrt_h = std::sqrt(h);
  const double sqrt_rate = std::sqrt(rate);

  // Map each requested sample time onto its nearest step boundary.
  std::vector<std::pair<int, std::size_t>> landings;  // (step index, output)
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double t = std::clamp(sample_times[i], 0.0, duration);
    const int idx =
        std::clamp(static_cast<int>(std::llround(t / h)), 0, steps);
    landings.emplace_back(idx, i);
  }
  std::sort(landings.begin(), landings.end());

  SmeResult out;
  out.times.resize(sample_times.size());
  out.psis.resize(sample_times.size());

  Eigen::VectorXcd psi = psi0.normalized();
  NormalStream rng(seed);
  Eigen::VectorXcd xpsi(psi.size()), xxpsi(psi.size()), hpsi(psi.size());

  std::size_t next = 0;
  const auto store_at = [&](int step_idx) {
    while (next < landings.size() && landings[next].first == step_idx) {
      out.times[landings[next].second] = sample_times[landings[next].second];
      out.psis[landings[next].second] = psi;
      ++next;
    }
  };
  store_at(0);

  for (int i = 0; i < steps; ++i) {
    xpsi.noalias() = monitor.mat * psi;
    const double avg = std::real(psi.dot(xpsi));
    xxpsi.noalias() = monitor.mat * xpsi;
    hpsi.noalias() = H.mat * psi;
    const double dw = sqrt_h * rng.next();
    psi += h * (Complex(0, -1) * hpsi -
                (0.5 * rate) * (xxpsi - 2.0 * avg * xpsi +
                                (avg * avg) * psi)) +
           (sqrt_rate * dw) * (xpsi - avg * psi);
    const double norm = psi.norm();
    if (norm < 1e-12) {
      throw PhysicsError("trajectory state norm collapsed");
    }
    psi /= norm;
    store_at(i + 1);
  }
  return out;
}

Eigen::MatrixXcd partial_trace(const DenseState& state,
                               const std::vector<int>& keep_sites) {
  const auto& dims = state.space.dims;
  for (int s : keep_sites) {
    if (s < 0 || s >= state.space.n_sites()) {
      throw ConfigError("partial_trace site index out of range");
    }
  }
  int keep_dim = 1;
  for (int s : keep_sites) {
    keep_dim *= dims[s];
  }
  const int total = state.space.total();

  // Map each global index to (kept digits index, traced digits index).
  std::vector<int> kept_of(total), traced_of(total);
  std::vector<bool> is_kept(dims.size(), false);
  for (int s : keep_sites) {
    is_kept[s] = true;
  }
  for (int g = 0; g < total; ++g) {
    const std::vector<int> digit = digits_of(g, dims);
    int k = 0;
    for (int s : keep_sites) {
      k = k * dims[s] + digit[s];
    }
    int tr = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
      if (!is_kept[s]) {
        tr = tr * dims[s] + digit[s];
      }
    }
    kept_of[g] = k;
    traced_of[g] = tr;
  }

  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(keep_dim, keep_dim);
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      if (traced_of[i] == traced_of[j]) {
        out(kept_of[i], kept_of[j]) += state.rho(i, j);
      }
    }
  }
  return out;
}

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      ((rho + rho.adjoint()) * 0.5).eval());
  if (es.info() != Eigen::Success) {
    throw PhysicsError("entropy eigensolve failed");
  }
  double entropy = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-14) {
      entropy -= p * std::log(p);
    }
  }
  return entropy;
}

double dense_log_negativity(const DenseState& state,
                            const std::vector<int>& side_a_sites) {
  const auto& dims = state.space.dims;
  if (side_a_sites.empty() ||
      side_a_sites.size() >= dims.size()) {
    throw ConfigError("side A must be a nonempty strict subset of the sites");
  }
  std::vector<bool> in_a(dims.size(), false);
  for (int s : side_a_sites) {
    if (s < 0 || s >= state.space.n_sites()) {
      throw ConfigError("partition site index out of range");
    }
    if (in_a[s]) {
      throw ConfigError("partition site listed twice");
    }
    in_a[s] = true;
  }

  const int total = state.space.total();
  // Partial transpose on side A: swap the side-A digits between row and
  // column indices.
  Eigen::MatrixXcd pt(total, total);
  std::vector<std::vector<int>> digit_cache(total);
  for (int g = 0; g < total; ++g) {
    digit_cache[g] = digits_of(g, dims);
  }
  std::vector<int> row_digits(dims.size()), col_digits(dims.size());
  for (int i = 0; i < total; ++i) {
    for (int j = 0; j < total; ++j) {
      row_digits = digit_cache[i];
      col_digits = digit_cache[j];
      for (std::size_t s = 0; s < dims.size(); ++s) {
        if (in_a[s]) {
          std::swap(row_digits[s], col_digits[s]);
        }
      }
      pt(index_of_digits(row_digits, dims),
         index_of_digits(col_digits, dims)) = state.rho(i, j);
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      ((pt + pt.adjoint()) * 0.5).eval());
  if (es.info() != Eigen::Success) {
    throw PhysicsError("partial-transpose eigensolve failed");
  }
  const double trace_norm = es.eigenvalues().cwiseAbs().sum();
  return std::log(std::max(trace_norm, 1.0));
}

SmeEnsemble sme_mean_log_negativity(const HilbertSpec& space,
                                    const Eigen::VectorXcd& psi0,
                                    const DenseOperator& H,
                                    const DenseOperator& monitor, double rate,
                                    double duration,
                                    const std::vector<double>& sample_times,
                                    double dt, std::uint64_t base_seed,
                                    int count,
                                    const std::vector<int>& side_a_sites,
                                    int workers) {
  if (count < 2) {
    throw ConfigError("trajectory ensembles need at least two members");
  }
  const std::size_t n_times = sample_times.size();
  SmeEnsemble out;
  out.times = sample_times;
  out.mean_en.assign(n_times, 0.0);
  out.sem_en.assign(n_times, 0.0);

  std::vector<double> sum(n_times, 0.0), sum_sq(n_times, 0.0);
  const int chunk = 64;
  std::vector<std::vector<double>> buffer(chunk);
  for (int start = 0; start < count; start += chunk) {
    const int batch = std::min(chunk, count - start);
    parallel_for(batch, workers, [&](int b) {
      const SmeResult traj = sample_sme_trajectory(
          space, psi0, H, monitor, rate, duration, sample_times, dt,
          base_seed + static_cast<std::uint64_t>(start + b));
      auto& ens = buffer[b];
      ens.resize(n_times);
      for (std::size_t i = 0; i < n_times; ++i) {
        const DenseState pure = DenseState::pure(space, traj.psis[i]);
        ens[i] = dense_log_negativity(pure, side_a_sites);
      }
    });
    for (int b = 0; b < batch; ++b) {
      for (std::size_t i = 0; i < n_times; ++i) {
        sum[i] += buffer[b][i];
        sum_sq[i] += buffer[b][i] * buffer[b][i];
      }
    }
  }
  for (std::size_t i = 0; i < n_times; ++i) {
    const double mean = sum[i] / count;
    out.mean_en[i] = mean;
    const double var =
        std::max(0.0, (sum_sq[i] - count * mean * mean) / (count - 1.0));
    out.sem_en[i] = std::sqrt(var / count);
  }
  return out;
}

BellRegisterReport bell_register_example() {
  HilbertSpec space{{2, 2, 2}};
  const auto idx = [](int q1, int q2, int q3) {
    return (q1 * 2 + q2) * 2 + q3;
  };
  // x-basis states |+>, |-> on each of the first two qubits.
  const auto put_pair = [&](Eigen::VectorXcd& psi, int s1, int s2,
                            double amp, int q3) {
    // s = 0 -> |+>, s = 1 -> |->; expand into the z basis.
    for (int z1 = 0; z1 < 2; ++z1) {
      for (int z2 = 0; z2 < 2; ++z2) {
        const double w1 = (s1 == 1 && z1 == 1) ? -0.5 : 0.5;
        const double w2 = (s2 == 1 && z2 == 1) ? -1.0 : 1.0;
        psi(idx(z1, z2, q3)) += amp * w1 * w2;
      }
    }
  };

  // Bell pair (|++> + |-->)/sqrt(2) tagged by register |0>.
  Eigen::VectorXcd psi_plus = Eigen::VectorXcd::Zero(8);
  put_pair(psi_plus, 0, 0, 1.0 / std::sqrt(2.0), 0);
  put_pair(psi_plus, 1, 1, 1.0 / std::sqrt(2.0), 0);
  // Bell pair (|+-> + |-+>)/sqrt(2) tagged by register |1>.
  Eigen::VectorXcd psi_minus = Eigen::VectorXcd::Zero(8);
  put_pair(psi_minus, 0, 1, 1.0 / std::sqrt(2.0), 1);
  put_pair(psi_minus, 1, 0, 1.0 / std::sqrt(2.0), 1);

  DenseState state;
  state.space = space;
  state.rho = 0.5 * (psi_plus.normalized() * psi_plus.normalized().adjoint() +
                     psi_minus.normalized() * psi_minus.normalized().adjoint());

  BellRegisterReport report;
  report.en_first_vs_rest = dense_log_negativity(state, {0});
  report.en_pair_vs_register = dense_log_negativity(state, {0, 1});
  const double s_pair = von_neumann_entropy(partial_trace(state, {0, 1}));
  const double s_reg = von_neumann_entropy(partial_trace(state, {2}));
  const double s_all = von_neumann_entropy(state.rho);
  report.mi_pair_register = s_pair + s_reg - s_all;
  return report;
}

OracleReport oracle_compare(const BuiltScenario& scenario, int n_tr,
                            double horizon,
                            const std::vector<double>& sample_times,
                            double dt) {
  if (n_tr < 2) {
    throw ConfigError("the Fock truncation must keep at least two levels");
  }
  const int n_modes = scenario.layout.n_modes();
  HilbertSpec space{std::vector<int>(n_modes, n_tr)};
  space.validate();

  // Truncated quadrature operators in layout order (x_1, p_1, x_2, ...).
  std::vector<DenseOperator> quads;
  for (int m = 0; m < n_modes; ++m) {
    quads.push_back(truncated_x(space, m));
    quads.push_back(truncated_p(space, m));
  }

  // Trim the schedule to the requested horizon.
  Schedule trimmed;
  double acc = 0.0;
  for (const auto& seg : scenario.schedule.segments) {
    if (acc >= horizon) {
      break;
    }
    Segment part = seg;
    part.duration = std::min(seg.duration, horizon - acc);
    trimmed.segments.push_back(std::move(part));
    acc += seg.duration;
  }
  if (trimmed.segments.empty()) {
    throw ConfigError("oracle horizon does not cover any schedule segment");
  }

  // Gaussian reference.
  const SnapshotSeries gauss =
      run_schedule(vacuum_state(scenario.layout), trimmed,
                   EvolutionMode::unconditional, sample_times);

  // Dense run, segment by segment, landing on the same sample times.
  DenseState rho = DenseState::ground(space);
  std::vector<DenseState> dense_states(sample_times.size(),
                                       DenseState::ground(space));
  std::vector<bool> have(sample_times.size(), false);
  double t0 = 0.0;
  for (const auto& seg : trimmed.segments) {
    if (!seg.ops.monitors.empty()) {
      throw ConfigError(
          "the cross-engine oracle covers unconditional schedules only");
    }
    const int dim = scenario.layout.dim();
    DenseOperator H = zero_op(space);
    for (int i = 0; i < dim; ++i) {
      if (std::abs(seg.ops.H.f(i)) > 0.0) {
        H.mat = SparseOp(H.mat + SparseOp(Complex(seg.ops.H.f(i), 0) *
                                          quads[i].mat));
      }
      for (int j = 0; j < dim; ++j) {
        const double g = seg.ops.H.G(i, j);
        if (g != 0.0) {
          H.mat = SparseOp(H.mat +
                           SparseOp(Complex(0.5 * g, 0) *
                                    SparseOp(quads[i].mat * quads[j].mat)));
        }
      }
    }
    std::vector<DenseOperator> jumps;
    for (const auto& jump : seg.ops.jumps) {
      DenseOperator L = zero_op(space);
      for (int i = 0; i < dim; ++i) {
        if (jump.c(i) != Complex(0, 0)) {
          L.mat = SparseOp(L.mat + SparseOp(jump.c(i) * quads[i].mat));
        }
      }
      jumps.push_back(std::move(L));
    }

    // Sample times inside this segment, plus the segment end so the next
    // segment can continue from the right state.
    std::vector<double> local_samples;
    std::vector<std::size_t> local_index;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      const double t = std::clamp(sample_times[i], 0.0, trimmed.total_time());
      if (!have[i] && t <= t0 + seg.duration + 1e-12) {
        local_samples.push_back(std::clamp(t - t0, 0.0, seg.duration));
        local_index.push_back(i);
      }
    }
    local_samples.push_back(seg.duration);
    DenseSeries series =
        run_lindblad(std::move(rho), H, jumps, seg.duration, local_samples, dt);
    for (std::size_t k = 0; k < local_index.size(); ++k) {
      dense_states[local_index[k]] = series.states[k];
      have[local_index[k]] = true;
    }
    rho = std::move(series.states.back());
    t0 += seg.duration;
  }

  OracleReport report{0.0, 0.0, 0.0, false};
  std::vector<int> side_a_sites;
  for (const auto& label : scenario.partition.side_a) {
    side_a_sites.push_back(scenario.layout.index_of(label));
  }

  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (!have[i]) {
      throw PhysicsError("internal error: dense sample missing");
    }
    const DenseState& ds = dense_states[i];
    const GaussianState& gs = gauss.states[i];
    const int dim = scenario.layout.dim();

    Eigen::VectorXd first(dim);
    std::vector<Eigen::MatrixXcd> quad_rho(dim);
    for (int a = 0; a < dim; ++a) {
      quad_rho[a] = quads[a].mat * ds.rho;
      first(a) = quad_rho[a].trace().real();
    }
    report.max_moment_error = std::max(
        report.max_moment_error, (first - gs.mean).cwiseAbs().maxCoeff());
    for (int a = 0; a < dim; ++a) {
      for (int b = a; b < dim; ++b) {
        const Complex anti =
            (quads[a].mat * quad_rho[b]).eval().trace() +
            (quads[b].mat * quad_rho[a]).eval().trace();
        const double second =
            anti.real() - 2.0 * first(a) * first(b);
        report.max_moment_error = std::max(
            report.max_moment_error, std::abs(second - gs.cov(a, b)));
      }
    }

    const double en_dense = dense_log_negativity(ds, side_a_sites);
    const double en_gauss = log_negativity(gs, scenario.partition);
    report.max_abs_en_error =
        std::max(report.max_abs_en_error, std::abs(en_dense - en_gauss));

    for (int m = 0; m < n_modes; ++m) {
      const Eigen::MatrixXcd reduced = partial_trace(ds, {m});
      report.max_top_population = std::max(
          report.max_top_population, reduced(n_tr - 1, n_tr - 1).real());
    }
  }
  report.truncation_warning = report.max_top_population > 1e-4;
  return report;
}

}  // namespace quadsim::dense
