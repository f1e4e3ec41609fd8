// Copyright 2026 The metrokit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "metrokit/protocols.h"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <functional>
#include <numbers>

#include "metrokit/channels.h"
#include "metrokit/error.h"

namespace metrokit {
namespace {

using Super = Eigen::Matrix<Complex, 16, 16>;
using VecRho = Eigen::Matrix<Complex, 16, 1>;

constexpr double kTailTarget = 1e-13;
constexpr double kTailLimit = 1e-12;

Mat4 embed_probe(const Mat2& a) { return kron(a, Mat2::Identity()); }

// vec(A X B) = (B^T (x) A) vec(X), column-major.
Super sandwich(const Mat4& a, const Mat4& b) { return kron(b.transpose(), a); }

VecRho vec_of(const Mat4& m) { return Eigen::Map<const VecRho>(m.data()); }
// Hermitian part; the propagated vectors pick up round-off asymmetry.
Mat4 mat_of(const VecRho& v) {
  const Mat4 m = Eigen::Map<const Mat4>(v.data());
  return 0.5 * (m + m.adjoint());
}
double trace_of(const VecRho& v) {
  return (v(0) + v(5) + v(10) + v(15)).real();
}

struct CorrectionModel {
  Mat2 hamiltonian;                            // multiplies omega / 2
  std::vector<std::pair<double, Mat2>> jumps;  // (rate, operator)
  Mat2 correction;
};

struct Branch {
  VecRho rho = VecRho::Zero();
  VecRho rhodot = VecRho::Zero();
};

struct SimulationOutput {
  std::vector<Branch> branches;  // index = detected error count
  double tail = 0.0;
};

int register_cap(double lambda) {
  if (!(lambda > 0.0)) return 4;
  int m = 4;
  while (boost::math::gamma_p(static_cast<double>(m + 1), lambda) >= kTailTarget) ++m;
  return m;
}

SimulationOutput run_correction(const CorrectionModel& model, double omega, double t_total,
                                double dt, int m_max) {
  const long steps = std::max(1L, std::lround(t_total / dt));
  const double h = t_total / static_cast<double>(steps);
  const Mat4 id4 = Mat4::Identity();

  const Mat4 ham = embed_probe(model.hamiltonian);
  const Super dl = -kI * 0.5 * (sandwich(ham, id4) - sandwich(id4, ham));
  Super lind = omega * dl;
  double jump_rate = 0.0;
  for (const auto& [rate, op] : model.jumps) {
    const Mat4 j = embed_probe(op);
    const Mat4 jj = j.adjoint() * j;
    lind += rate * (sandwich(j, j.adjoint()) - 0.5 * sandwich(jj, id4) - 0.5 * sandwich(id4, jj));
    jump_rate += rate * operator_norm(op) * operator_norm(op);
  }
  // Exact step and its omega-derivative from one block exponential.
  CMatrix big = CMatrix::Zero(32, 32);
  big.topLeftCorner(16, 16) = h * lind;
  big.bottomRightCorner(16, 16) = h * lind;
  big.topRightCorner(16, 16) = h * dl;
  const CMatrix ex = expm(big);
  const Super step = ex.topLeftCorner(16, 16);
  const Super dstep = ex.topRightCorner(16, 16);

  Mat4 pc = Mat4::Zero();
  pc(0, 0) = pc(3, 3) = 1.0;
  const Mat4 pe = id4 - pc;
  const Mat4 fix = embed_probe(model.correction);
  const Super to_code = sandwich(pc, pc);
  const Super to_err = sandwich(fix * pe, pe * fix.adjoint());
  const Super code = to_code * step, err = to_err * step;
  const Super dcode = to_code * dstep, derr = to_err * dstep;

  if (m_max <= 0) {
    const double leak = 0.25 * omega * omega * h;
    m_max = register_cap((jump_rate + leak) * t_total);
  }
  SimulationOutput out;
  out.branches.assign(static_cast<size_t>(m_max) + 1, Branch{});
  Mat4 bell = Mat4::Zero();
  bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
  out.branches[0].rho = vec_of(bell);

  std::vector<Branch> next(out.branches.size());
  int top = 0;  // highest populated error count
  for (long s = 0; s < steps; ++s) {
    for (int m = 0; m <= std::min(top + 1, m_max); ++m) next[m] = Branch{};
    for (int m = 0; m <= top; ++m) {
      const Branch& b = out.branches[m];
      next[m].rho.noalias() += code * b.rho;
      next[m].rhodot.noalias() += code * b.rhodot;
      next[m].rhodot.noalias() += dcode * b.rho;
      if (m + 1 <= m_max) {
        next[m + 1].rho.noalias() += err * b.rho;
        next[m + 1].rhodot.noalias() += err * b.rhodot;
        next[m + 1].rhodot.noalias() += derr * b.rho;
      } else {
        out.tail += trace_of(err * b.rho);
      }
    }
    top = std::min(top + 1, m_max);
    for (int m = 0; m <= top; ++m) std::swap(out.branches[m], next[m]);
  }
  out.branches.resize(static_cast<size_t>(top) + 1);
  return out;
}

void require_tail(double tail) {
  if (tail >= kTailLimit) {
    throw Error(ErrorKind::kIncreaseRegister, "truncated error-count tail exceeds 1e-12");
  }
}

double min_inverse(double a, double b) {
  const double ia = a > 0.0 ? 1.0 / a : std::numeric_limits<double>::infinity();
  const double ib = b > 0.0 ? 1.0 / b : std::numeric_limits<double>::infinity();
  return std::min(ia, ib);
}

CorrectionModel xy_model(double gamma, double p) {
  CorrectionModel m;
  m.hamiltonian = pauli(3);
  m.jumps = {{gamma * p / 2.0, pauli(1)}, {gamma * (1.0 - p) / 2.0, pauli(2)}};
  // Undo the likelier error.
  m.correction = p <= 0.5 ? pauli(2) : pauli(1);
  return m;
}

}  // namespace

CorrectionRun simulate_rank1_correction(double theta, double gamma, double omega, double t_total,
                                        double dt) {
  if (!(theta > 0.0 && theta <= std::numbers::pi / 2.0 + 1e-15)) {
    throw Error(ErrorKind::kInvalidInput, "theta must lie in (0, pi/2]");
  }
  if (!(gamma >= 0.0) || !(t_total > 0.0) || !(dt > 0.0) || !std::isfinite(omega)) {
    throw Error(ErrorKind::kInvalidInput, "need gamma >= 0, t > 0, dt > 0");
  }
  if (dt > 1e-2 * min_inverse(gamma, std::abs(omega))) {
    throw Error(ErrorKind::kStepTooLarge, "dt must not exceed 1e-2 min(1/gamma, 1/omega)");
  }
  CorrectionModel m;
  m.hamiltonian = std::sin(theta) * pauli(3) + std::cos(theta) * pauli(1);
  m.jumps = {{gamma / 2.0, pauli(1)}};
  m.correction = pauli(1);
  const SimulationOutput sim = run_correction(m, omega, t_total, dt, 0);
  require_tail(sim.tail);

  CorrectionRun run;
  VecRho rho = VecRho::Zero(), rhodot = VecRho::Zero();
  for (size_t k = 0; k < sim.branches.size(); ++k) {
    rho += sim.branches[k].rho;
    rhodot += sim.branches[k].rhodot;
    run.state.reg[static_cast<int>(k)] = trace_of(sim.branches[k].rho);
  }
  run.state.rho = mat_of(rho);
  run.state.rhodot = mat_of(rhodot);
  run.state.tail = sim.tail;
  run.state.t = t_total;
  run.qfi = qfi_spectral(run.state.rho, run.state.rhodot);
  return run;
}

SequentialBlocks xy_sequential_blocks(double gamma, double p, double omega, double t,
                                      const SequentialOptions& options) {
  if (!(gamma > 0.0) || !(p > 0.0 && p < 1.0) || !(t > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "need gamma > 0, 0 < p < 1, t > 0");
  }
  const double dt = options.dt > 0.0 ? options.dt : 1e-3 * min_inverse(gamma, std::abs(omega));
  if (dt > 1e-3 / gamma * (1.0 + 1e-12)) {
    throw Error(ErrorKind::kStepTooLarge, "dt must not exceed 1e-3 / gamma");
  }
  const SimulationOutput sim = run_correction(xy_model(gamma, p), omega, t, dt, options.m_max);
  SequentialBlocks out;
  out.tail = sim.tail;
  for (const Branch& b : sim.branches) out.blocks.push_back({mat_of(b.rho), mat_of(b.rhodot)});
  return out;
}

double xy_sequential_qfi(double gamma, double p, double omega, double t, bool keep_register,
                         const SequentialOptions& options) {
  if (!(gamma > 0.0) || !(p > 0.0 && p < 1.0) || !(t >= 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "need gamma > 0, 0 < p < 1, t >= 0");
  }
  if (options.mode == SequentialMode::kAnalytic) {
    const double q = std::min(p, 1.0 - p);
    const double rate = keep_register ? 2.0 * gamma * p * (1.0 - p) : 2.0 * gamma * q;
    return t * t * std::exp(-rate * t);
  }
  const SequentialBlocks sb = xy_sequential_blocks(gamma, p, omega, t, options);
  require_tail(sb.tail);
  if (keep_register) {
    double f = 0.0;
    for (const ParamState& b : sb.blocks) f += qfi_spectral(b.rho, b.rhodot);
    return f;
  }
  CMatrix rho = CMatrix::Zero(4, 4), rhodot = CMatrix::Zero(4, 4);
  for (const ParamState& b : sb.blocks) {
    rho += b.rho;
    rhodot += b.rhodot;
  }
  return qfi_spectral(rho, rhodot);
}

RateAndTime sequential_rate(double gamma, double p, bool keep_register) {
  if (p == 0.0 || p == 1.0) {
    throw Error(ErrorKind::kNotApplicable, "p in {0, 1} is removable rank-one Pauli noise");
  }
  if (!(p > 0.0 && p < 1.0) || !(gamma > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "need gamma > 0 and 0 < p < 1");
  }
  // t^2 exp(-k t) / t peaks at t = 1/k with value 1/(e k).
  const double k = keep_register ? 2.0 * gamma * p * (1.0 - p) : 2.0 * gamma * std::min(p, 1.0 - p);
  return {1.0 / (std::exp(1.0) * k), 1.0 / k};
}

ThresholdResult threshold_n(double gamma, double p, double omega, ThresholdMode mode,
                            const ThresholdOptions& options) {
  if (!(p > 0.0 && p <= 0.5)) throw Error(ErrorKind::kInvalidInput, "threshold needs 0 < p <= 1/2");
  if (options.n_max < 1) throw Error(ErrorKind::kInvalidInput, "n_max must be positive");
  ThresholdResult out;
  out.sequential_rate = sequential_rate(gamma, p, true).rate;
  const NoiseModel model = NoiseModel::xy(gamma, p, omega);
  RateOptions ro = options.rate;
  auto sequential_wins = [&](long n) {
    auto it = out.bound_rates.find(n);
    if (it == out.bound_rates.end()) {
      const BoundResult r = qfi_rate_bound(model, n, ro);
      it = out.bound_rates.emplace(n, r.value).first;
    }
    const double seq = mode == ThresholdMode::kSN ? out.sequential_rate
                                                  : out.sequential_rate / static_cast<double>(n);
    return seq > it->second;
  };
  // The comparison is monotone in N: the per-probe bound is nondecreasing and
  // the sequential side is constant or decreasing. Bracket, then bisect.
  auto finish = [&](long first_loss) {
    out.first_loss = first_loss;
    out.n_th = mode == ThresholdMode::kSN ? first_loss : std::max(first_loss - 1, 1L);
    return out;
  };
  if (!sequential_wins(1)) return finish(1);
  long good = 1, bad = 2;
  while (true) {
    if (bad > options.n_max) {
      if (sequential_wins(options.n_max)) {
        out.saturated = true;
        out.first_loss = 0;
        out.n_th = options.n_max;
        return out;
      }
      bad = options.n_max;
      break;
    }
    if (!sequential_wins(bad)) break;
    good = bad;
    bad *= 2;
  }
  while (bad - good > 1) {
    const long mid = good + (bad - good) / 2;
    (sequential_wins(mid) ? good : bad) = mid;
  }
  return finish(bad);
}

namespace {

// Applies a single-qubit operator to qubit `target` (0 = most significant).
CVector apply_1q(const CVector& v, int qubits, int target, const Mat2& op) {
  const Eigen::Index dim = Eigen::Index(1) << qubits;
  const Eigen::Index stride = Eigen::Index(1) << (qubits - 1 - target);
  CVector out = CVector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (i & stride) continue;
    const Complex a = v(i), b = v(i + stride);
    out(i) = op(0, 0) * a + op(0, 1) * b;
    out(i + stride) = op(1, 0) * a + op(1, 1) * b;
  }
  return out;
}

// Kraus operators of the phase box at theta and their theta-derivatives:
// sqrt(p) U_theta, sqrt(1-p)|1><0|, sqrt(1-p)|0><1|.
struct PhaseBox {
  std::array<Mat2, 3> k;
  std::array<Mat2, 3> kdot;
};

PhaseBox phase_box(double p, double theta) {
  PhaseBox b;
  Mat2 u = Mat2::Zero();
  u(0, 0) = std::exp(-kI * theta / 2.0);
  u(1, 1) = std::exp(kI * theta / 2.0);
  b.k[0] = std::sqrt(p) * u;
  b.kdot[0] = -kI * 0.5 * pauli(3) * b.k[0];
  b.k[1] = Mat2::Zero();
  b.k[1](1, 0) = std::sqrt(1.0 - p);
  b.k[2] = Mat2::Zero();
  b.k[2](0, 1) = std::sqrt(1.0 - p);
  b.kdot[1] = b.kdot[2] = Mat2::Zero();
  return b;
}

// QFI of an unnormalized pure branch whose norm does not depend on theta.
double branch_qfi(const CVector& phi, const CVector& phidot) {
  const double n = phi.squaredNorm();
  if (n <= 1e-300) return 0.0;
  const Complex overlap = phi.dot(phidot);
  return 4.0 * (phidot.squaredNorm() - std::norm(overlap) / n);
}

// Sum of branch QFIs after applying the box to `target` of every branch.
struct PureBranch {
  CVector phi, phidot;
};

std::vector<PureBranch> through_box(const std::vector<PureBranch>& in, int qubits, int target,
                                    const PhaseBox& box) {
  std::vector<PureBranch> out;
  for (const PureBranch& b : in) {
    for (int a = 0; a < 3; ++a) {
      PureBranch nb;
      nb.phi = apply_1q(b.phi, qubits, target, box.k[a]);
      nb.phidot = apply_1q(b.phidot, qubits, target, box.k[a]) +
                  apply_1q(b.phi, qubits, target, box.kdot[a]);
      out.push_back(std::move(nb));
    }
  }
  return out;
}

double total_qfi(const std::vector<PureBranch>& branches) {
  double f = 0.0;
  for (const PureBranch& b : branches) f += branch_qfi(b.phi, b.phidot);
  return f;
}

constexpr double kTheta = 0.37;  // any phase; the QFI does not depend on it

// Coarse 1e-3 grid on [0, 1], then golden section around the best point.
std::pair<double, double> maximize_unit(const std::function<double(double)>& f) {
  const int n = 1000;
  int best = 0;
  double fbest = -1.0;
  for (int i = 0; i <= n; ++i) {
    const double v = f(static_cast<double>(i) / n);
    if (v > fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = std::max(0, best - 1) / static_cast<double>(n);
  double b = std::min(n, best + 1) / static_cast<double>(n);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  double x = 0.5 * (a + b), fx = f(x);
  if (fbest > fx) {
    x = static_cast<double>(best) / n;
    fx = fbest;
  }
  // The endpoint is exact when the optimum sits on the boundary.
  if (f(1.0) >= fx) return {1.0, f(1.0)};
  return {x, fx};
}

}  // namespace

double phase_parallel_qfi(double a00, double a01, double a10, double a11, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidInput, "p must lie in [0, 1]");
  const double norm = std::sqrt(a00 * a00 + a01 * a01 + a10 * a10 + a11 * a11);
  if (!(norm > 0.0)) throw Error(ErrorKind::kInvalidState, "amplitudes vanish");
  // Qubits: Q1 Q2 A1 A2.
  CVector psi = CVector::Zero(16);
  const double a[2][2] = {{a00, a01}, {a10, a11}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) psi(8 * i + 4 * j + 2 * i + j) = a[i][j] / norm;
  }
  // Apply U_theta first so derivatives are taken at a generic phase.
  const PhaseBox box = phase_box(p, kTheta);
  std::vector<PureBranch> br{{psi, CVector::Zero(16)}};
  br = through_box(br, 4, 0, box);
  br = through_box(br, 4, 1, box);
  return total_qfi(br);
}

double phase_sequential_qfi(double y, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidInput, "p must lie in [0, 1]");
  if (!(y >= 0.0 && y <= 1.0)) throw Error(ErrorKind::kInvalidInput, "y must lie in [0, 1]");
  const PhaseBox box = phase_box(p, kTheta);
  const double s = 1.0 / std::sqrt(2.0);
  // Q1 and A, Bell state, first box.
  CVector bell = CVector::Zero(4);
  bell(0) = bell(3) = s;
  const std::vector<PureBranch> first = through_box({{bell, CVector::Zero(4)}}, 2, 0, box);

  double f = 0.0;
  for (int a = 0; a < 3; ++a) {
    const PureBranch& b = first[static_cast<size_t>(a)];
    if (a != 0) {
      // Error detected: Q1 is discarded and Q2 starts afresh with the ancilla.
      const double weight = b.phi.squaredNorm();
      f += weight * total_qfi(through_box({{bell, CVector::Zero(4)}}, 2, 0, box));
      continue;
    }
    // No error: |0>_Q1|0>_A -> |0>(sqrt(y)|00> + sqrt(1-y)|11>) and
    // |1>_Q1|1>_A -> |1>(sqrt(y)|11> + sqrt(1-y)|00>), qubits Q1 Q2 A.
    const double sy = std::sqrt(y), sn = std::sqrt(1.0 - y);
    auto extend = [&](const CVector& v) {
      CVector w = CVector::Zero(8);
      w(0) += v(0) * sy;   // |0,00>
      w(3) += v(0) * sn;   // |0,11>
      w(7) += v(3) * sy;   // |1,11>
      w(4) += v(3) * sn;   // |1,00>
      return w;
    };
    f += total_qfi(through_box({{extend(b.phi), extend(b.phidot)}}, 3, 1, box));
  }
  return f;
}

double phase_parallel_closed_form(double p) {
  if (p <= 2.0 / 3.0) return -(p - 2.0) * (p - 2.0) * p / (2.0 * (p - 1.0));
  return 4.0 * p * p;
}

double phase_sequential_closed_form(double p) {
  if (p >= 0.5) return p * (3.0 * p + 1.0);
  return p * (p * p - 2.0 * p + 2.0) / (1.0 - p);
}

PhaseStrategyResult phase_strategy_parallel(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidInput, "p must lie in [0, 1]");
  // Symmetric manifold a00 = a11 = sqrt(x/2), a01 = a10 = sqrt((1-x)/2).
  const auto [x, f] = maximize_unit([p](double x) {
    const double u = std::sqrt(x / 2.0), v = std::sqrt((1.0 - x) / 2.0);
    return phase_parallel_qfi(u, v, v, u, p);
  });
  return {f, x, x >= 1.0 ? "boundary" : "interior"};
}

PhaseStrategyResult phase_strategy_sequential(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kInvalidInput, "p must lie in [0, 1]");
  const auto [y, f] = maximize_unit([p](double y) { return phase_sequential_qfi(y, p); });
  return {f, y, y >= 1.0 ? "boundary" : "interior"};
}

SingleShotResult berry_wiseman_single_shot(long n, double r, int grid_points) {
  if (n < 2) throw Error(ErrorKind::kInvalidInput, "N must be >= 2");
  if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::kInvalidInput, "r must lie in (0, 1)");
  if (grid_points < 16) throw Error(ErrorKind::kInvalidInput, "grid too small");
  if (static_cast<double>(n) * 4.0 > grid_points) {
    throw Error(ErrorKind::kIncreaseGrid, "outcome grid cannot resolve this N");
  }
  const double pi = std::numbers::pi;
  // Amplitudes sqrt(2/(N+2)) sin(pi (k+1)/(N+2)), k = 0..N.
  std::vector<double> psi(static_cast<size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    psi[static_cast<size_t>(k)] =
        std::sqrt(2.0 / (n + 2.0)) * std::sin(pi * (k + 1.0) / (n + 2.0));
  }
  // Outcome density p(d) = |sum_k psi_k e^{-i d k}|^2 / (2 pi), 2 pi periodic.
  auto density = [&](double d) {
    Complex acc = 0.0;
    const Complex step = std::exp(Complex(0.0, -d));
    Complex phase = 1.0;
    for (double a : psi) {
      acc += a * phase;
      phase *= step;
    }
    return std::norm(acc) / (2.0 * pi);
  };
  const int g = grid_points;
  const double h = 2.0 * pi / g;
  std::vector<double> dens(static_cast<size_t>(g));
  for (int i = 0; i < g; ++i) dens[static_cast<size_t>(i)] = density(-pi + i * h);
  auto dens_at = [&](long i) {
    const long m = ((i % g) + g) % g;
    return dens[static_cast<size_t>(m)];
  };

  SingleShotResult out;
  // Periodic trapezoid over one period.
  for (int i = 0; i < g; ++i) {
    const double d = -pi + i * h;
    out.cost += std::pow(std::sin(d / 2.0), 2) * dens_at(i) * h;
  }

  // avg_mse = (1/(2 pi r)) int_{-r pi}^{r pi} dphi int_{-pi-phi}^{pi-phi} D^2 p(D) dD.
  // Cumulative integral of D^2 p(D) on the grid over [-(1+r) pi, (1+r) pi].
  const long half = static_cast<long>(std::ceil((1.0 + r) * pi / h)) + 2;
  std::vector<double> cum(static_cast<size_t>(2 * half + 1), 0.0);
  auto f_at = [&](long j) {
    const double d = j * h;
    return d * d * dens_at(j + g / 2);  // grid index of D = j h
  };
  for (long j = -half + 1; j <= half; ++j) {
    cum[static_cast<size_t>(j + half)] =
        cum[static_cast<size_t>(j + half - 1)] + 0.5 * h * (f_at(j - 1) + f_at(j));
  }
  auto cum_at = [&](double d) {
    const double u = d / h + static_cast<double>(half);
    const long i = static_cast<long>(std::floor(u));
    const double w = u - static_cast<double>(i);
    return (1.0 - w) * cum[static_cast<size_t>(i)] + w * cum[static_cast<size_t>(i + 1)];
  };
  const int phi_points = 4096;
  const double hp = 2.0 * r * pi / phi_points;
  double acc = 0.0;
  for (int i = 0; i <= phi_points; ++i) {
    const double phi = -r * pi + i * hp;
    const double inner = cum_at(pi - phi) - cum_at(-pi - phi);
    acc += (i == 0 || i == phi_points ? 0.5 : 1.0) * inner * hp;
  }
  out.avg_mse = acc / (2.0 * pi * r);
  out.mse_bound = out.cost * (r + 1.0) * pi * pi / (2.0 * r) *
                  (1.0 + (1.0 + r) * (1.0 + r) / std::pow(std::sin((1.0 - r) * pi / 2.0), 2));
  return out;
}

FrequencySingleShot berry_wiseman_frequency(long n, double omega0, double r) {
  if (!(omega0 > 0.0)) throw Error(ErrorKind::kInvalidInput, "omega0 must be positive");
  const SingleShotResult s = berry_wiseman_single_shot(n, r);
  FrequencySingleShot out;
  out.t = r * std::numbers::pi / omega0;
  out.t_prime = static_cast<double>(n) * out.t;
  out.mse = s.avg_mse / (out.t * out.t);
  out.bound = 165.0 / (out.t_prime * out.t_prime);
  return out;
}

}  // namespace metrokit
