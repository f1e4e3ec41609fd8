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

#include "support.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

namespace metrokit::testing {

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

int Rng::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

CMatrix Rng::ginibre(int rows, int cols) {
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(normal(), normal());
  }
  return m;
}

CMatrix Rng::hermitian(int dim) {
  const CMatrix g = ginibre(dim, dim);
  return 0.5 * (g + g.adjoint());
}

CMatrix Rng::unitary(int dim) {
  const CMatrix g = ginibre(dim, dim);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < dim; ++j) q.col(j) *= std::polar(1.0, std::arg(r(j, j)));
  return q;
}

CMatrix Rng::density(int dim) {
  const CMatrix g = ginibre(dim, dim);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

CVector Rng::unit_vector(int dim) {
  CVector v = ginibre(dim, 1).col(0);
  return v / v.norm();
}

std::array<double, 3> Rng::direction() {
  Eigen::Vector3d v(normal(), normal(), normal());
  v.normalize();
  return {v(0), v(1), v(2)};
}

NoiseModel Rng::model(double omega_max) {
  const double omega = uniform(0.2, omega_max);
  const double gamma = uniform(0.1, 2.0);
  switch (integer(0, 4)) {
    case 0:
      return NoiseModel::dephasing(gamma, omega);
    case 1:
      return NoiseModel::rank1_pauli(gamma, direction(), omega);
    case 2: {
      const double s = std::sqrt(gamma / 2.0);
      const CVector v = unit_vector(3) * s;
      return NoiseModel::rank1_general({v(0), v(1), v(2)}, omega);
    }
    case 3:
      return NoiseModel::rank2_pauli(uniform(0.1, 2.0), uniform(0.1, 2.0), uniform(0, 2 * std::numbers::pi),
                                     uniform(0, std::numbers::pi), uniform(0, 2 * std::numbers::pi), omega);
    default:
      return NoiseModel::xy(gamma, uniform(0.0, 1.0), omega);
  }
}

namespace {

std::string describe(const NoiseModel& m, double t) {
  std::ostringstream os;
  os << noise_kind_name(m.kind) << " gamma=" << m.gamma << " omega=" << m.omega << " t=" << t;
  return os.str();
}

void record(PropertyOutcome& out, double violation, double tol, const std::string& what) {
  ++out.cases;
  out.worst = std::max(out.worst, violation);
  if (!(violation <= tol)) {
    if (out.failures == 0) out.first_failure = what;
    ++out.failures;
  }
}

CMatrix kraus_tuple(const std::vector<Mat2>& k, const std::vector<int>& idx) {
  CMatrix m = CMatrix::Identity(1, 1);
  for (int i : idx) m = kron(m, k[static_cast<size_t>(i)]);
  return m;
}

}  // namespace

ParamState extended_output(const KrausSet& ks, int n_probes, const CVector& input) {
  const int kc = static_cast<int>(ks.k.size());
  const int dim = 1 << (n_probes + 1);
  const CMatrix anc = CMatrix::Identity(2, 2);
  CMatrix rho = CMatrix::Zero(dim, dim), rhodot = CMatrix::Zero(dim, dim);
  std::vector<int> idx(static_cast<size_t>(n_probes), 0);
  while (true) {
    const CMatrix k = kron(kraus_tuple(ks.k, idx), anc);
    CMatrix kd = CMatrix::Zero(k.rows(), k.cols());
    for (int slot = 0; slot < n_probes; ++slot) {
      CMatrix term = CMatrix::Identity(1, 1);
      for (int j = 0; j < n_probes; ++j) {
        const size_t i = static_cast<size_t>(idx[static_cast<size_t>(j)]);
        term = kron(term, j == slot ? CMatrix(ks.kdot[i]) : CMatrix(ks.k[i]));
      }
      kd += kron(term, anc);
    }
    const CVector a = k * input, b = kd * input;
    rho += a * a.adjoint();
    rhodot += b * a.adjoint() + a * b.adjoint();
    int pos = 0;
    while (pos < n_probes && ++idx[static_cast<size_t>(pos)] == kc) idx[static_cast<size_t>(pos++)] = 0;
    if (pos == n_probes) break;
  }
  return {0.5 * (rho + rho.adjoint()), rhodot};
}

double sampled_max_qfi(const KrausSet& ks, int n_probes, int samples, Rng& rng) {
  const int dim = 1 << (n_probes + 1);
  CVector ghz = CVector::Zero(dim);
  ghz(0) = ghz(dim - 2) = 1.0 / std::sqrt(2.0);  // GHZ on probes, ancilla in |0>
  double best = qfi_mixed(extended_output(ks, n_probes, ghz));
  for (int s = 0; s < samples; ++s) {
    best = std::max(best, qfi_mixed(extended_output(ks, n_probes, rng.unit_vector(dim))));
  }
  return best;
}

PropertyOutcome property_gauge_invariance(int cases, std::uint64_t seed) {
  Rng rng(seed);
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c) {
    const NoiseModel m = rng.model();
    const double t = rng.uniform(0.05, 3.0);
    const std::vector<Mat2> k = canonical_kraus_operators(propagate(build_lindbladian(m), t));
    const CMatrix u = rng.unitary(static_cast<int>(k.size()));
    std::vector<Mat2> mixed(k.size(), Mat2::Zero());
    for (size_t i = 0; i < k.size(); ++i) {
      for (size_t j = 0; j < k.size(); ++j) mixed[i] += u(Eigen::Index(i), Eigen::Index(j)) * k[j];
    }
    double worst = 0.0;
    for (int r = 0; r < 10; ++r) {
      const Mat2 rho = rng.density(2);
      worst = std::max(worst, (apply_kraus(k, rho) - apply_kraus(mixed, rho)).cwiseAbs().maxCoeff());
    }
    record(out, worst, 1e-10, describe(m, t));
  }
  return out;
}

PropertyOutcome property_trace_preservation(int cases, std::uint64_t seed) {
  Rng rng(seed);
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c) {
    const NoiseModel m = rng.model();
    const double t = rng.uniform(0.0, 4.0);
    const DynamicalMatrix s = propagate(build_lindbladian(m), t);
    Mat2 tp = Mat2::Zero();
    for (int mu = 0; mu < 4; ++mu) {
      for (int nu = 0; nu < 4; ++nu) tp += s.s(mu, nu) * pauli(nu) * pauli(mu);
    }
    double v = (tp - Mat2::Identity()).cwiseAbs().maxCoeff();
    const std::vector<Mat2> k = canonical_kraus_operators(s);
    v = std::max(v, completeness_residual(k));
    const Mat2 rho = rng.density(2);
    v = std::max(v, std::abs(apply_dynamical(s, rho).trace() - 1.0));
    record(out, v, 1e-10, describe(m, t));
  }
  return out;
}

PropertyOutcome property_choi(int cases, std::uint64_t seed) {
  Rng rng(seed);
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c) {
    const NoiseModel m = rng.model();
    const double t = rng.uniform(0.0, 4.0);
    const DynamicalMatrix s = propagate(build_lindbladian(m), t);
    const ChoiMatrix ch = choi_from_dynamical(s);
    const double min_eig = eig_hermitian(ch.p).values(0);
    double v = std::max(0.0, -min_eig);
    v = std::max(v, std::abs(ch.p.trace() - 2.0));
    v = std::max(v, (dynamical_from_choi(ch).s - s.s).cwiseAbs().maxCoeff() * 1e2);  // involution held to 1e-12
    v = std::max(v, (choi_from_dynamical(dynamical_from_choi(ch)).p - ch.p).cwiseAbs().maxCoeff() * 1e2);  // involution held to 1e-12
    record(out, v, 1e-10, describe(m, t));
  }
  return out;
}

PropertyOutcome property_qfi_additivity(int cases, std::uint64_t seed) {
  Rng rng(seed);
  PropertyOutcome out;
  auto random_state = [&](int dim) {
    const CMatrix rho = rng.density(dim);
    CMatrix d = rng.hermitian(dim);
    d -= (d.trace() / double(dim)) * CMatrix::Identity(dim, dim);
    return ParamState{rho, 0.3 * d};
  };
  for (int c = 0; c < cases; ++c) {
    const ParamState a = random_state(rng.integer(0, 1) ? 2 : 3);
    const ParamState b = random_state(2);
    const ParamState ab{kron(a.rho, b.rho), kron(a.rhodot, b.rho) + kron(a.rho, b.rhodot)};
    const double fa = qfi_mixed(a), fb = qfi_mixed(b), fab = qfi_mixed(ab);
    record(out, std::abs(fab - fa - fb) / std::max(1.0, fab), 1e-8,
           "F(a)=" + std::to_string(fa) + " F(b)=" + std::to_string(fb) + " F(ab)=" + std::to_string(fab));
  }
  return out;
}

PropertyOutcome property_bound_validity(int cases, int inputs, std::uint64_t seed) {
  Rng rng(seed);
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c) {
    const NoiseModel m = rng.model();
    const double t = rng.uniform(0.1, 2.0);
    const int n = rng.integer(1, 3);
    const KrausSet ks = differentiate_kraus(kraus_builder(m, t), m.omega);
    BoundOptions bo;
    bo.minimize.starts = 6;
    const double bound = ce_parallel(ks, n, bo).value;
    const double q = sampled_max_qfi(ks, n, inputs, rng);
    record(out, (q - bound) / std::max(1.0, bound), 1e-8,
           describe(m, t) + " N=" + std::to_string(n) + " qfi=" + std::to_string(q) +
               " bound=" + std::to_string(bound));
  }
  return out;
}

PropertyOutcome property_semigroup(int cases, std::uint64_t seed) {
  Rng rng(seed);
  PropertyOutcome out;
  for (int c = 0; c < cases; ++c) {
    const NoiseModel m = rng.model();
    const Lindbladian l = build_lindbladian(m);
    const double t1 = rng.uniform(0.0, 2.0), t2 = rng.uniform(0.0, 2.0);
    const DynamicalMatrix direct = propagate(l, t1 + t2);
    const DynamicalMatrix composed = compose(propagate(l, t1), propagate(l, t2));
    record(out, (direct.s - composed.s).cwiseAbs().maxCoeff(), 1e-9, describe(m, t1 + t2));
  }
  return out;
}

}  // namespace metrokit::testing
