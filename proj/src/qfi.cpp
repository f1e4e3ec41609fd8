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

#include "metrokit/qfi.h"

#include <cmath>

#include "metrokit/error.h"

namespace metrokit {
namespace {

void require_state(const ParamState& s) {
  if (s.rho.rows() != s.rho.cols() || s.rhodot.rows() != s.rho.rows() ||
      s.rhodot.cols() != s.rho.cols()) {
    throw Error(ErrorKind::kInvalidState, "rho and rhodot must be square and of equal size");
  }
  if (!all_finite(s.rho) || !all_finite(s.rhodot)) {
    throw Error(ErrorKind::kInvalidState, "non-finite state entries");
  }
  if (hermiticity_residual(s.rho) > 1e-10 || hermiticity_residual(s.rhodot) > 1e-8) {
    throw Error(ErrorKind::kInvalidState, "rho and rhodot must be Hermitian");
  }
  if (std::abs(s.rho.trace() - Complex(1.0)) > 1e-10) {
    throw Error(ErrorKind::kInvalidState, "rho must have unit trace");
  }
  if (std::abs(s.rhodot.trace()) > 1e-8) {
    throw Error(ErrorKind::kInvalidState, "rhodot must be traceless");
  }
}

// Square root that zeroes eigenvalues indistinguishable from round-off, so
// rank-deficient states do not pick up sqrt(1e-17)-sized spurious weight.
CMatrix clamped_sqrt(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_from_upper(a));
  const RVector& lambda = es.eigenvalues();
  const double top = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
  RVector roots(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) < -1e-12) throw Error(ErrorKind::kNumericalFailure, "fidelity of a non-PSD matrix");
    roots(i) = lambda(i) <= 1e-14 * top ? 0.0 : std::sqrt(lambda(i));
  }
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double qfi_spectral(const CMatrix& rho, const CMatrix& rhodot) {
  const EigenDecomposition e = eig_hermitian(rho);
  if (e.values(0) < -1e-10 * std::max(1.0, e.values.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::kInvalidState, "rho is not positive semidefinite");
  }
  const CMatrix d = e.vectors.adjoint() * hermitian_from_upper(rhodot) * e.vectors;
  double f = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    const double pi = std::max(e.values(i), 0.0);
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      const double sum = pi + std::max(e.values(j), 0.0);
      if (sum <= kSpectralGap) continue;
      f += std::norm(d(i, j)) / sum;
    }
  }
  return 2.0 * f;
}

double qfi_mixed(const ParamState& s) {
  require_state(s);
  return qfi_spectral(s.rho, s.rhodot);
}

double qfi_pure(const CVector& psi, const CVector& psidot) {
  if (psi.size() != psidot.size()) throw Error(ErrorKind::kInvalidState, "size mismatch");
  if (std::abs(psi.norm() - 1.0) > 1e-10) throw Error(ErrorKind::kInvalidState, "psi is not normalized");
  const Complex overlap = psi.dot(psidot);  // <psi|psidot>
  return 4.0 * (psidot.squaredNorm() - std::norm(overlap));
}

double fidelity(const CMatrix& rho, const CMatrix& sigma) {
  const CMatrix root = clamped_sqrt(sigma);
  const CMatrix inner = root * rho * root;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_from_upper(inner), Eigen::EigenvaluesOnly);
  const RVector& lambda = es.eigenvalues();
  const double top = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300);
  double f = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > 1e-14 * top) f += std::sqrt(lambda(i));
  }
  return f;
}

double qfi_fidelity(const std::function<CMatrix(double)>& rho_at, double omega, double domega) {
  auto estimate = [&](double h) {
    return 8.0 * (1.0 - fidelity(rho_at(omega - h / 2.0), rho_at(omega + h / 2.0))) / (h * h);
  };
  const double value = (4.0 * estimate(domega / 2.0) - estimate(domega)) / 3.0;
  if (!std::isfinite(value)) throw Error(ErrorKind::kNumericalFailure, "fidelity-based QFI is not finite");
  return std::max(value, 0.0);
}

double qfi_direct_sum(const DirectSumState& d) {
  if (d.weights.size() != d.blocks.size()) {
    throw Error(ErrorKind::kInvalidState, "one weight per block required");
  }
  double total = 0.0, f = 0.0;
  for (size_t m = 0; m < d.blocks.size(); ++m) {
    if (!(d.weights[m] >= 0.0)) throw Error(ErrorKind::kInvalidState, "negative weight");
    total += d.weights[m];
    if (d.weights[m] > 0.0) f += d.weights[m] * qfi_mixed(d.blocks[m]);
  }
  if (std::abs(total - 1.0) > 1e-10) throw Error(ErrorKind::kInvalidState, "weights must sum to 1");
  return f;
}

}  // namespace metrokit
