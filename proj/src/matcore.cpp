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

#include "metrokit/matcore.h"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "metrokit/error.h"

namespace metrokit {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kNotPsd: return "NotPSD";
    case ErrorKind::kInvalidModel: return "InvalidModel";
    case ErrorKind::kDegenerateChannel: return "DegenerateChannel";
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kInvalidState: return "InvalidState";
    case ErrorKind::kInvalidKraus: return "InvalidKraus";
    case ErrorKind::kDomainError: return "DomainError";
    case ErrorKind::kInvalidGauge: return "InvalidGauge";
    case ErrorKind::kNotApplicable: return "NotApplicable";
    case ErrorKind::kInfeasible: return "Infeasible";
    case ErrorKind::kStepTooLarge: return "StepTooLarge";
    case ErrorKind::kIncreaseRegister: return "IncreaseRegister";
    case ErrorKind::kIncreaseGrid: return "IncreaseGrid";
    case ErrorKind::kInvalidPrior: return "InvalidPrior";
  }
  return "Unknown";
}

const std::array<Mat2, 4>& paulis() {
  static const std::array<Mat2, 4> kPaulis = [] {
    std::array<Mat2, 4> s;
    s[0] << 1, 0, 0, 1;
    s[1] << 0, 1, 1, 0;
    s[2] << 0, -kI, kI, 0;
    s[3] << 1, 0, 0, -1;
    return s;
  }();
  return kPaulis;
}

const Mat2& pauli(int mu) { return paulis().at(static_cast<size_t>(mu)); }

bool all_finite(const CMatrix& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a(i).real()) || !std::isfinite(a(i).imag())) return false;
  }
  return true;
}

double hermiticity_residual(const CMatrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() * 0.5;
}

CMatrix hermitian_from_upper(const CMatrix& a) {
  CMatrix h = a;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    h(i, i) = a(i, i).real();
    for (Eigen::Index j = 0; j < i; ++j) h(i, j) = std::conj(a(j, i));
  }
  return h;
}

void require_hermitian(const CMatrix& a, double tol, const char* what) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kInvalidInput, std::string(what) + " is not square");
  }
  if (!all_finite(a)) {
    throw Error(ErrorKind::kInvalidInput, std::string(what) + " has non-finite entries");
  }
  const double scale = a.size() ? std::max(1.0, a.cwiseAbs().maxCoeff()) : 1.0;
  if (hermiticity_residual(a) > tol * scale) {
    throw Error(ErrorKind::kInvalidInput, std::string(what) + " is not Hermitian");
  }
}

EigenDecomposition eig_hermitian(const CMatrix& a) {
  require_hermitian(a, 1e-12, "eig_hermitian input");
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_from_upper(a));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumericalFailure, "Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double hermitian_norm_2x2(const Mat2& a) {
  const double mean = 0.5 * (a(0, 0).real() + a(1, 1).real());
  const double half_diff = 0.5 * (a(0, 0).real() - a(1, 1).real());
  const double radius = std::sqrt(half_diff * half_diff + std::norm(a(0, 1)));
  return std::abs(mean) + radius;
}

double max_eigenvalue_2x2(const Mat2& a) {
  const double mean = 0.5 * (a(0, 0).real() + a(1, 1).real());
  const double half_diff = 0.5 * (a(0, 0).real() - a(1, 1).real());
  return mean + std::sqrt(half_diff * half_diff + std::norm(a(0, 1)));
}

double operator_norm(const CMatrix& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::kInvalidInput, "operator_norm needs a square matrix");
  }
  if (!all_finite(a)) throw Error(ErrorKind::kInvalidInput, "operator_norm: non-finite entries");
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (hermiticity_residual(a) <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_from_upper(a),
                                                  Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

CMatrix matrix_sqrt_psd(const CMatrix& a) {
  const EigenDecomposition e = eig_hermitian(a);
  RVector roots(e.values.size());
  for (Eigen::Index i = 0; i < e.values.size(); ++i) {
    const double lambda = e.values(i);
    if (lambda < -1e-12) {
      throw Error(ErrorKind::kNotPsd, "eigenvalue " + std::to_string(lambda) + " below -1e-12");
    }
    roots(i) = std::sqrt(std::max(lambda, 0.0));
  }
  return e.vectors * roots.asDiagonal() * e.vectors.adjoint();
}

CMatrix expm(const CMatrix& a) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::kInvalidInput, "expm needs a square matrix");
  if (!all_finite(a)) throw Error(ErrorKind::kInvalidInput, "expm: non-finite entries");
  return a.exp();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) { return Eigen::kroneckerProduct(a, b).eval(); }

}  // namespace metrokit
