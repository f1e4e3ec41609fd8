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

// Small dense complex linear algebra for 2x2 up to a few dozen dimensions.
// Thin layer over Eigen so the rest of the library speaks one vocabulary and
// validates inputs the same way.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>

namespace metrokit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

inline constexpr Complex kI{0.0, 1.0};

struct EigenDecomposition {
  RVector values;   // ascending
  CMatrix vectors;  // orthonormal columns
};

// Pauli matrices, index 0 is the identity.
const Mat2& pauli(int mu);
const std::array<Mat2, 4>& paulis();

bool all_finite(const CMatrix& a);

// Largest elementwise deviation from conjugate symmetry.
double hermiticity_residual(const CMatrix& a);

// Copies the upper triangle into the lower one, forcing real diagonal.
CMatrix hermitian_from_upper(const CMatrix& a);

// Throws kInvalidInput unless `a` is square, finite and Hermitian to `tol`
// (relative to max(1, max|a_ij|)).
void require_hermitian(const CMatrix& a, double tol, const char* what);

EigenDecomposition eig_hermitian(const CMatrix& a);

double operator_norm(const CMatrix& a);

// Closed-form operator norm of a 2x2 Hermitian matrix.
double hermitian_norm_2x2(const Mat2& a);

// Largest eigenvalue of a 2x2 Hermitian matrix.
double max_eigenvalue_2x2(const Mat2& a);

// Principal square root; eigenvalues in [-1e-12, 0) are clamped to zero.
CMatrix matrix_sqrt_psd(const CMatrix& a);

CMatrix expm(const CMatrix& a);

CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace metrokit
