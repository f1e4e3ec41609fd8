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

// Qubit noise models, their Lindbladians, and the channel representations
// produced by integrating the master equation
//
//   d rho / dt = -i (omega/2) [sigma_3, rho]
//                + sum_ij Lbar_ij (sigma_i rho sigma_j - {sigma_j sigma_i, rho}/2).
//
// Conventions: the dynamical matrix S acts as rho -> sum S_mn s_m rho s_n;
// the Choi matrix is (E x 1)(|I><I|) with |I> = |00> + |11>, stored with the
// output index first (row-major vec of Kraus operators).

#pragma once

#include <array>
#include <functional>
#include <vector>

#include "metrokit/matcore.h"

namespace metrokit {

enum class NoiseKind { kDephasing, kRank1Pauli, kRank1General, kRank2Pauli, kXY };

const char* noise_kind_name(NoiseKind kind);

struct NoiseModel {
  NoiseKind kind = NoiseKind::kDephasing;
  double gamma = 0.0;
  std::array<double, 3> n{0.0, 0.0, 1.0};  // Rank1Pauli direction
  std::array<Complex, 3> r{};              // Rank1General vector, gamma/2 = |r|^2
  double phi = 0.0, theta = 0.0, xi = 0.0;  // Rank2Pauli Euler angles
  double gamma1 = 0.0, gamma2 = 0.0;        // Rank2Pauli rates
  double p = 0.5;                           // XY asymmetry
  double omega = 0.0;

  static NoiseModel dephasing(double gamma, double omega);
  static NoiseModel rank1_pauli(double gamma, std::array<double, 3> n, double omega);
  // gamma is derived from |r|^2.
  static NoiseModel rank1_general(std::array<Complex, 3> r, double omega);
  static NoiseModel rank2_pauli(double gamma1, double gamma2, double phi, double theta,
                                double xi, double omega);
  static NoiseModel xy(double gamma, double p, double omega);

  // Throws kInvalidModel when an invariant is broken.
  void validate() const;
};

// R_z(phi) R_y(theta) R_z(xi).
Eigen::Matrix3d euler_rotation(double phi, double theta, double xi);

struct Lindbladian {
  CMatrix lbar;  // 3x3 Hermitian PSD
  double omega = 0.0;
};

struct DynamicalMatrix {
  CMatrix s;  // 4x4, Pauli basis
  double omega = 0.0;
  double t = 0.0;
};

struct ChoiMatrix {
  CMatrix p;  // 4x4
  double omega = 0.0;
  double t = 0.0;
};

struct KrausSet {
  std::vector<Mat2> k;
  std::vector<Mat2> kdot;
  CMatrix gauge;  // accumulated h; zero when no shift was applied
};

using KrausBuilder = std::function<std::vector<Mat2>(double omega)>;

Lindbladian build_lindbladian(const NoiseModel& model);

// Superoperator acting on Pauli coefficient vectors r (rho = sum r_m s_m / 2).
RMatrix pauli_generator(const Lindbladian& lind);

DynamicalMatrix propagate(const Lindbladian& lind, double t);

ChoiMatrix choi_from_dynamical(const DynamicalMatrix& s);
DynamicalMatrix dynamical_from_choi(const ChoiMatrix& c);

Mat2 apply_dynamical(const DynamicalMatrix& s, const Mat2& rho);
Mat2 apply_kraus(const std::vector<Mat2>& k, const Mat2& rho);
ChoiMatrix choi_from_kraus(const std::vector<Mat2>& k);

// Composition a o b (b acts first).
DynamicalMatrix compose(const DynamicalMatrix& a, const DynamicalMatrix& b);

ChoiMatrix xy_choi(double omega, double gamma, double p, double t);
DynamicalMatrix xy_dynamical_matrix(double omega, double gamma, double p, double t);
std::vector<Mat2> xy_kraus_operators(double omega, double gamma, double p, double t);
KrausSet xy_kraus(double omega, double gamma, double p, double t);

std::vector<Mat2> canonical_kraus_operators(const DynamicalMatrix& s);
KrausSet canonical_kraus(const DynamicalMatrix& s);

KrausSet gauge_shift(const KrausSet& ks, const CMatrix& h);

// Central differences with one Richardson level; step <= 0 selects
// 1e-5 * max(1, |omega|).
KrausSet differentiate_kraus(const KrausBuilder& builder, double omega, double step = 0.0);

// omega -> Kraus operators of `model` (with its omega replaced) at time t.
// X-Y models use the closed form, every other family the canonical set.
KrausBuilder kraus_builder(const NoiseModel& model, double t);

double completeness_residual(const std::vector<Mat2>& k);
double derivative_residual(const KrausSet& ks);

}  // namespace metrokit
