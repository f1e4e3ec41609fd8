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

// Short-time (dt -> 0) analysis of the sequential CE bound with arbitrarily
// fast control. The dt-channel is written as K = M(dt) sigma with
// M = M0 + sqrt(dt) M1 + dt M2, and the gauge as h = h0 + sqrt(dt) h1 +
// dt h2 + dt^{3/2} h3. Once alpha and beta vanish to first order in sqrt(dt),
// the bound reduces to F <= 4 ||alpha2|| t' whenever beta2 can also be made
// to vanish.
//
// Block matrices X over the Pauli index (0 | 1..3) are mapped to qubit
// operators by X -> sum_kl X_kl sigma_k sigma_l.

#pragma once

#include <optional>

#include "metrokit/ce_bounds.h"
#include "metrokit/channels.h"

namespace metrokit {

struct ShortTimeExpansion {
  CMatrix s0;  // diag(1, 0, 0, 0)
  CMatrix s1;  // first-order dynamical matrix
  CMatrix m0, m1, m2;
  double omega = 0.0;
};

struct GaugeExpansion {
  CMatrix h0 = CMatrix::Zero(3, 3);  // H0, lower block of h0
  CVector h1 = CVector::Zero(3);     // first column of h1
  double h2_00 = 0.0;
  // Higher-order parameters; they only enter beta3.
  double h3_00 = 0.0;
  CMatrix hh1 = CMatrix::Zero(3, 3);    // H1, lower block of h1
  CMatrix mbar2 = CMatrix::Zero(3, 3);  // free lower block of M2
  CVector h2 = CVector::Zero(3);        // first column of h2
};

ShortTimeExpansion short_time_expansion(const Lindbladian& lind);

// sum_kl X_kl sigma_k sigma_l for a 4x4 X.
Mat2 pauli_sandwich(const CMatrix& x);

// alpha2 and beta2 as functions of H0, h1 and h2_00.
AlphaBeta alpha2_beta2(const ShortTimeExpansion& exp, const GaugeExpansion& g);

Mat2 beta3(const ShortTimeExpansion& exp, const GaugeExpansion& g);

// Fills the higher-order parameters so that beta3 vanishes. Throws
// kInvalidGauge unless beta2 is already zero.
GaugeExpansion beta3_cancel(const ShortTimeExpansion& exp, const GaugeExpansion& g);

enum class Verdict { kHeisenbergRestorable, kStandardScaling, kUncorrectableParallelDephasing };

const char* verdict_name(Verdict v);

struct NoiseClassification {
  Verdict verdict = Verdict::kStandardScaling;
  double slowdown = 1.0;  // only meaningful for kHeisenbergRestorable
  std::optional<double> alpha_l;
};

NoiseClassification classify_noise(const NoiseModel& model);

// Closed-form alpha_L with F <= 4 alpha_L t'.
double analytic_alpha(const NoiseModel& model);

struct NumericAlpha {
  double value = 0.0;     // ||alpha2|| at the returned gauge
  double dual = 0.0;      // certified lower bound on the minimum
  GaugeExpansion gauge;   // satisfies beta2 = 0
};

// min ||alpha2|| subject to beta2 = 0. The constraint is linear, so it is
// eliminated exactly; the remaining convex problem min_x lambda_max(alpha2)
// is solved through its dual max_{|n| <= 1} min_x tr((1 + n.sigma) alpha2)/2,
// whose inner problem is a least-squares solve. Throws kInfeasible when no
// gauge cancels beta2.
NumericAlpha numeric_alpha(const Lindbladian& lind);
NumericAlpha numeric_alpha(const NoiseModel& model);

}  // namespace metrokit
