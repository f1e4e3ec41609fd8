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

// Quantum Fisher information of states carrying an omega-derivative.

#pragma once

#include <functional>
#include <vector>

#include "metrokit/matcore.h"

namespace metrokit {

struct ParamState {
  CMatrix rho;
  CMatrix rhodot;
};

// Blocks of a direct-sum state; weights do not depend on omega.
struct DirectSumState {
  std::vector<double> weights;
  std::vector<ParamState> blocks;
};

inline constexpr double kSpectralGap = 1e-12;

double qfi_mixed(const ParamState& s);

// Spectral formula without the trace-one requirement, so unnormalized blocks
// of a direct sum (whose weights may depend on omega) can be summed directly.
double qfi_spectral(const CMatrix& rho, const CMatrix& rhodot);

double qfi_pure(const CVector& psi, const CVector& psidot);

// Uhlmann fidelity tr sqrt(sqrt(sigma) rho sqrt(sigma)).
double fidelity(const CMatrix& rho, const CMatrix& sigma);

// 8 (1 - F) / d omega^2 from states at omega -+ d omega / 2, with one
// Richardson level.
double qfi_fidelity(const std::function<CMatrix(double)>& rho_at, double omega,
                    double domega = 1e-4);

double qfi_direct_sum(const DirectSumState& d);

}  // namespace metrokit
