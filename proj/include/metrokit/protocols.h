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

// Fast-control protocols on a probe qubit with one ancilla: removal of
// rank-one Pauli noise, the sequential X-Y strategy with an error register,
// probe-number thresholds against parallel bounds, two-box phase estimation,
// and a single-shot strategy for noiseless frequency estimation.
//
// Two-qubit states are ordered probe (x) ancilla. The code space is
// span{|00>, |11>} and the error space span{|01>, |10>}.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "metrokit/ce_bounds.h"
#include "metrokit/matcore.h"
#include "metrokit/qfi.h"

namespace metrokit {

struct ProtocolState {
  CMatrix rho;     // 4x4, register traced out
  CMatrix rhodot;  // omega-derivative of rho
  std::map<int, double> reg;  // detected-error count -> probability
  double tail = 0.0;          // mass dropped beyond the register cap
  double t = 0.0;
};

struct CorrectionRun {
  ProtocolState state;
  double qfi = 0.0;
};

// Noise sigma_1 at rate gamma, Hamiltonian (omega/2)(sin(theta) s3 +
// cos(theta) s1) on the probe. Each step applies the exact dt-propagator,
// projects on code/error spaces and undoes sigma_1 on the error branch.
CorrectionRun simulate_rank1_correction(double theta, double gamma, double omega, double t_total,
                                        double dt);

enum class SequentialMode { kAnalytic, kSimulated };

struct SequentialOptions {
  SequentialMode mode = SequentialMode::kAnalytic;
  double dt = 0.0;  // 0 selects 1e-3 * min(1/gamma, 1/omega)
  int m_max = 0;    // 0 selects the cap from the Poisson tail
};

// QFI of the X-Y sequential strategy at time t with or without the register
// of detected error counts. The likelier error is the one corrected.
double xy_sequential_qfi(double gamma, double p, double omega, double t, bool keep_register,
                         const SequentialOptions& options = {});

// Per-block result of the simulated mode, exposed for bookkeeping checks.
struct SequentialBlocks {
  std::vector<ParamState> blocks;  // unnormalized, one per error count
  double tail = 0.0;
};
SequentialBlocks xy_sequential_blocks(double gamma, double p, double omega, double t,
                                      const SequentialOptions& options = {});

RateAndTime sequential_rate(double gamma, double p, bool keep_register);

enum class ThresholdMode { kS1, kSN };

struct ThresholdOptions {
  RateOptions rate;
  long n_max = 10000;
};

struct ThresholdResult {
  long n_th = 0;
  long first_loss = 0;  // smallest N where the sequential side loses
  bool saturated = false;  // the comparison still held at n_max
  std::map<long, double> bound_rates;  // evaluated parallel bounds
  double sequential_rate = 0.0;
};

// sN: smallest N at which the parallel bound rate reaches the sequential
// rate, so the sequential strategy wins for all N < N_th.
// s1: largest N at which the sequential rate divided by N still beats the
// parallel bound (at N = 1 the two modes coincide and the sequential side
// always wins, so this is at least 1).
ThresholdResult threshold_n(double gamma, double p, double omega, ThresholdMode mode,
                            const ThresholdOptions& options = {});

struct PhaseStrategyResult {
  double qfi = 0.0;
  double param = 0.0;  // x for the parallel scheme, y for the sequential one
  std::string branch;  // "interior" or "boundary" (parameter pinned at 1)
};

// QFI of the parallel two-box scheme from real amplitudes a_ij of
// sum a_ij |ij>_Q |ij>_A (normalized internally).
double phase_parallel_qfi(double a00, double a01, double a10, double a11, double p);
// QFI of the sequential two-box scheme with entangling weight y.
double phase_sequential_qfi(double y, double p);

PhaseStrategyResult phase_strategy_parallel(double p);
PhaseStrategyResult phase_strategy_sequential(double p);
double phase_parallel_closed_form(double p);
double phase_sequential_closed_form(double p);

struct SingleShotResult {
  double cost = 0.0;      // integral of sin^2(d/2) p(d)
  double avg_mse = 0.0;   // flat prior of half-width r pi, estimator = outcome
  double mse_bound = 0.0; // cost-based upper bound on avg_mse
};

SingleShotResult berry_wiseman_single_shot(long n, double r, int grid_points = 1 << 14);

struct FrequencySingleShot {
  double t = 0.0;        // single-run time r pi / omega0
  double t_prime = 0.0;  // N t
  double mse = 0.0;      // avg_mse / t^2
  double bound = 0.0;    // 165 / t'^2
};

FrequencySingleShot berry_wiseman_frequency(long n, double omega0, double r = 0.33);

}  // namespace metrokit
