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

// Channel-extension (CE) bounds on the quantum Fisher information.
//
// For a Kraus set {K_i} with omega-derivatives, alpha = sum K'_i^H K'_i and
// beta = i sum K'_i^H K_i, where K'_i = Kdot_i - i sum_j h_ij K_j. The bounds
// below are minimized over the Hermitian gauge h.

#pragma once

#include <array>
#include <vector>

#include "metrokit/channels.h"
#include "metrokit/gauge_minimizer.h"

namespace metrokit {

struct AlphaBeta {
  Mat2 alpha;
  Mat2 beta;
};

AlphaBeta alpha_beta(const KrausSet& ks);

// alpha and beta as functions of real coordinates of h in a fixed basis.
class GaugeFamily {
 public:
  GaugeFamily(const KrausSet& ks, std::vector<CMatrix> basis);

  AlphaBeta at(const RVector& x) const;
  const std::vector<CMatrix>& basis() const { return basis_; }
  const KrausSet& kraus() const { return ks_; }
  // Typical gauge magnitude, sqrt(||alpha(0)||).
  double scale() const;

  // Basis that drops Kraus operators whose value and derivative both vanish
  // (their rows of h can only add to alpha) and, when `use_parity` is set and
  // every operator has definite parity under conjugation by sigma_3, couplings
  // between operators of opposite parity. For objectives that are convex and
  // invariant under alpha, beta -> sigma_3 (.) sigma_3, averaging h with its
  // parity image never increases the value, so the restriction is exact.
  static std::vector<CMatrix> reduced_basis(const KrausSet& ks, bool use_parity);

  // Pauli coordinates X = sum_mu X_mu sigma_mu of alpha and of the Hermitian
  // part of beta: alpha_mu(x) = c_mu + 2 g_mu.x + x^T Q_mu x and
  // beta(x) = b0 + B x.
  struct Quadratic {
    std::array<RMatrix, 4> q;
    std::array<RVector, 4> g;
    Eigen::Vector4d c;
    RMatrix b;  // 4 x dim
    Eigen::Vector4d b0;
  };
  Quadratic quadratic() const;

 private:
  struct Term {
    int row;
    Mat2 op;
  };
  KrausSet ks_;
  std::vector<CMatrix> basis_;
  std::vector<std::vector<Term>> terms_;
};

struct BoundOptions {
  MinimizeOptions minimize;
  bool use_symmetry = true;
};

BoundResult ce_single(const KrausSet& ks, const BoundOptions& options = {});

// 4N||alpha|| + 4N(N-1)||beta||^2 with h shared across probes.
BoundResult ce_parallel(const KrausSet& ks, long n_probes, const BoundOptions& options = {});

struct SequentialBound {
  BoundResult best;
  double x_best = 1.0;
  std::vector<double> xs;
  std::vector<double> values;
};

// 4k||alpha|| + 4k(k-1)||beta|| (x||alpha|| + ||beta|| + 1/x) on the dt
// channel, evaluated for x in {1, 1/dt} plus `extra_x`; the smallest is kept.
SequentialBound ce_sequential(const KrausSet& ks_dt, long k, double dt,
                              const std::vector<double>& extra_x = {},
                              const BoundOptions& options = {});

// min ||alpha|| over gauges with beta = 0 (the large-N limit of the parallel
// bound per probe, divided by 4). Throws kInfeasible when beta cannot vanish.
BoundResult min_alpha_with_zero_beta(const KrausSet& ks, const BoundOptions& options = {});

struct RateOptions {
  // Every parallel bound is convex in h and finished by a Newton pass, so a
  // few simplex starts suffice along the time scan.
  RateOptions() { bound.minimize.starts = 3; }

  BoundOptions bound;
  int coarse_points = 25;
  double rel_tol = 1e-6;
  CMatrix warm_h;  // optional seed at the first time point
};

// Maximal CE bound on the QFI rate per probe, max_t min_h
// 4(||alpha|| + (N-1)||beta||^2) / t, with the time optimum in t_opt.
BoundResult qfi_rate_bound(const NoiseModel& model, long n_probes,
                           const RateOptions& options = {});

// Principal branch W0 with W e^W = x.
double lambert_w0(double x);

// Closed forms for the balanced (p = 1/2) X-Y channel.
double xy_balanced_bound(long n_probes, double gamma, double t);
CMatrix xy_balanced_h_opt(long n_probes, double gamma, double t);
struct RateAndTime {
  double rate;
  double t_opt;
};
RateAndTime xy_balanced_rate(long n_probes, double gamma);

struct AsymptoticAlpha {
  double value;
  bool degenerate;  // Delta or Gamma vanished; value is +infinity
};

// Closed-form alpha with beta = 0 for the X-Y channel at time t.
AsymptoticAlpha xy_asymptotic_alpha(double omega, double gamma, double p, double t);

}  // namespace metrokit
