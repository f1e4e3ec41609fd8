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

// Estimation-theoretic lower bounds on the mean squared error: Cramer-Rao,
// frequency-estimation bounds per unit total time, the Bayesian CRB, and the
// Ziv-Zakai bound with the QFI linearized as F <= 4 alpha_L t'.

#pragma once

#include <optional>
#include <vector>

#include "metrokit/channels.h"

namespace metrokit {

class Prior {
 public:
  enum class Kind { kFlat, kCustom };

  // Uniform on [center - halfwidth, center + halfwidth]; its Fisher
  // information is infinite.
  static Prior flat(double center, double halfwidth);
  // Density samples on a uniform grid over [lo, hi] (linear interpolation,
  // zero outside). Throws kInvalidPrior unless nonnegative with unit mass.
  static Prior custom(double lo, double hi, std::vector<double> density,
                      std::optional<double> fisher = std::nullopt);
  // Normal density sampled on 2^12 points over +-12 sigma, Fisher 1/sigma^2.
  static Prior gaussian(double mean, double sigma);

  Kind kind() const { return kind_; }
  const std::optional<double>& fisher() const { return fisher_; }
  double density(double w) const;
  // Lambda(tau) = int min(p0(w), p0(w + tau)) dw.
  double overlap(double tau) const;
  // Lambda vanishes beyond this shift.
  double overlap_support() const;

 private:
  Kind kind_ = Kind::kFlat;
  double center_ = 0.0, halfwidth_ = 1.0;
  double lo_ = 0.0, hi_ = 0.0;
  std::vector<double> samples_;
  std::optional<double> fisher_;
};

double crb(double qfi, double repetitions = 1.0);

struct FrequencyBound {
  double value = 0.0;      // lower bound on delta-omega^2 T
  bool heisenberg = false; // true when the noise is removable
};

FrequencyBound frequency_bounds(const NoiseModel& model, long n_probes, double t, double total_time);

// 1 / (4 alpha_L t' + F(p0)).
double bcrb(double alpha_l, double t_prime, const Prior& prior);

// (1/2) int_0^{1/sqrt(a)} tau (1 - tau sqrt(a)) Lambda(tau) dtau, a = alpha_L t',
// by adaptive trapezoid to 1e-6 relative.
double zzb(double alpha_l, double t_prime, const Prior& prior);

}  // namespace metrokit
