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

#include "metrokit/estbounds.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metrokit/asymptotics.h"
#include "metrokit/error.h"

namespace metrokit {

Prior Prior::flat(double center, double halfwidth) {
  if (!(halfwidth > 0.0) || !std::isfinite(center) || !std::isfinite(halfwidth)) {
    throw Error(ErrorKind::kInvalidPrior, "flat prior needs a positive finite half-width");
  }
  Prior p;
  p.kind_ = Kind::kFlat;
  p.center_ = center;
  p.halfwidth_ = halfwidth;
  return p;
}

Prior Prior::custom(double lo, double hi, std::vector<double> density,
                    std::optional<double> fisher) {
  if (!(hi > lo) || density.size() < 2) {
    throw Error(ErrorKind::kInvalidPrior, "custom prior needs hi > lo and at least two samples");
  }
  double mass = 0.0;
  const double h = (hi - lo) / static_cast<double>(density.size() - 1);
  for (size_t i = 0; i < density.size(); ++i) {
    if (!(density[i] >= 0.0) || !std::isfinite(density[i])) {
      throw Error(ErrorKind::kInvalidPrior, "density must be finite and nonnegative");
    }
    mass += (i == 0 || i + 1 == density.size() ? 0.5 : 1.0) * density[i] * h;
  }
  if (std::abs(mass - 1.0) > 1e-8) throw Error(ErrorKind::kInvalidPrior, "density must integrate to 1");
  if (fisher && !(*fisher >= 0.0)) throw Error(ErrorKind::kInvalidPrior, "Fisher information must be >= 0");
  Prior p;
  p.kind_ = Kind::kCustom;
  p.lo_ = lo;
  p.hi_ = hi;
  p.samples_ = std::move(density);
  p.fisher_ = fisher;
  return p;
}

Prior Prior::gaussian(double mean, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::kInvalidPrior, "sigma must be positive");
  const int n = 1 << 12;
  const double lo = mean - 12.0 * sigma, hi = mean + 12.0 * sigma;
  std::vector<double> d(n);
  const double h = (hi - lo) / (n - 1);
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = (lo + i * h - mean) / sigma;
    d[i] = std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
    mass += (i == 0 || i + 1 == n ? 0.5 : 1.0) * d[i] * h;
  }
  for (double& v : d) v /= mass;
  return custom(lo, hi, std::move(d), 1.0 / (sigma * sigma));
}

double Prior::density(double w) const {
  if (kind_ == Kind::kFlat) {
    return std::abs(w - center_) <= halfwidth_ ? 0.5 / halfwidth_ : 0.0;
  }
  if (w < lo_ || w > hi_) return 0.0;
  const double u = (w - lo_) / (hi_ - lo_) * static_cast<double>(samples_.size() - 1);
  const size_t i = std::min(static_cast<size_t>(u), samples_.size() - 2);
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * samples_[i] + f * samples_[i + 1];
}

double Prior::overlap(double tau) const {
  tau = std::abs(tau);
  if (kind_ == Kind::kFlat) return std::max(0.0, 1.0 - tau / (2.0 * halfwidth_));
  if (tau >= hi_ - lo_) return 0.0;
  // Trapezoid over the overlap of the support with its shift.
  const size_t n = samples_.size();
  const double h = (hi_ - lo_) / static_cast<double>(n - 1);
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double w = lo_ + static_cast<double>(i) * h;
    const double v = std::min(samples_[i], density(w + tau));
    acc += (i == 0 || i + 1 == n ? 0.5 : 1.0) * v * h;
  }
  return acc;
}

double Prior::overlap_support() const {
  return kind_ == Kind::kFlat ? 2.0 * halfwidth_ : hi_ - lo_;
}

double crb(double qfi, double repetitions) {
  if (!(qfi > 0.0)) throw Error(ErrorKind::kDomainError, "CRB needs a positive QFI");
  if (!(repetitions >= 1.0)) throw Error(ErrorKind::kInvalidInput, "repetitions must be >= 1");
  return 1.0 / (repetitions * qfi);
}

FrequencyBound frequency_bounds(const NoiseModel& model, long n_probes, double t, double total_time) {
  if (n_probes < 1 || !(t > 0.0) || !(total_time >= t)) {
    throw Error(ErrorKind::kInvalidInput, "need N >= 1 and T >= t > 0");
  }
  const NoiseClassification c = classify_noise(model);
  const double n = static_cast<double>(n_probes);
  if (c.verdict == Verdict::kHeisenbergRestorable) {
    return {1.0 / (c.slowdown * c.slowdown * n * n * t), true};
  }
  return {1.0 / (4.0 * *c.alpha_l * n), false};
}

double bcrb(double alpha_l, double t_prime, const Prior& prior) {
  if (!(alpha_l >= 0.0) || !(t_prime >= 0.0)) throw Error(ErrorKind::kInvalidInput, "need alpha_L, t' >= 0");
  if (!prior.fisher()) {
    throw Error(ErrorKind::kNotApplicable, "prior Fisher information is infinite; use the ZZB");
  }
  const double denom = 4.0 * alpha_l * t_prime + *prior.fisher();
  if (!(denom > 0.0)) throw Error(ErrorKind::kDomainError, "BCRB is unbounded");
  return 1.0 / denom;
}

double zzb(double alpha_l, double t_prime, const Prior& prior) {
  if (!(alpha_l > 0.0) || !(t_prime > 0.0)) throw Error(ErrorKind::kInvalidInput, "need alpha_L, t' > 0");
  const double s = std::sqrt(alpha_l * t_prime);
  const double upper = std::min(1.0 / s, prior.overlap_support());
  auto f = [&](double tau) { return tau * (1.0 - tau * s) * prior.overlap(tau); };
  // Successive halving of the trapezoid step until two levels agree.
  int n = 16;
  const double h0 = upper / n;
  double sum = 0.5 * (f(0.0) + f(upper));
  for (int i = 1; i < n; ++i) sum += f(i * h0);
  double prev = sum * h0;
  for (int level = 0; level < 20; ++level) {
    const double h = upper / n;
    for (int i = 0; i < n; ++i) sum += f((i + 0.5) * h);
    n *= 2;
    const double cur = sum * (upper / n);
    if (level >= 2 && std::abs(cur - prev) <= 1e-6 * std::abs(cur)) return 0.5 * cur;
    prev = cur;
  }
  throw Error(ErrorKind::kNumericalFailure, "ZZB quadrature did not converge");
}

}  // namespace metrokit
