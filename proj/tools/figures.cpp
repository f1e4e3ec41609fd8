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

#include "figures.h"

#include <cmath>
#include <limits>

#include "metrokit/ce_bounds.h"
#include "metrokit/error.h"
#include "metrokit/protocols.h"

namespace metrokit::cli {

namespace {

std::string label(const char* prefix, double v) {
  std::string s = format_double(v);
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
  }
  return std::string(prefix) + s;
}

// 4 alpha^(b)(t): the large-N parallel bound per probe, F^(b)/N.
double parallel_asymptotic(const NoiseModel& m, double t, std::uint64_t seed) {
  BoundOptions bo;
  bo.minimize.rng_seed = seed;
  try {
    return 4.0 * min_alpha_with_zero_beta(differentiate_kraus(kraus_builder(m, t), m.omega), bo).value;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInfeasible) throw;
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::vector<Table> figure2(const RunConfig& c) {
  const auto ts = t_values(c);
  const double g = c.gamma, p = c.p;
  const NoiseModel xy = NoiseModel::xy(g, p, c.omega);
  // The X-noise curve is the p = 1 limit at unit rate and frequency.
  const NoiseModel xnoise = NoiseModel::xy(1.0, 1.0, 1.0);
  const auto res = parallel_map<std::pair<double, double>>(ts.size(), c.jobs, [&](size_t i) {
    return std::make_pair(parallel_asymptotic(xy, ts[i], c.seed),
                          parallel_asymptotic(xnoise, ts[i], c.seed));
  });
  Table t{"fig2",
          {"t", "parallel_xy", "ffqc_register", "ffqc_discard", "fixed_ancilla", "parallel_x"},
          {},
          {}};
  for (size_t i = 0; i < ts.size(); ++i) {
    const double tv = ts[i];
    const double eta2 = std::exp(-2.0 * p * g * tv);
    t.rows.push_back({tv, res[i].first, tv / (2.0 * g * p * (1.0 - p)), tv / (2.0 * g * p),
                      tv * tv * eta2 / (1.0 - eta2), res[i].second});
  }
  return {t};
}

std::vector<Table> figure3(const RunConfig& c) {
  const auto ps = p_values(c);
  const auto ns = n_values(c);
  RateOptions ro;
  ro.bound.minimize.rng_seed = c.seed;
  const auto res = parallel_map<BoundResult>(ps.size() * ns.size(), c.jobs, [&](size_t k) {
    return qfi_rate_bound(NoiseModel::xy(c.gamma, ps[k / ns.size()], c.omega), ns[k % ns.size()], ro);
  });
  std::vector<Table> out;
  for (size_t ip = 0; ip < ps.size(); ++ip) {
    const double fs = sequential_rate(c.gamma, ps[ip], true).rate;
    Table t{label("fig3_p", ps[ip]), {"N", "fb_rate", "t_opt", "fs", "fs_over_N"}, {}, {}};
    for (size_t in = 0; in < ns.size(); ++in) {
      const BoundResult& r = res[ip * ns.size() + in];
      t.rows.push_back({ns[in], r.value, r.t_opt, fs, fs / double(ns[in])});
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<Table> figure4(const RunConfig& c) {
  const auto gs = gamma_values(c);
  const auto ps = p_values(c);
  ThresholdOptions to;
  to.rate.bound.minimize.rng_seed = c.seed;
  to.n_max = c.n_max;
  const size_t total = gs.size() * ps.size();
  const auto res = parallel_map<std::pair<ThresholdResult, ThresholdResult>>(total, c.jobs, [&](size_t k) {
    const double g = gs[k / ps.size()], p = ps[k % ps.size()];
    return std::make_pair(threshold_n(g, p, c.omega, ThresholdMode::kSN, to),
                          threshold_n(g, p, c.omega, ThresholdMode::kS1, to));
  });
  Table t{"fig4", {"gamma", "p", "n_th_sN", "saturated_sN", "n_th_s1", "saturated_s1"}, {}, {}};
  for (size_t k = 0; k < total; ++k) {
    t.rows.push_back({gs[k / ps.size()], ps[k % ps.size()], res[k].first.n_th,
                      long(res[k].first.saturated), res[k].second.n_th, long(res[k].second.saturated)});
  }
  return {t};
}

std::vector<Table> figure5(const RunConfig& c) {
  const auto ps = p_values(c);
  const auto res = parallel_map<std::pair<double, double>>(ps.size(), c.jobs, [&](size_t i) {
    return std::make_pair(phase_strategy_parallel(ps[i]).qfi, phase_strategy_sequential(ps[i]).qfi);
  });
  Table t{"fig5", {"p", "F_i", "F_ii", "gap"}, {}, {}};
  for (size_t i = 0; i < ps.size(); ++i) {
    t.rows.push_back({ps[i], res[i].first, res[i].second, res[i].second - res[i].first});
  }
  return {t};
}

}  // namespace metrokit::cli
