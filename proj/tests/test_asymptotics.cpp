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

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "metrokit/asymptotics.h"
#include "metrokit/error.h"
#include "support.h"

using namespace metrokit;
using metrokit::testing::Rng;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::kInvalidInput;
}

double max_abs(const CMatrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("short_time_expansion of dephasing") {
  const double gamma = 0.8, omega = 1.3;
  const auto e = short_time_expansion(build_lindbladian(NoiseModel::dephasing(gamma, omega)));
  CMatrix s0 = CMatrix::Zero(4, 4);
  s0(0, 0) = 1.0;
  CHECK(max_abs(e.s0 - s0) == 0.0);
  CHECK(std::abs(e.s1(0, 0) - Complex(-gamma / 2, 0)) < 1e-14);
  CHECK(std::abs(e.s1(3, 3) - Complex(gamma / 2, 0)) < 1e-14);
  CHECK(std::abs(e.s1(3, 0) - Complex(0, -omega / 2)) < 1e-14);
  CHECK(std::abs(e.s1(0, 3) - Complex(0, omega / 2)) < 1e-14);
  CHECK(std::abs(e.s1(1, 1)) < 1e-14);
  CHECK(std::abs(e.s1(2, 2)) < 1e-14);
  CHECK(hermiticity_residual(e.s1) < 1e-14);
}

TEST_CASE("first-order expansion leaves a quadratic residual") {
  const Lindbladian lind = build_lindbladian(NoiseModel::xy(0.7, 0.3, 1.1));
  const auto e = short_time_expansion(lind);
  std::vector<double> lx, ly;
  for (double dt : {1e-3, 1e-4, 1e-5}) {
    const CMatrix r = propagate(lind, dt).s - (e.s0 + dt * e.s1);
    lx.push_back(std::log(dt));
    ly.push_back(std::log(operator_norm(r)));
  }
  const double slope = (ly[2] - ly[0]) / (lx[2] - lx[0]);
  INFO("slope " << slope);
  CHECK(std::abs(slope - 2.0) < 0.1);
}

TEST_CASE("M1 carries the root of the noise block") {
  const double gamma = 1.7;
  const auto xy = short_time_expansion(build_lindbladian(NoiseModel::xy(gamma, 0.3, 1.0)));
  CHECK(std::abs(xy.m1(1, 1) - std::sqrt(0.15 * gamma)) < 1e-12);
  CHECK(std::abs(xy.m1(2, 2) - std::sqrt(0.35 * gamma)) < 1e-12);
  CHECK(std::abs(xy.m1(3, 3)) < 1e-12);

  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Lindbladian lind = build_lindbladian(rng.model());
    const auto e = short_time_expansion(lind);
    CHECK(max_abs(e.m1.bottomRightCorner(3, 3) - matrix_sqrt_psd(lind.lbar)) < 1e-10);
    CHECK(max_abs(e.m1.row(0)) == 0.0);
    CHECK(max_abs(e.m1.col(0)) == 0.0);
  }
}

TEST_CASE("alpha2_beta2 examples") {
  const double gamma = 0.6;
  const auto e = short_time_expansion(build_lindbladian(NoiseModel::dephasing(gamma, 1.0)));
  const AlphaBeta zero = alpha2_beta2(e, GaugeExpansion{});
  CHECK(max_abs(zero.beta) > 0.1);

  GaugeExpansion g;
  g.h1(2) = 1.0 / (4.0 * std::sqrt(gamma / 2));
  const AlphaBeta opt = alpha2_beta2(e, g);
  CHECK(max_abs(opt.beta) < 1e-12);
  CHECK(hermitian_norm_2x2(opt.alpha) == doctest::Approx(1.0 / (8 * gamma)).epsilon(1e-12));

  const NoiseModel r2 = NoiseModel::rank2_pauli(0.4, 1.3, 0.7, 1.1, 2.0, 1.0);
  const auto e2 = short_time_expansion(build_lindbladian(r2));
  const NumericAlpha na = numeric_alpha(r2);
  CHECK(max_abs(alpha2_beta2(e2, na.gauge).beta) < 1e-10);
  CHECK(hermitian_norm_2x2(alpha2_beta2(e2, na.gauge).alpha) == doctest::Approx(na.value).epsilon(1e-10));
}

TEST_CASE("beta3_cancel") {
  const auto check = [](const Lindbladian& lind, const GaugeExpansion& g) {
    const auto e = short_time_expansion(lind);
    REQUIRE(max_abs(alpha2_beta2(e, g).beta) < 1e-10);
    const GaugeExpansion full = beta3_cancel(e, g);
    CHECK(max_abs(beta3(e, full)) < 1e-10);
    // The higher-order parameters leave alpha2 and beta2 untouched.
    CHECK(max_abs(alpha2_beta2(e, full).alpha - alpha2_beta2(e, g).alpha) < 1e-12);
  };

  const double gamma = 0.9;
  GaugeExpansion deph;
  deph.h1(2) = 1.0 / (4.0 * std::sqrt(gamma / 2));
  check(build_lindbladian(NoiseModel::dephasing(gamma, 1.0)), deph);

  const NoiseModel xy = NoiseModel::xy(1.0, 0.5, 1.0);
  check(build_lindbladian(xy), numeric_alpha(xy).gauge);

  const double c = 0.35;
  const Lindbladian iso{c * CMatrix::Identity(3, 3), 1.0};
  GaugeExpansion trivial;
  trivial.h1(2) = 0.25 / std::sqrt(c);
  check(iso, trivial);

  const auto e = short_time_expansion(build_lindbladian(NoiseModel::dephasing(gamma, 1.0)));
  CHECK(kind_of([&] { beta3_cancel(e, GaugeExpansion{}); }) == ErrorKind::kInvalidGauge);
}

TEST_CASE("classify_noise") {
  const auto x = classify_noise(NoiseModel::rank1_pauli(1.0, {1, 0, 0}, 1.0));
  CHECK(x.verdict == Verdict::kHeisenbergRestorable);
  CHECK(x.slowdown == doctest::Approx(1.0));
  const auto tilt = classify_noise(NoiseModel::rank1_pauli(1.0, {std::sin(pi / 3), 0, std::cos(pi / 3)}, 1.0));
  CHECK(tilt.verdict == Verdict::kHeisenbergRestorable);
  CHECK(tilt.slowdown == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  const auto par = classify_noise(NoiseModel::rank1_pauli(2.0, {0, 0, -1}, 1.0));
  CHECK(par.verdict == Verdict::kUncorrectableParallelDephasing);
  CHECK(*par.alpha_l == doctest::Approx(1.0 / 16));
  const auto xy = classify_noise(NoiseModel::xy(1.0, 0.3, 1.0));
  CHECK(xy.verdict == Verdict::kStandardScaling);
  CHECK(*xy.alpha_l == doctest::Approx(1.0 / (8 * 0.21)));
  CHECK(std::string(verdict_name(Verdict::kStandardScaling)).size() > 0);
}

TEST_CASE("analytic_alpha examples") {
  CHECK(analytic_alpha(NoiseModel::dephasing(2.0, 1.0)) == doctest::Approx(1.0 / 16));
  CHECK(analytic_alpha(NoiseModel::xy(1.0, 0.25, 1.0)) == doctest::Approx(2.0 / 3));
  const double gamma = 0.8, a = std::sqrt(gamma / 4);
  const double ad = analytic_alpha(NoiseModel::rank1_general({a, Complex(0, a), 0.0}, 1.0));
  CHECK(std::isfinite(ad));
  CHECK(ad > 0.0);
  const double g1 = 0.5, g2 = 1.5;
  CHECK(analytic_alpha(NoiseModel::rank2_pauli(g1, g2, 0.3, 0.0, 0.1, 1.0)) ==
        doctest::Approx((g1 + g2) / (8 * g1 * g2)));
  CHECK(kind_of([] { analytic_alpha(NoiseModel::rank1_general({0.3, 0.2, Complex(0.0, 0.0)}, 1.0)); }) ==
        ErrorKind::kNotApplicable);
}

TEST_CASE("numeric_alpha examples") {
  CHECK(numeric_alpha(NoiseModel::dephasing(1.0, 1.0)).value == doctest::Approx(0.125).epsilon(1e-8));
  CHECK(numeric_alpha(NoiseModel::xy(1.0, 0.5, 1.0)).value == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(kind_of([] { numeric_alpha(NoiseModel::rank1_pauli(1.0, {1, 0, 0}, 1.0)); }) == ErrorKind::kInfeasible);
  const NumericAlpha na = numeric_alpha(NoiseModel::xy(0.3, 0.2, 1.0));
  CHECK(na.dual <= na.value + 1e-12);
  CHECK(na.dual == doctest::Approx(na.value).epsilon(1e-8));
}

TEST_CASE("property: numeric alpha never exceeds the closed form") {
  Rng rng(0xa1fa);
  int cases = 0;
  while (cases < 200) {
    const NoiseModel m = rng.model();
    if (classify_noise(m).verdict == Verdict::kHeisenbergRestorable) continue;
    ++cases;
    const double analytic = analytic_alpha(m);
    const NumericAlpha na = numeric_alpha(m);
    INFO(noise_kind_name(m.kind) << " gamma=" << m.gamma << " p=" << m.p);
    CHECK(na.value <= analytic * (1 + 1e-8) + 1e-12);
    CHECK(na.dual <= na.value * (1 + 1e-12) + 1e-14);
    if (m.kind != NoiseKind::kRank1General) {
      CHECK(std::abs(na.value / analytic - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("restricted gauges stay feasible for direct sums") {
  const double a = std::sqrt(0.6 / 4);
  const Lindbladian damp = build_lindbladian(NoiseModel::rank1_general({a, Complex(0, a), 0.0}, 1.0));
  const Lindbladian deph = build_lindbladian(NoiseModel::dephasing(0.4, 1.0));
  const Lindbladian sum{damp.lbar + deph.lbar, 1.0};

  const NumericAlpha restricted = numeric_alpha(damp);
  const auto e = short_time_expansion(sum);
  const AlphaBeta ab = alpha2_beta2(e, restricted.gauge);
  CHECK(max_abs(ab.beta) < 1e-10);
  CHECK(numeric_alpha(sum).value <= hermitian_norm_2x2(ab.alpha) + 1e-10);
}

TEST_CASE("finite-step sequential bound approaches the linear rate") {
  const double dt = 1e-4, tprime = 1.0;
  const long k = std::lround(tprime / dt);
  for (const NoiseModel& m : {NoiseModel::dephasing(1.0, 1.0), NoiseModel::xy(1.0, 0.3, 1.0)}) {
    const KrausSet ks = differentiate_kraus(kraus_builder(m, dt), m.omega);
    const SequentialBound seq = ce_sequential(ks, k, dt);
    const double linear = 4.0 * numeric_alpha(m).value * tprime;
    INFO(noise_kind_name(m.kind) << " seq " << seq.best.value << " linear " << linear);
    CHECK(std::abs(seq.best.value / linear - 1.0) < 0.05);
  }
}
