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

#include "metrokit/channels.h"
#include "metrokit/error.h"
#include "metrokit/qfi.h"
#include "support.h"

using namespace metrokit;
using metrokit::testing::Rng;

namespace {

ParamState unitary_family(const CVector& psi, const CMatrix& h, double t) {
  const CMatrix rho = psi * psi.adjoint();
  return {rho, -kI * t * (h * rho - rho * h)};
}

CMatrix local_z(int n) {
  const int dim = 1 << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    double z = 0.0;
    for (int q = 0; q < n; ++q) z += (s >> q) & 1 ? -0.5 : 0.5;
    h(s, s) = z;
  }
  return h;
}

}  // namespace

TEST_CASE("qfi_mixed examples") {
  CVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(qfi_mixed(unitary_family(plus, 0.5 * pauli(3), 1.7)) == doctest::Approx(1.7 * 1.7));
  CVector ghz = CVector::Zero(8);
  ghz(0) = ghz(7) = 1.0 / std::sqrt(2.0);
  CHECK(qfi_mixed(unitary_family(ghz, local_z(3), 1.0)) == doctest::Approx(9.0));
  // Dephased block of the sequential X-Y strategy with two errors.
  const double p = 0.25, t = 1.0, c = std::pow(1 - 2 * p, 2);
  const double wt = 1.0;
  Mat2 rho, rhodot;
  rho << 0.5, 0.5 * c * std::exp(Complex(0, -wt)), 0.5 * c * std::exp(Complex(0, wt)), 0.5;
  rhodot << 0, 0.5 * c * Complex(0, -t) * std::exp(Complex(0, -wt)), 0.5 * c * Complex(0, t) * std::exp(Complex(0, wt)), 0;
  CHECK(qfi_mixed({rho, rhodot}) == doctest::Approx(0.0625).epsilon(1e-10));
}

TEST_CASE("qfi_mixed validation") {
  CMatrix bad = CMatrix::Identity(2, 2);
  bad(1, 1) = -0.5;
  bad(0, 0) = 1.5;
  CHECK_THROWS_AS(qfi_mixed({bad, CMatrix::Zero(2, 2)}), Error);
  CHECK_THROWS_AS(qfi_mixed({CMatrix::Identity(2, 2), CMatrix::Zero(2, 2)}), Error);  // trace 2
}

TEST_CASE("qfi_pure") {
  CVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(qfi_pure(plus, CVector::Zero(2)) == doctest::Approx(0.0));
  const double t = 2.3;
  CHECK(qfi_pure(plus, -kI * (t / 2) * pauli(3) * plus) == doctest::Approx(t * t));
  CHECK_THROWS_AS(qfi_pure(2.0 * plus, CVector::Zero(2)), Error);
  Rng rng(31);
  for (int c = 0; c < 200; ++c) {
    const int dim = rng.integer(2, 6);
    const CVector psi = rng.unit_vector(dim);
    const CVector d = rng.ginibre(dim, 1).col(0);
    const CMatrix rho = psi * psi.adjoint();
    const CMatrix rhodot = d * psi.adjoint() + psi * d.adjoint();
    // The pure formula assumes the norm is preserved: remove the radial part.
    const CVector dt = d - Complex(std::real(psi.dot(d)), 0) * psi;
    const CMatrix rhodot_t = dt * psi.adjoint() + psi * dt.adjoint();
    (void)rhodot;
    REQUIRE(std::abs(qfi_pure(psi, dt) - qfi_mixed({rho, rhodot_t})) < 1e-8 * std::max(1.0, qfi_pure(psi, dt)));
  }
}

TEST_CASE("unitary encoding gives four times the variance") {
  Rng rng(32);
  for (int c = 0; c < 200; ++c) {
    const int dim = rng.integer(2, 5);
    const CMatrix h = rng.hermitian(dim);
    const CVector psi = rng.unit_vector(dim);
    const Complex m1 = psi.dot(h * psi);
    const Complex m2 = psi.dot(h * h * psi);
    const double var = (m2 - m1 * m1).real();
    REQUIRE(std::abs(qfi_mixed(unitary_family(psi, h, 1.0)) - 4.0 * var) < 1e-10 * std::max(1.0, var));
  }
}

TEST_CASE("qfi_fidelity agrees with the spectral formula") {
  auto constant = [](double) { CMatrix r = CMatrix::Identity(2, 2) * 0.5; return r; };
  CHECK(std::abs(qfi_fidelity(constant, 1.0)) < 1e-8);

  const double t = 1.0;
  auto unitary = [&](double w) {
    CVector plus(2);
    plus << std::exp(Complex(0, -w * t / 2)) / std::sqrt(2.0), std::exp(Complex(0, w * t / 2)) / std::sqrt(2.0);
    return CMatrix(plus * plus.adjoint());
  };
  CHECK(qfi_fidelity(unitary, 1.0) == doctest::Approx(t * t).epsilon(1e-3));

  Rng rng(33);
  int checked = 0;
  for (int c = 0; c < 100; ++c) {
    const NoiseModel m = rng.model();
    const double tt = rng.uniform(0.1, 2.0);
    const CMatrix rho0 = rng.density(2);
    auto rho_at = [&](double w) {
      NoiseModel mw = m;
      mw.omega = w;
      return CMatrix(apply_dynamical(propagate(build_lindbladian(mw), tt), rho0));
    };
    const KrausSet ks = differentiate_kraus(kraus_builder(m, tt), m.omega);
    CMatrix rho = CMatrix::Zero(2, 2), rhodot = CMatrix::Zero(2, 2);
    for (size_t i = 0; i < ks.k.size(); ++i) {
      rho += ks.k[i] * rho0 * ks.k[i].adjoint();
      rhodot += ks.kdot[i] * rho0 * ks.k[i].adjoint() + ks.k[i] * rho0 * ks.kdot[i].adjoint();
    }
    const double exact = qfi_mixed({0.5 * (rho + rho.adjoint()), 0.5 * (rhodot + rhodot.adjoint())});
    const double fid = qfi_fidelity(rho_at, m.omega);
    REQUIRE(std::abs(fid - exact) <= std::max(1e-5, 1e-3 * exact));
    ++checked;
  }
  CHECK(checked == 100);
}

TEST_CASE("qfi_direct_sum") {
  Rng rng(34);
  const CMatrix rho = rng.density(2);
  CMatrix d = rng.hermitian(2);
  d -= 0.5 * d.trace() * CMatrix::Identity(2, 2);
  const ParamState b{rho, d};
  CHECK(qfi_direct_sum({{1.0}, {b}}) == doctest::Approx(qfi_mixed(b)));
  CHECK(qfi_direct_sum({{0.3, 0.7}, {b, b}}) == doctest::Approx(qfi_mixed(b)));
  CHECK_THROWS_AS(qfi_direct_sum({{0.3, 0.3}, {b, b}}), Error);

  // Poisson-weighted dephased blocks reproduce the closed form.
  const double g = 0.05, p = 0.25, t = 10.0, lam = 0.5 * g * t;
  DirectSumState ds;
  double w = std::exp(-lam);
  for (int m = 0; m < 40; ++m) {
    const double c = std::pow(1 - 2 * p, m);
    Mat2 r, rd;
    r << 0.5, 0.5 * c, 0.5 * c, 0.5;
    rd << 0, Complex(0, -0.5 * c * t), Complex(0, 0.5 * c * t), 0;
    ds.weights.push_back(w);
    ds.blocks.push_back({r, rd});
    w *= lam / (m + 1);
  }
  double total = 0.0;
  for (double x : ds.weights) total += x;
  for (double& x : ds.weights) x /= total;
  CHECK(qfi_direct_sum(ds) == doctest::Approx(100.0 * std::exp(-0.1875)).epsilon(1e-10));
}

TEST_CASE("property: QFI additivity") {
  const auto r = metrokit::testing::property_qfi_additivity(200, 105);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("appending an idle ancilla leaves the QFI unchanged") {
  Rng rng(35);
  for (int c = 0; c < 200; ++c) {
    const CMatrix rho = rng.density(2);
    CMatrix d = rng.hermitian(2);
    d -= 0.5 * d.trace() * CMatrix::Identity(2, 2);
    const CVector a = rng.unit_vector(2);
    const CMatrix anc = a * a.adjoint();
    const double f = qfi_mixed({rho, d});
    REQUIRE(std::abs(qfi_mixed({kron(rho, anc), kron(d, anc)}) - f) < 1e-8 * std::max(1.0, f));
  }
}
