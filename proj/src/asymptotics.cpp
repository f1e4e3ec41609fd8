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

#include "metrokit/asymptotics.h"

#include <algorithm>
#include <cmath>

#include "metrokit/error.h"
#include "metrokit/gauge_minimizer.h"

namespace metrokit {
namespace {

constexpr int kParams = 16;  // 9 for H0, 6 for h1, 1 for h2_00

CMatrix lower_block(const CMatrix& m) { return m.bottomRightCorner(3, 3); }

CMatrix block(const Complex& corner, const CMatrix& row, const CMatrix& col, const CMatrix& low) {
  CMatrix x = CMatrix::Zero(4, 4);
  x(0, 0) = corner;
  x.block(0, 1, 1, 3) = row;
  x.block(1, 0, 3, 1) = col;
  x.bottomRightCorner(3, 3) = low;
  return x;
}

Eigen::Vector4d pauli_coords(const Mat2& a) {
  Eigen::Vector4d c;
  for (int mu = 0; mu < 4; ++mu) c(mu) = 0.5 * (pauli(mu) * a).trace().real();
  return c;
}

GaugeExpansion gauge_from(const RVector& x) {
  static const std::vector<CMatrix> herm = hermitian_basis(3);
  GaugeExpansion g;
  for (int j = 0; j < 9; ++j) g.h0 += x(j) * herm[static_cast<size_t>(j)];
  for (int k = 0; k < 3; ++k) g.h1(k) = Complex(x(9 + 2 * k), x(10 + 2 * k));
  g.h2_00 = x(15);
  return g;
}

// Qubit operators G_i = sum_k Y_ik sigma_k with Y = [h1 | H0 Mbar1], so that
// alpha2 = sum_i G_i^H G_i.
std::array<Mat2, 3> alpha_factors(const CMatrix& mbar1, const GaugeExpansion& g) {
  CMatrix y(3, 4);
  y.col(0) = g.h1;
  y.rightCols(3) = g.h0 * mbar1;
  std::array<Mat2, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = Mat2::Zero();
    for (int k = 0; k < 4; ++k) out[i] += y(i, k) * pauli(k);
  }
  return out;
}

}  // namespace

ShortTimeExpansion short_time_expansion(const Lindbladian& lind) {
  if (lind.lbar.rows() != 3 || lind.lbar.cols() != 3) {
    throw Error(ErrorKind::kInvalidInput, "Lbar must be 3x3");
  }
  require_hermitian(lind.lbar, 1e-10, "Lbar");
  if (eig_hermitian(lind.lbar).values(0) < -1e-12) {
    throw Error(ErrorKind::kNotPsd, "Lbar is not positive semidefinite");
  }
  const CMatrix& l = lind.lbar;
  ShortTimeExpansion e;
  e.omega = lind.omega;
  e.s0 = CMatrix::Zero(4, 4);
  e.s0(0, 0) = 1.0;

  // The anticommutator of the dissipator contributes the Hermitian operator
  // tr(Lbar) + 2 sum_k Im Lbar_{k+1,k+2} sigma_k (indices cyclic in 1..3).
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = -l.trace().real();
  for (int k = 0; k < 3; ++k) {
    const double im = l((k + 1) % 3, (k + 2) % 3).imag();
    s(k + 1, 0) = -im;
    s(0, k + 1) = -im;
  }
  s(3, 0) -= kI * (lind.omega / 2.0);
  s(0, 3) += kI * (lind.omega / 2.0);
  s.bottomRightCorner(3, 3) = l;
  e.s1 = s;

  e.m0 = e.s0;
  e.m1 = CMatrix::Zero(4, 4);
  e.m1.bottomRightCorner(3, 3) = matrix_sqrt_psd(l);
  e.m2 = block(0.5 * s(0, 0), s.block(0, 1, 1, 3), s.block(1, 0, 3, 1), CMatrix::Zero(3, 3));
  return e;
}

Mat2 pauli_sandwich(const CMatrix& x) {
  if (x.rows() != 4 || x.cols() != 4) throw Error(ErrorKind::kInvalidInput, "need a 4x4 matrix");
  Mat2 out = Mat2::Zero();
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      if (x(k, l) != Complex(0.0)) out += x(k, l) * pauli(k) * pauli(l);
    }
  }
  return out;
}

AlphaBeta alpha2_beta2(const ShortTimeExpansion& exp, const GaugeExpansion& g) {
  require_hermitian(g.h0, 1e-10, "H0");
  const CMatrix mb = lower_block(exp.m1);
  AlphaBeta ab;
  ab.alpha = Mat2::Zero();
  for (const Mat2& f : alpha_factors(mb, g)) ab.alpha += f.adjoint() * f;
  const CMatrix x = block(g.h2_00, g.h1.adjoint() * mb, mb * g.h1, mb * g.h0 * mb);
  ab.beta = kI * (-0.5 * pauli(3) + pauli_sandwich(x));
  return ab;
}

Mat2 beta3(const ShortTimeExpansion& exp, const GaugeExpansion& g) {
  const CMatrix m1 = lower_block(exp.m1);
  const CVector s = exp.s1.block(1, 0, 3, 1);
  const Complex corner = 0.5 * g.h3_00 + (s.adjoint() * g.h1)(0, 0);
  const CMatrix row = g.h1.adjoint() * g.mbar2 + (s.adjoint() * g.h0 + g.h2.adjoint()) * m1;
  const CMatrix low = 0.5 * m1 * g.hh1 * m1 + g.mbar2 * g.h0 * m1;
  const CMatrix y = block(corner, row, CMatrix::Zero(3, 1), low);
  CMatrix extra = CMatrix::Zero(4, 4);
  extra.block(0, 1, 1, 3) = 0.5 * m1.row(2);
  return kI * pauli_sandwich(y + y.adjoint()) + kI * pauli_sandwich(extra);
}

GaugeExpansion beta3_cancel(const ShortTimeExpansion& exp, const GaugeExpansion& g) {
  const Mat2 b2 = alpha2_beta2(exp, g).beta;
  if (b2.cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorKind::kInvalidGauge, "beta2 must vanish before cancelling beta3");
  }
  const CMatrix m1 = lower_block(exp.m1);
  const CVector s = exp.s1.block(1, 0, 3, 1);
  GaugeExpansion out = g;
  out.h3_00 = -2.0 * (s.adjoint() * g.h1)(0, 0).real();
  out.hh1 = 2.0 * g.h0;
  out.mbar2 = -m1;
  // Only Re(h2) is fixed; the imaginary part is free and set alike.
  CVector e3 = CVector::Zero(3);
  e3(2) = 0.25;
  out.h2 = g.h1 - g.h0 * s - e3;
  return out;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHeisenbergRestorable: return "HeisenbergRestorable";
    case Verdict::kStandardScaling: return "StandardScaling";
    case Verdict::kUncorrectableParallelDephasing: return "UncorrectableParallelDephasing";
  }
  return "unknown";
}

namespace {

// |cos| of the angle between a rank-one Pauli direction and z, or nullopt when
// the rank-one vector is not Pauli (Re r and Im r independent).
std::optional<double> pauli_axis_z(const NoiseModel& m) {
  if (m.kind == NoiseKind::kRank1Pauli) {
    const double norm = std::hypot(m.n[0], m.n[1], m.n[2]);
    return std::abs(m.n[2]) / norm;
  }
  if (m.kind != NoiseKind::kRank1General) return std::nullopt;
  Eigen::Vector3d re, im;
  for (int k = 0; k < 3; ++k) {
    re(k) = m.r[k].real();
    im(k) = m.r[k].imag();
  }
  const double scale = re.squaredNorm() + im.squaredNorm();
  if (re.cross(im).squaredNorm() > 1e-24 * scale * scale) return std::nullopt;
  // r = e^{i phi} v with v real; v is whichever part dominates.
  const Eigen::Vector3d v = re.norm() >= im.norm() ? re : im;
  return std::abs(v(2)) / v.norm();
}

bool is_parallel(double cos_z) { return cos_z > 1.0 - 1e-12; }

}  // namespace

NoiseClassification classify_noise(const NoiseModel& model) {
  model.validate();
  NoiseClassification c;
  if (const auto cz = pauli_axis_z(model)) {
    if (is_parallel(*cz)) {
      c.verdict = Verdict::kUncorrectableParallelDephasing;
      c.alpha_l = 1.0 / (8.0 * model.gamma);
    } else {
      c.verdict = Verdict::kHeisenbergRestorable;
      c.slowdown = std::sqrt(1.0 - (*cz) * (*cz));
    }
    return c;
  }
  c.verdict = Verdict::kStandardScaling;
  c.alpha_l = analytic_alpha(model);
  return c;
}

double analytic_alpha(const NoiseModel& model) {
  model.validate();
  switch (model.kind) {
    case NoiseKind::kDephasing:
      return 1.0 / (8.0 * model.gamma);
    case NoiseKind::kRank1Pauli:
      if (is_parallel(*pauli_axis_z(model))) return 1.0 / (8.0 * model.gamma);
      throw Error(ErrorKind::kNotApplicable, "rank-one Pauli noise off the z axis admits no linear bound");
    case NoiseKind::kRank1General: {
      Eigen::Vector3d re, im;
      for (int k = 0; k < 3; ++k) {
        re(k) = model.r[k].real();
        im(k) = model.r[k].imag();
      }
      const double gram = re.squaredNorm() * im.squaredNorm() - std::pow(re.dot(im), 2);
      const double scale = re.squaredNorm() + im.squaredNorm();
      if (gram <= 1e-24 * scale * scale) {
        throw Error(ErrorKind::kNotApplicable, "Re r and Im r are collinear (Pauli noise)");
      }
      const double a = std::abs(model.r[0] + kI * model.r[1]);
      const double b = std::abs(model.r[0] - kI * model.r[1]);
      return std::pow(std::max(a, b), 2) / (16.0 * gram);
    }
    case NoiseKind::kRank2Pauli: {
      const double c = std::cos(model.theta), s = std::sin(model.theta);
      const double cp = std::cos(model.phi), sp = std::sin(model.phi);
      const double g1 = model.gamma1, g2 = model.gamma2;
      return (c * c * (g1 + g2) + s * s * (g1 * sp * sp + g2 * cp * cp)) / (8.0 * g1 * g2);
    }
    case NoiseKind::kXY:
      return 1.0 / (8.0 * model.gamma * model.p * (1.0 - model.p));
  }
  throw Error(ErrorKind::kNotApplicable, "unknown noise family");
}

NumericAlpha numeric_alpha(const Lindbladian& lind) {
  const ShortTimeExpansion exp = short_time_expansion(lind);
  const CMatrix mb = lower_block(exp.m1);

  // beta2 = i B(x) with B Hermitian and affine in x.
  auto b_of = [&](const RVector& x) {
    return pauli_coords(-kI * alpha2_beta2(exp, gauge_from(x)).beta);
  };
  const Eigen::Vector4d b0 = b_of(RVector::Zero(kParams));
  RMatrix a(4, kParams);
  std::array<std::array<Mat2, 3>, kParams> factors;
  for (int j = 0; j < kParams; ++j) {
    RVector e = RVector::Zero(kParams);
    e(j) = 1.0;
    a.col(j) = b_of(e) - b0;
    factors[static_cast<size_t>(j)] = alpha_factors(mb, gauge_from(e));
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const RVector xp = svd.solve(-b0);
  if ((a * xp + b0).norm() > 1e-10 * std::max(1.0, b0.norm())) {
    throw Error(ErrorKind::kInfeasible, "no gauge cancels beta2");
  }
  const RMatrix z = svd.matrixV().rightCols(kParams - svd.rank());

  // tr(sigma_mu alpha2(x)) = x^T Q_mu x.
  std::array<RMatrix, 4> q;
  for (int mu = 0; mu < 4; ++mu) {
    q[mu] = RMatrix::Zero(kParams, kParams);
    for (int j = 0; j < kParams; ++j) {
      for (int l = 0; l < kParams; ++l) {
        Complex acc = 0.0;
        for (int i = 0; i < 3; ++i) {
          acc += (pauli(mu) * factors[j][i].adjoint() * factors[l][i]).trace();
        }
        q[mu](j, l) = acc.real();
      }
    }
  }

  auto ball = [](const RVector& v) -> Eigen::Vector3d {
    const double r = v.norm();
    return r > 1.0 ? Eigen::Vector3d(v / r) : Eigen::Vector3d(v);
  };
  // Inner problem at fixed n: a convex quadratic on the feasible affine set.
  auto inner = [&](const Eigen::Vector3d& n, RVector* x_out) {
    RMatrix qn = q[0];
    for (int k = 0; k < 3; ++k) qn += n(k) * q[k + 1];
    RVector x = xp;
    if (z.cols() > 0) {
      const RMatrix h = z.transpose() * qn * z;
      const RVector c = z.transpose() * qn * xp;
      Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (h + h.transpose()));
      const RVector& ev = es.eigenvalues();
      const double cut = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
      RVector coeff = es.eigenvectors().transpose() * c;
      for (Eigen::Index i = 0; i < ev.size(); ++i) coeff(i) = ev(i) > cut ? -coeff(i) / ev(i) : 0.0;
      x += z * (es.eigenvectors() * coeff);
    }
    if (x_out) *x_out = x;
    return 0.5 * x.dot(qn * x);
  };
  const SimplexResult dual = refine(
      [&](const RVector& v) { return -inner(ball(v), nullptr); }, RVector::Zero(3), 0.5, 1e-15,
      200000);

  auto lambda_max = [&](const RVector& x) {
    return max_eigenvalue_2x2(alpha2_beta2(exp, gauge_from(x)).alpha);
  };
  RVector x_best;
  inner(ball(dual.x), &x_best);
  double best = lambda_max(x_best);
  const double lower = -dual.value;
  if (best - lower > 1e-10 * std::max(std::abs(lower), 1e-300) && z.cols() > 0) {
    // Degenerate dual optimum: polish the primal over the feasible set.
    const RVector z0 = z.transpose() * (x_best - xp);
    const SimplexResult primal = refine(
        [&](const RVector& zz) { return lambda_max(xp + z * zz); }, z0,
        0.1 * (z0.cwiseAbs().maxCoeff() + 1e-3), 1e-14, 400000);
    if (primal.value < best) {
      best = primal.value;
      x_best = xp + z * primal.x;
    }
  }
  NumericAlpha out;
  out.value = best;
  out.dual = std::min(lower, best);
  out.gauge = gauge_from(x_best);
  return out;
}

NumericAlpha numeric_alpha(const NoiseModel& model) {
  model.validate();
  return numeric_alpha(build_lindbladian(model));
}

}  // namespace metrokit
