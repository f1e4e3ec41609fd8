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

#include "metrokit/channels.h"

#include <cmath>
#include <string>

#include "metrokit/error.h"

namespace metrokit {
namespace {

constexpr double kPsdTol = 1e-12;

[[noreturn]] void invalid_model(const std::string& what) {
  throw Error(ErrorKind::kInvalidModel, what);
}

// Row-major vec of a 2x2 operator: index 2*i + j holds a(i, j).
Eigen::Vector4cd vec(const Mat2& a) {
  return Eigen::Vector4cd(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
}

Complex sinhc(Complex z) {
  if (std::abs(z) < 1e-3) {
    const Complex z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

double drop_imag(Complex z, double scale, const char* what) {
  if (std::abs(z.imag()) > 1e-10 * std::max(1.0, scale)) {
    throw Error(ErrorKind::kNumericalFailure,
                std::string("X-Y channel entry ") + what + " is not real");
  }
  return z.real();
}

// The real scalars C_{gamma/2}, S_{gamma/2}, C_Omega, gamma~ S_Omega and
// omega~ S_Omega shared by the X-Y Choi, dynamical and Kraus forms.
struct XyTerms {
  double c_half, s_half, c_omega, gs, ws;
};

XyTerms xy_terms(double omega, double gamma, double p, double t) {
  if (!(t >= 0.0) || !(gamma >= 0.0) || !(p >= 0.0 && p <= 1.0) || !std::isfinite(omega)) {
    throw Error(ErrorKind::kInvalidInput, "X-Y channel needs t >= 0, gamma >= 0, p in [0,1]");
  }
  const double mu = gamma * (1.0 - 2.0 * p) / 2.0;
  const Complex big_omega = std::sqrt(Complex(mu * mu - omega * omega, 0.0));
  const double decay = 0.5 * std::exp(-gamma * t / 2.0);
  const Complex c_om = decay * std::cosh(big_omega * t);
  // S_Omega / Omega stays finite through Omega = 0.
  const Complex s_over = decay * t * sinhc(big_omega * t);
  XyTerms x;
  x.c_half = decay * std::cosh(gamma * t / 2.0);
  x.s_half = decay * std::sinh(gamma * t / 2.0);
  x.c_omega = drop_imag(c_om, 1.0, "C_Omega");
  x.gs = drop_imag(mu * s_over, 1.0, "gamma~ S_Omega");
  x.ws = drop_imag(omega * s_over, 1.0, "omega~ S_Omega");
  return x;
}

CMatrix lindblad_action(const Lindbladian& lind, const Mat2& x) {
  const auto& s = paulis();
  Mat2 out = Complex(0.0, -lind.omega / 2.0) * (s[3] * x - x * s[3]);
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      const Complex l = lind.lbar(i - 1, j - 1);
      if (l == Complex(0.0)) continue;
      const Mat2 ji = s[j] * s[i];
      out += l * (s[i] * x * s[j] - 0.5 * (ji * x + x * ji));
    }
  }
  return out;
}

}  // namespace

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kDephasing: return "dephasing";
    case NoiseKind::kRank1Pauli: return "rank1-pauli";
    case NoiseKind::kRank1General: return "rank1-general";
    case NoiseKind::kRank2Pauli: return "rank2-pauli";
    case NoiseKind::kXY: return "xy";
  }
  return "unknown";
}

NoiseModel NoiseModel::dephasing(double gamma, double omega) {
  NoiseModel m;
  m.kind = NoiseKind::kDephasing;
  m.gamma = gamma;
  m.omega = omega;
  return m;
}

NoiseModel NoiseModel::rank1_pauli(double gamma, std::array<double, 3> n, double omega) {
  NoiseModel m;
  m.kind = NoiseKind::kRank1Pauli;
  m.gamma = gamma;
  m.n = n;
  m.omega = omega;
  return m;
}

NoiseModel NoiseModel::rank1_general(std::array<Complex, 3> r, double omega) {
  NoiseModel m;
  m.kind = NoiseKind::kRank1General;
  m.r = r;
  m.gamma = 2.0 * (std::norm(r[0]) + std::norm(r[1]) + std::norm(r[2]));
  m.omega = omega;
  return m;
}

NoiseModel NoiseModel::rank2_pauli(double gamma1, double gamma2, double phi, double theta,
                                   double xi, double omega) {
  NoiseModel m;
  m.kind = NoiseKind::kRank2Pauli;
  m.gamma1 = gamma1;
  m.gamma2 = gamma2;
  m.phi = phi;
  m.theta = theta;
  m.xi = xi;
  m.omega = omega;
  return m;
}

NoiseModel NoiseModel::xy(double gamma, double p, double omega) {
  NoiseModel m;
  m.kind = NoiseKind::kXY;
  m.gamma = gamma;
  m.p = p;
  m.omega = omega;
  return m;
}

void NoiseModel::validate() const {
  if (!std::isfinite(omega)) invalid_model("omega must be finite");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) invalid_model("gamma must be finite and >= 0");
  switch (kind) {
    case NoiseKind::kDephasing:
      break;
    case NoiseKind::kRank1Pauli: {
      const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
      if (std::abs(norm - 1.0) > 1e-12) invalid_model("direction n must be a unit vector");
      break;
    }
    case NoiseKind::kRank1General: {
      const double r2 = std::norm(r[0]) + std::norm(r[1]) + std::norm(r[2]);
      if (std::abs(gamma / 2.0 - r2) > 1e-12 * std::max(1.0, r2)) {
        invalid_model("rank-one vector must satisfy gamma/2 = |r|^2");
      }
      break;
    }
    case NoiseKind::kRank2Pauli:
      if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) invalid_model("gamma1, gamma2 must be >= 0");
      if (!std::isfinite(phi) || !std::isfinite(theta) || !std::isfinite(xi)) {
        invalid_model("Euler angles must be finite");
      }
      break;
    case NoiseKind::kXY:
      if (!(p >= 0.0 && p <= 1.0)) invalid_model("p must lie in [0, 1]");
      break;
  }
}

Eigen::Matrix3d euler_rotation(double phi, double theta, double xi) {
  auto rz = [](double a) {
    Eigen::Matrix3d r;
    r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
    return r;
  };
  Eigen::Matrix3d ry;
  ry << std::cos(theta), 0, std::sin(theta), 0, 1, 0, -std::sin(theta), 0, std::cos(theta);
  return rz(phi) * ry * rz(xi);
}

Lindbladian build_lindbladian(const NoiseModel& model) {
  model.validate();
  CMatrix lbar = CMatrix::Zero(3, 3);
  switch (model.kind) {
    case NoiseKind::kDephasing:
      lbar(2, 2) = model.gamma / 2.0;
      break;
    case NoiseKind::kRank1Pauli:
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) lbar(i, j) = model.gamma / 2.0 * model.n[i] * model.n[j];
      }
      break;
    case NoiseKind::kRank1General:
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) lbar(i, j) = model.r[i] * std::conj(model.r[j]);
      }
      break;
    case NoiseKind::kRank2Pauli: {
      const Eigen::Matrix3d rot = euler_rotation(model.phi, model.theta, model.xi);
      const Eigen::Vector3d rates(model.gamma1, model.gamma2, 0.0);
      lbar = (0.5 * rot.transpose() * rates.asDiagonal() * rot).cast<Complex>();
      break;
    }
    case NoiseKind::kXY:
      lbar(0, 0) = model.gamma * model.p / 2.0;
      lbar(1, 1) = model.gamma * (1.0 - model.p) / 2.0;
      break;
  }
  return {hermitian_from_upper(lbar), model.omega};
}

RMatrix pauli_generator(const Lindbladian& lind) {
  const auto& s = paulis();
  RMatrix g(4, 4);
  for (int l = 0; l < 4; ++l) {
    const CMatrix image = lindblad_action(lind, s[l]);
    for (int k = 0; k < 4; ++k) g(k, l) = 0.5 * (s[k] * image).trace().real();
  }
  return g;
}

DynamicalMatrix propagate(const Lindbladian& lind, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::kInvalidInput, "propagate needs t >= 0");
  if (lind.lbar.rows() != 3 || lind.lbar.cols() != 3) {
    throw Error(ErrorKind::kInvalidInput, "Lbar must be 3x3");
  }
  if (eig_hermitian(lind.lbar).values(0) < -kPsdTol) {
    throw Error(ErrorKind::kNotPsd, "Lbar is not positive semidefinite");
  }
  const RMatrix transfer = expm((pauli_generator(lind) * t).cast<Complex>()).real();
  const auto& s = paulis();
  CMatrix choi = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Mat2 unit = Mat2::Zero();
      unit(a, b) = 1.0;
      Eigen::Vector4cd coeff;
      for (int l = 0; l < 4; ++l) coeff(l) = (s[l] * unit).trace();
      const Eigen::Vector4cd out = transfer.cast<Complex>() * coeff;
      Mat2 image = Mat2::Zero();
      for (int k = 0; k < 4; ++k) image += 0.5 * out(k) * s[k];
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) choi(2 * i + a, 2 * j + b) = image(i, j);
      }
    }
  }
  DynamicalMatrix d = dynamical_from_choi({hermitian_from_upper(choi), lind.omega, t});
  return d;
}

ChoiMatrix choi_from_dynamical(const DynamicalMatrix& s) {
  CMatrix p = CMatrix::Zero(4, 4);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      if (s.s(m, n) == Complex(0.0)) continue;
      p += s.s(m, n) * vec(pauli(m)) * vec(pauli(n)).adjoint();
    }
  }
  return {hermitian_from_upper(p), s.omega, s.t};
}

DynamicalMatrix dynamical_from_choi(const ChoiMatrix& c) {
  CMatrix s(4, 4);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      s(m, n) = 0.25 * (vec(pauli(m)).adjoint() * c.p * vec(pauli(n)))(0, 0);
    }
  }
  return {hermitian_from_upper(s), c.omega, c.t};
}

Mat2 apply_dynamical(const DynamicalMatrix& s, const Mat2& rho) {
  Mat2 out = Mat2::Zero();
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) out += s.s(m, n) * pauli(m) * rho * pauli(n);
  }
  return out;
}

Mat2 apply_kraus(const std::vector<Mat2>& k, const Mat2& rho) {
  Mat2 out = Mat2::Zero();
  for (const Mat2& op : k) out += op * rho * op.adjoint();
  return out;
}

ChoiMatrix choi_from_kraus(const std::vector<Mat2>& k) {
  CMatrix p = CMatrix::Zero(4, 4);
  for (const Mat2& op : k) p += vec(op) * vec(op).adjoint();
  return {p, 0.0, 0.0};
}

DynamicalMatrix compose(const DynamicalMatrix& a, const DynamicalMatrix& b) {
  // Compose via the Choi matrix of the product acting on matrix units.
  CMatrix choi = CMatrix::Zero(4, 4);
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      Mat2 unit = Mat2::Zero();
      unit(x, y) = 1.0;
      const Mat2 image = apply_dynamical(a, apply_dynamical(b, unit));
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) choi(2 * i + x, 2 * j + y) = image(i, j);
      }
    }
  }
  return dynamical_from_choi({choi, a.omega, a.t + b.t});
}

ChoiMatrix xy_choi(double omega, double gamma, double p, double t) {
  const XyTerms x = xy_terms(omega, gamma, p, t);
  CMatrix c = CMatrix::Zero(4, 4);
  c(0, 0) = x.c_half;
  c(3, 3) = x.c_half;
  c(1, 1) = x.s_half;
  c(2, 2) = x.s_half;
  c(1, 2) = -x.gs;
  c(2, 1) = -x.gs;
  c(0, 3) = Complex(x.c_omega, -x.ws);
  c(3, 0) = Complex(x.c_omega, x.ws);
  return {2.0 * c, omega, t};
}

DynamicalMatrix xy_dynamical_matrix(double omega, double gamma, double p, double t) {
  const XyTerms x = xy_terms(omega, gamma, p, t);
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = x.c_half + x.c_omega;
  s(1, 1) = x.s_half - x.gs;
  s(2, 2) = x.s_half + x.gs;
  s(3, 3) = x.c_half - x.c_omega;
  s(0, 3) = Complex(0.0, x.ws);
  s(3, 0) = Complex(0.0, -x.ws);
  return {s, omega, t};
}

std::vector<Mat2> xy_kraus_operators(double omega, double gamma, double p, double t) {
  if (!(t > 0.0)) {
    throw Error(ErrorKind::kDegenerateChannel, "closed-form X-Y Kraus set needs t > 0");
  }
  const XyTerms x = xy_terms(omega, gamma, p, t);
  const Complex z(x.c_omega, x.ws);
  const double radius = std::sqrt(std::exp(-gamma * t) / 4.0 + x.gs * x.gs);
  const Complex phase = std::abs(z) > 0.0 ? radius / z : Complex(1.0);
  auto root = [](double v) { return std::sqrt(std::max(v, 0.0)); };
  std::vector<Mat2> k(4);
  k[0] = root(x.s_half - x.gs) * pauli(1);
  k[1] = Complex(0.0, -1.0) * root(x.s_half + x.gs) * pauli(2);
  k[2] << -phase, 0, 0, 1;
  k[2] *= root(x.c_half - radius);
  k[3] << phase, 0, 0, 1;
  k[3] *= root(x.c_half + radius);
  return k;
}

KrausSet xy_kraus(double omega, double gamma, double p, double t) {
  if (!(t > 0.0)) {
    throw Error(ErrorKind::kDegenerateChannel, "closed-form X-Y Kraus set needs t > 0");
  }
  return differentiate_kraus(
      [=](double w) { return xy_kraus_operators(w, gamma, p, t); }, omega);
}

std::vector<Mat2> canonical_kraus_operators(const DynamicalMatrix& s) {
  const CMatrix st = s.s.transpose();
  const EigenDecomposition e = eig_hermitian(st);
  const double top = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  RVector roots(4);
  for (int i = 0; i < 4; ++i) {
    const double lambda = e.values(i);
    if (lambda < -kPsdTol * top) {
      throw Error(ErrorKind::kNotPsd, "dynamical matrix is not positive semidefinite");
    }
    // Structural zeros come out of the solver as +-1e-17; their square roots
    // would otherwise leak 1e-9 noise into finite-difference derivatives.
    roots(i) = lambda <= 1e-14 * top ? 0.0 : std::sqrt(lambda);
  }
  const CMatrix m = e.vectors * roots.asDiagonal() * e.vectors.adjoint();
  std::vector<Mat2> k(4, Mat2::Zero());
  for (int i = 0; i < 4; ++i) {
    for (int mu = 0; mu < 4; ++mu) k[i] += m(i, mu) * pauli(mu);
  }
  return k;
}

KrausSet canonical_kraus(const DynamicalMatrix& s) {
  KrausSet ks;
  ks.k = canonical_kraus_operators(s);
  ks.kdot.assign(ks.k.size(), Mat2::Zero());
  ks.gauge = CMatrix::Zero(4, 4);
  return ks;
}

KrausSet gauge_shift(const KrausSet& ks, const CMatrix& h) {
  const auto n = static_cast<Eigen::Index>(ks.k.size());
  if (h.rows() != n || h.cols() != n || ks.kdot.size() != ks.k.size()) {
    throw Error(ErrorKind::kInvalidInput, "gauge dimension must equal the Kraus count");
  }
  KrausSet out = ks;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (h(i, j) != Complex(0.0)) out.kdot[i] -= kI * h(i, j) * ks.k[j];
    }
  }
  out.gauge = (ks.gauge.size() == h.size() ? ks.gauge : CMatrix::Zero(n, n)) + h;
  return out;
}

KrausSet differentiate_kraus(const KrausBuilder& builder, double omega, double step) {
  if (step <= 0.0) step = 1e-5 * std::max(1.0, std::abs(omega));
  KrausSet ks;
  ks.k = builder(omega);
  const auto plus = builder(omega + step);
  const auto minus = builder(omega - step);
  const auto plus_half = builder(omega + step / 2.0);
  const auto minus_half = builder(omega - step / 2.0);
  const size_t n = ks.k.size();
  if (plus.size() != n || minus.size() != n || plus_half.size() != n || minus_half.size() != n) {
    throw Error(ErrorKind::kNumericalFailure, "Kraus builder changed the operator count");
  }
  ks.kdot.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Mat2 coarse = (plus[i] - minus[i]) / (2.0 * step);
    const Mat2 fine = (plus_half[i] - minus_half[i]) / step;
    ks.kdot[i] = (4.0 * fine - coarse) / 3.0;
    if (!all_finite(ks.kdot[i]) || !all_finite(ks.k[i])) {
      throw Error(ErrorKind::kNumericalFailure, "non-finite Kraus derivative");
    }
  }
  ks.gauge = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return ks;
}

KrausBuilder kraus_builder(const NoiseModel& model, double t) {
  model.validate();
  if (model.kind == NoiseKind::kXY && t > 0.0) {
    const double gamma = model.gamma, p = model.p;
    return [=](double w) { return xy_kraus_operators(w, gamma, p, t); };
  }
  return [model, t](double w) {
    NoiseModel m = model;
    m.omega = w;
    return canonical_kraus_operators(propagate(build_lindbladian(m), t));
  };
}

double completeness_residual(const std::vector<Mat2>& k) {
  Mat2 sum = Mat2::Zero();
  for (const Mat2& op : k) sum += op.adjoint() * op;
  return (sum - Mat2::Identity()).cwiseAbs().maxCoeff();
}

double derivative_residual(const KrausSet& ks) {
  Mat2 sum = Mat2::Zero();
  for (size_t i = 0; i < ks.k.size(); ++i) {
    sum += ks.kdot[i].adjoint() * ks.k[i] + ks.k[i].adjoint() * ks.kdot[i];
  }
  return sum.cwiseAbs().maxCoeff();
}

}  // namespace metrokit
