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

#include "metrokit/ce_bounds.h"

#include <algorithm>
#include <boost/math/special_functions/lambert_w.hpp>
#include <cmath>

#include "metrokit/error.h"

namespace metrokit {
namespace {

double frob(const Mat2& a) { return a.norm(); }

// Pauli coordinates of the Hermitian part of a 2x2 matrix.
Eigen::Vector4d pauli_coords(const Mat2& a) {
  Eigen::Vector4d c;
  for (int mu = 0; mu < 4; ++mu) c(mu) = 0.5 * (pauli(mu) * a).trace().real();
  return c;
}

Mat2 hermitian_part(const Mat2& a) { return 0.5 * (a + a.adjoint()); }

double parallel_value(const AlphaBeta& ab, double n) {
  const double b = hermitian_norm_2x2(hermitian_part(ab.beta));
  return 4.0 * n * max_eigenvalue_2x2(ab.alpha) + 4.0 * n * (n - 1.0) * b * b;
}

double sequential_value(const AlphaBeta& ab, double k, double x) {
  const double a = max_eigenvalue_2x2(ab.alpha);
  const double b = hermitian_norm_2x2(hermitian_part(ab.beta));
  return 4.0 * k * a + 4.0 * k * (k - 1.0) * b * (x * a + b + 1.0 / x);
}

MinimizeOptions with_scale(MinimizeOptions m, const GaugeFamily& fam) {
  if (m.scale == 1.0) m.scale = fam.scale();
  return m;
}

void check_kraus(const KrausSet& ks) {
  if (ks.k.empty() || ks.k.size() != ks.kdot.size()) {
    throw Error(ErrorKind::kInvalidKraus, "Kraus set needs matching operators and derivatives");
  }
  if (completeness_residual(ks.k) > 1e-10) {
    throw Error(ErrorKind::kInvalidKraus, "Kraus operators are not complete");
  }
}

}  // namespace

AlphaBeta alpha_beta(const KrausSet& ks) {
  check_kraus(ks);
  AlphaBeta ab{Mat2::Zero(), Mat2::Zero()};
  for (size_t i = 0; i < ks.k.size(); ++i) {
    ab.alpha += ks.kdot[i].adjoint() * ks.kdot[i];
    ab.beta += kI * ks.kdot[i].adjoint() * ks.k[i];
  }
  if (hermiticity_residual(ab.beta) > 1e-10 * std::max(1.0, frob(ab.beta))) {
    throw Error(ErrorKind::kInvalidKraus, "beta is not Hermitian; derivatives inconsistent");
  }
  return ab;
}

GaugeFamily::GaugeFamily(const KrausSet& ks, std::vector<CMatrix> basis)
    : ks_(ks), basis_(std::move(basis)) {
  check_kraus(ks_);
  const auto m = static_cast<Eigen::Index>(ks_.k.size());
  terms_.reserve(basis_.size());
  for (const CMatrix& b : basis_) {
    if (b.rows() != m || b.cols() != m) {
      throw Error(ErrorKind::kInvalidInput, "gauge basis dimension must equal the Kraus count");
    }
    std::vector<Term> terms;
    for (Eigen::Index i = 0; i < m; ++i) {
      Mat2 op = Mat2::Zero();
      bool any = false;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (b(i, j) == Complex(0.0)) continue;
        op -= kI * b(i, j) * ks_.k[static_cast<size_t>(j)];
        any = true;
      }
      if (any) terms.push_back({static_cast<int>(i), op});
    }
    terms_.push_back(std::move(terms));
  }
}

AlphaBeta GaugeFamily::at(const RVector& x) const {
  thread_local std::vector<Mat2> kd;
  kd.assign(ks_.kdot.begin(), ks_.kdot.end());
  for (size_t a = 0; a < terms_.size(); ++a) {
    const double xa = x(static_cast<Eigen::Index>(a));
    if (xa == 0.0) continue;
    for (const Term& term : terms_[a]) kd[static_cast<size_t>(term.row)] += xa * term.op;
  }
  AlphaBeta ab{Mat2::Zero(), Mat2::Zero()};
  for (size_t i = 0; i < kd.size(); ++i) {
    ab.alpha.noalias() += kd[i].adjoint() * kd[i];
    ab.beta.noalias() += kd[i].adjoint() * ks_.k[i];
  }
  ab.beta *= kI;
  return ab;
}

double GaugeFamily::scale() const {
  const AlphaBeta ab = at(RVector::Zero(static_cast<Eigen::Index>(basis_.size())));
  return std::max(std::sqrt(max_eigenvalue_2x2(ab.alpha)), 1e-8);
}

GaugeFamily::Quadratic GaugeFamily::quadratic() const {
  const auto d = static_cast<Eigen::Index>(basis_.size());
  const size_t m = ks_.k.size();
  // Dense view of the per-row shifts: K'_i = Kdot_i + sum_a x_a T[a][i].
  std::vector<std::vector<Mat2>> t(basis_.size(), std::vector<Mat2>(m, Mat2::Zero()));
  for (size_t a = 0; a < terms_.size(); ++a) {
    for (const Term& term : terms_[a]) t[a][static_cast<size_t>(term.row)] += term.op;
  }
  Quadratic out;
  out.b = RMatrix::Zero(4, d);
  Mat2 alpha0 = Mat2::Zero(), beta0 = Mat2::Zero();
  for (size_t i = 0; i < m; ++i) {
    alpha0 += ks_.kdot[i].adjoint() * ks_.kdot[i];
    beta0 += kI * ks_.kdot[i].adjoint() * ks_.k[i];
  }
  for (int mu = 0; mu < 4; ++mu) {
    const Mat2& s = pauli(mu);
    out.c(mu) = 0.5 * (s * alpha0).trace().real();
    out.b0(mu) = 0.5 * (s * beta0).trace().real();
    out.q[mu] = RMatrix::Zero(d, d);
    out.g[mu] = RVector::Zero(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      const auto& ta = t[static_cast<size_t>(a)];
      Complex ga = 0.0, ba = 0.0;
      for (size_t i = 0; i < m; ++i) {
        ga += (s * ks_.kdot[i].adjoint() * ta[i]).trace();
        ba += (s * kI * ta[i].adjoint() * ks_.k[i]).trace();
      }
      out.g[mu](a) = 0.5 * ga.real();
      out.b(mu, a) = 0.5 * ba.real();
      for (Eigen::Index b = a; b < d; ++b) {
        const auto& tb = t[static_cast<size_t>(b)];
        Complex acc = 0.0;
        for (size_t i = 0; i < m; ++i) acc += (s * ta[i].adjoint() * tb[i]).trace();
        out.q[mu](a, b) = out.q[mu](b, a) = 0.5 * acc.real();
      }
    }
  }
  return out;
}

std::vector<CMatrix> GaugeFamily::reduced_basis(const KrausSet& ks, bool use_parity) {
  const int m = static_cast<int>(ks.k.size());
  double top = 0.0;
  for (int i = 0; i < m; ++i) top = std::max({top, frob(ks.k[i]), frob(ks.kdot[i])});
  std::vector<int> active;
  for (int i = 0; i < m; ++i) {
    if (frob(ks.k[i]) + frob(ks.kdot[i]) > 1e-13 * top) active.push_back(i);
  }
  std::vector<int> parity(static_cast<size_t>(m), 0);
  bool parity_ok = use_parity;
  const Mat2& z = pauli(3);
  for (int i : active) {
    if (!parity_ok) break;
    const Mat2 zk = z * ks.k[i] * z, zkd = z * ks.kdot[i] * z;
    const double tol = 1e-10 * std::max(1.0, top);
    if (frob(zk - ks.k[i]) + frob(zkd - ks.kdot[i]) <= tol) {
      parity[i] = 1;
    } else if (frob(zk + ks.k[i]) + frob(zkd + ks.kdot[i]) <= tol) {
      parity[i] = -1;
    } else {
      parity_ok = false;
    }
  }
  std::vector<CMatrix> basis;
  for (int i : active) {
    CMatrix e = CMatrix::Zero(m, m);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (size_t a = 0; a < active.size(); ++a) {
    for (size_t b = a + 1; b < active.size(); ++b) {
      const int i = active[a], j = active[b];
      if (parity_ok && parity[i] != parity[j]) continue;
      CMatrix re = CMatrix::Zero(m, m);
      re(i, j) = 1.0;
      re(j, i) = 1.0;
      basis.push_back(re);
      CMatrix im = CMatrix::Zero(m, m);
      im(i, j) = kI;
      im(j, i) = -kI;
      basis.push_back(im);
    }
  }
  return basis;
}

namespace {

using Quadratic = GaugeFamily::Quadratic;

// The same model on the affine set x = p + Z z.
Quadratic restrict_to(const Quadratic& qf, const RVector& p, const RMatrix& z) {
  Quadratic out;
  for (int mu = 0; mu < 4; ++mu) {
    out.q[mu] = z.transpose() * qf.q[mu] * z;
    out.g[mu] = z.transpose() * (qf.g[mu] + qf.q[mu] * p);
    out.c(mu) = qf.c(mu) + 2.0 * qf.g[mu].dot(p) + p.dot(qf.q[mu] * p);
  }
  out.b = qf.b * z;
  out.b0 = qf.b0 + qf.b * p;
  return out;
}

struct Coordinates {
  Eigen::Vector4d a, b;
  std::array<RVector, 4> da;  // gradients of the alpha coordinates
};

Coordinates coordinates_at(const Quadratic& qf, const RVector& x) {
  Coordinates c;
  for (int mu = 0; mu < 4; ++mu) {
    const RVector qx = qf.q[mu] * x;
    c.a(mu) = qf.c(mu) + 2.0 * qf.g[mu].dot(x) + x.dot(qx);
    c.da[mu] = 2.0 * (qf.g[mu] + qx);
  }
  c.b = qf.b0 + qf.b * x;
  return c;
}

// lambda_max(alpha) + w ||beta||^2.
double exact_objective(const Quadratic& qf, double w, const RVector& x) {
  const Coordinates c = coordinates_at(qf, x);
  const double nb = std::abs(c.b(0)) + c.b.tail<3>().norm();
  return c.a(0) + c.a.tail<3>().norm() + w * nb * nb;
}

// The objective with every norm |v| replaced by sqrt(|v|^2 + eps^2), which
// stays convex, together with its gradient and Hessian.
double smoothed_objective(const Quadratic& qf, double w, double eps, const RVector& x, RVector* grad,
                          RMatrix* hess) {
  const Coordinates c = coordinates_at(qf, x);
  const auto d = x.size();
  const double e2 = eps * eps;
  const double sa = std::sqrt(c.a.tail<3>().squaredNorm() + e2);
  const double u1 = std::sqrt(c.b(0) * c.b(0) + e2);
  const double u2 = std::sqrt(c.b.tail<3>().squaredNorm() + e2);
  const double u = u1 + u2;
  const double value = c.a(0) + sa + w * u * u;
  if (grad == nullptr) return value;

  RVector ga = RVector::Zero(d);
  for (int k = 1; k < 4; ++k) ga += c.a(k) * c.da[k];
  RVector gb2 = RVector::Zero(d);
  for (int k = 1; k < 4; ++k) gb2 += c.b(k) * qf.b.row(k).transpose();
  const RVector b0row = qf.b.row(0).transpose();
  const RVector du = (c.b(0) / u1) * b0row + gb2 / u2;
  *grad = c.da[0] + ga / sa + 2.0 * w * u * du;

  RMatrix h = 2.0 * qf.q[0];
  for (int k = 1; k < 4; ++k) {
    h += (c.da[k] * c.da[k].transpose() + 2.0 * c.a(k) * qf.q[k]) / sa;
  }
  h -= ga * ga.transpose() / (sa * sa * sa);
  RMatrix hu = (e2 / (u1 * u1 * u1)) * b0row * b0row.transpose();
  const RMatrix bv = qf.b.bottomRows(3);
  hu += bv.transpose() * bv / u2 - gb2 * gb2.transpose() / (u2 * u2 * u2);
  h += 2.0 * w * (du * du.transpose() + u * hu);
  *hess = 0.5 * (h + h.transpose());
  return value;
}

// Damped Newton on the smoothed objective with eps shrinking geometrically
// from the scale of the objective; returns the iterate with the smallest
// exact objective.
RVector polish(const Quadratic& qf, double w, RVector x) {
  if (x.size() == 0) return x;
  RVector best = x;
  double best_value = exact_objective(qf, w, x);
  const double scale = std::max(std::abs(best_value), 1e-300);
  RVector grad;
  RMatrix hess;
  for (double eps = 1e-2 * scale; eps >= 1e-14 * scale; eps *= 0.1) {
    for (int it = 0; it < 100; ++it) {
      const double f = smoothed_objective(qf, w, eps, x, &grad, &hess);
      Eigen::SelfAdjointEigenSolver<RMatrix> es(hess);
      const RVector& ev = es.eigenvalues();
      const double cut = 1e-15 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
      RVector coeff = es.eigenvectors().transpose() * grad;
      for (Eigen::Index i = 0; i < ev.size(); ++i) coeff(i) = ev(i) > cut ? -coeff(i) / ev(i) : 0.0;
      const RVector step = es.eigenvectors() * coeff;
      const double slope = grad.dot(step);
      if (!(slope < 0.0) || -slope < 1e-13 * std::max(std::abs(f), 1e-300)) break;
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        const RVector trial = x + t * step;
        if (smoothed_objective(qf, w, eps, trial, nullptr, nullptr) <= f + 1e-4 * t * slope) {
          x = trial;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    const double v = exact_objective(qf, w, x);
    if (v < best_value) {
      best_value = v;
      best = x;
    }
  }
  return best;
}

BoundResult finish(BoundResult r, const KrausSet& ks) {
  const auto m = static_cast<Eigen::Index>(ks.k.size());
  if (r.h_opt.size() == 0) r.h_opt = CMatrix::Zero(m, m);
  r.value = std::max(r.value, 0.0);
  return r;
}

}  // namespace

BoundResult ce_single(const KrausSet& ks, const BoundOptions& options) {
  return ce_parallel(ks, 1, options);
}

BoundResult ce_parallel(const KrausSet& ks, long n_probes, const BoundOptions& options) {
  if (n_probes < 1) throw Error(ErrorKind::kInvalidInput, "N must be >= 1");
  const GaugeFamily fam(ks, GaugeFamily::reduced_basis(ks, options.use_symmetry));
  const double n = static_cast<double>(n_probes);
  BoundResult r = minimize_in_basis([&](const RVector& x) { return parallel_value(fam.at(x), n); },
                                    fam.basis(), with_scale(options.minimize, fam));
  // The objective is convex but not smooth, so the simplex stalls short of
  // the minimum; a smoothed Newton pass from its best point finishes the job.
  if (!fam.basis().empty()) {
    const RVector x0 = r.h_opt.size() == 0 ? RVector::Zero(static_cast<Eigen::Index>(fam.basis().size()))
                                           : coordinates(fam.basis(), r.h_opt);
    const RVector x = polish(fam.quadratic(), n - 1.0, x0);
    const double v = parallel_value(fam.at(x), n);
    if (v < r.value) {
      r.value = v;
      r.h_opt = combine(fam.basis(), x);
    }
  }
  return finish(r, ks);
}

SequentialBound ce_sequential(const KrausSet& ks_dt, long k, double dt,
                              const std::vector<double>& extra_x, const BoundOptions& options) {
  if (k < 1 || !(dt > 0.0)) throw Error(ErrorKind::kInvalidInput, "need k >= 1 and dt > 0");
  // The sequential objective is not convex in h, so the parity restriction
  // is not applied; zero operators are still dropped.
  const GaugeFamily fam(ks_dt, GaugeFamily::reduced_basis(ks_dt, false));
  MinimizeOptions mo = with_scale(options.minimize, fam);
  // A gauge cancelling beta is the natural starting point when k is large.
  try {
    BoundOptions inner = options;
    inner.minimize.starts = 2;
    mo.seeds.push_back(min_alpha_with_zero_beta(ks_dt, inner).h_opt);
  } catch (const Error&) {
  }
  SequentialBound out;
  out.xs = {1.0, 1.0 / dt};
  for (double x : extra_x) {
    if (!(x > 0.0)) throw Error(ErrorKind::kInvalidInput, "x must be positive");
    out.xs.push_back(x);
  }
  const double kk = static_cast<double>(k);
  for (double x : out.xs) {
    BoundResult r = finish(
        minimize_in_basis([&](const RVector& v) { return sequential_value(fam.at(v), kk, x); },
                          fam.basis(), mo),
        ks_dt);
    out.values.push_back(r.value);
    if (r.value < out.best.value) {
      out.best = r;
      out.x_best = x;
    }
    mo.seeds.push_back(r.h_opt);
  }
  return out;
}

BoundResult min_alpha_with_zero_beta(const KrausSet& ks, const BoundOptions& options) {
  const GaugeFamily fam(ks, GaugeFamily::reduced_basis(ks, options.use_symmetry));
  const auto n = static_cast<Eigen::Index>(fam.basis().size());
  const Eigen::Vector4d b0 = pauli_coords(fam.at(RVector::Zero(n)).beta);
  RMatrix a(4, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    RVector e = RVector::Zero(n);
    e(j) = 1.0;
    a.col(j) = pauli_coords(fam.at(e).beta) - b0;
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  const RVector particular = svd.solve(-b0);
  const double residual = (a * particular + b0).norm();
  if (residual > 1e-10 * std::max(1.0, b0.norm())) {
    throw Error(ErrorKind::kInfeasible, "no gauge cancels beta");
  }
  const Eigen::Index rank = svd.rank();
  const RMatrix null = svd.matrixV().rightCols(n - rank);
  MinimizeOptions mo = with_scale(options.minimize, fam);
  mo.seeds.clear();
  auto point = [&](const RVector& z) -> RVector { return particular + null * z; };
  std::vector<CMatrix> null_basis;
  for (Eigen::Index c = 0; c < null.cols(); ++c) null_basis.push_back(combine(fam.basis(), null.col(c)));
  for (const CMatrix& seed : options.minimize.seeds) {
    if (seed.size() == 0) continue;
    const RVector x = coordinates(fam.basis(), seed) - particular;
    mo.seeds.push_back(combine(null_basis, null.transpose() * x));
  }
  auto objective = [&](const RVector& z) { return max_eigenvalue_2x2(fam.at(point(z)).alpha); };
  BoundResult r = minimize_in_basis(objective, null_basis, mo);
  // Re-express the optimum as a full gauge matrix.
  RVector z = null_basis.empty() ? RVector() : coordinates(null_basis, r.h_opt);
  if (null_basis.empty() || r.h_opt.size() == 0) z = RVector::Zero(null.cols());
  if (z.size() > 0) {
    const RVector zp = polish(restrict_to(fam.quadratic(), particular, null), 0.0, z);
    const double v = objective(zp);
    if (v < r.value) {
      r.value = v;
      z = zp;
    }
  } else {
    r.value = objective(z);
  }
  r.h_opt = combine(fam.basis(), point(z));
  return finish(r, ks);
}

BoundResult qfi_rate_bound(const NoiseModel& model, long n_probes, const RateOptions& options) {
  model.validate();
  if (n_probes < 1) throw Error(ErrorKind::kInvalidInput, "N must be >= 1");
  if (!(model.gamma > 0.0)) throw Error(ErrorKind::kInvalidInput, "rate bound needs gamma > 0");
  const double n = static_cast<double>(n_probes);
  CMatrix warm = options.warm_h;
  long evals = 0;
  bool all_converged = true;
  auto rate_at = [&](double t) {
    const KrausSet ks = differentiate_kraus(kraus_builder(model, t), model.omega);
    BoundOptions bo = options.bound;
    if (warm.size() != 0) bo.minimize.seeds.insert(bo.minimize.seeds.begin(), warm);
    const BoundResult r = ce_parallel(ks, n_probes, bo);
    warm = r.h_opt;
    evals += r.iterations;
    all_converged = all_converged && r.converged;
    return std::make_pair(r.value / (n * t), r.h_opt);
  };

  double lo = 1e-4 / model.gamma, hi = 20.0 / model.gamma;
  const int points = std::max(options.coarse_points, 5);
  std::vector<double> ts(static_cast<size_t>(points)), rs(ts.size());
  std::vector<CMatrix> hs(ts.size());
  size_t best = 0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    warm = options.warm_h;
    for (size_t i = 0; i < ts.size(); ++i) {
      ts[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
      std::tie(rs[i], hs[i]) = rate_at(ts[i]);
    }
    best = static_cast<size_t>(std::max_element(rs.begin(), rs.end()) - rs.begin());
    if (best != 0 && best + 1 != ts.size()) break;
    if (attempt == 1) throw Error(ErrorKind::kNumericalFailure, "rate maximum not bracketed");
    lo /= 10.0;
    hi *= 10.0;
  }

  // Golden-section refinement between the neighbours of the coarse optimum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = ts[best - 1], b = ts[best + 1];
  warm = hs[best];
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  auto [fc, hc] = rate_at(c);
  auto [fd, hd] = rate_at(d);
  while (b - a > options.rel_tol * 0.5 * (a + b)) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      hd = hc;
      c = b - inv_phi * (b - a);
      warm = hc;
      std::tie(fc, hc) = rate_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      hc = hd;
      d = a + inv_phi * (b - a);
      warm = hd;
      std::tie(fd, hd) = rate_at(d);
    }
  }
  BoundResult out;
  const bool take_c = fc > fd;
  out.value = take_c ? fc : fd;
  out.t_opt = take_c ? c : d;
  out.h_opt = take_c ? hc : hd;
  if (rs[best] > out.value) {
    out.value = rs[best];
    out.t_opt = ts[best];
    out.h_opt = hs[best];
  }
  out.converged = all_converged;
  out.iterations = evals;
  return out;
}

double lambert_w0(double x) {
  const double branch = -std::exp(-1.0);
  if (std::isnan(x) || x < branch - 1e-15) {
    throw Error(ErrorKind::kDomainError, "lambert_w0 needs x >= -1/e");
  }
  if (x <= branch) return -1.0;
  return boost::math::lambert_w0(x);
}

namespace {

// e^{gamma t} S_{gamma/2} = (e^{gamma t} - 1) / 4.
double kappa(long n_probes, double gamma, double t) {
  return 1.0 + 2.0 * static_cast<double>(n_probes) * std::expm1(gamma * t) / 4.0;
}

}  // namespace

double xy_balanced_bound(long n_probes, double gamma, double t) {
  const double n = static_cast<double>(n_probes);
  return n * n * t * t / kappa(n_probes, gamma, t);
}

CMatrix xy_balanced_h_opt(long n_probes, double gamma, double t) {
  const double k = kappa(n_probes, gamma, t);
  const double n = static_cast<double>(n_probes);
  CMatrix h = CMatrix::Zero(4, 4);
  h(0, 1) = h(1, 0) = 1.0 - n;
  h(2, 2) = h(3, 3) = -k;
  h(2, 3) = h(3, 2) = k - 1.0;
  return h * (t / (2.0 * k));
}

RateAndTime xy_balanced_rate(long n_probes, double gamma) {
  const double n = static_cast<double>(n_probes);
  const double w = lambert_w0((2.0 - n) / (std::exp(1.0) * n));
  const double rate = 2.0 / gamma * n * (1.0 + w) / (2.0 - (1.0 - std::exp(1.0 + w)) * n);
  return {rate, (1.0 + w) / gamma};
}

namespace {

struct XyRoots {
  double eps, zeta, chi, delta, big_gamma;
};

XyRoots xy_roots(double omega, double gamma, double p, double t) {
  // Entries of the principal square root of the X-Y dynamical matrix.
  const DynamicalMatrix s = xy_dynamical_matrix(omega, gamma, p, t);
  const double c_half = 0.5 * (s.s(0, 0).real() + s.s(3, 3).real());
  const double c_omega = 0.5 * (s.s(0, 0).real() - s.s(3, 3).real());
  const double ws = s.s(0, 3).imag();
  const double theta_plus =
      c_half + std::sqrt(std::max(c_half * c_half - c_omega * c_omega - ws * ws, 0.0));
  XyRoots r;
  r.eps = std::sqrt(theta_plus / 2.0);
  r.zeta = c_omega / (2.0 * r.eps);
  r.chi = -ws / (2.0 * r.eps);
  r.delta = std::sqrt(std::max(s.s(1, 1).real(), 0.0));
  r.big_gamma = std::sqrt(std::max(s.s(2, 2).real(), 0.0));
  return r;
}

}  // namespace

AsymptoticAlpha xy_asymptotic_alpha(double omega, double gamma, double p, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::kInvalidInput, "t must be positive");
  const XyRoots r = xy_roots(omega, gamma, p, t);
  if (r.delta < 1e-150 || r.big_gamma < 1e-150) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  const double step = 1e-5 * std::max(1.0, std::abs(omega));
  auto diff = [&](auto field) {
    auto at = [&](double w) { return xy_roots(w, gamma, p, t).*field; };
    const double coarse = (at(omega + step) - at(omega - step)) / (2.0 * step);
    const double fine = (at(omega + step / 2.0) - at(omega - step / 2.0)) / step;
    return (4.0 * fine - coarse) / 3.0;
  };
  const double de = diff(&XyRoots::eps), dz = diff(&XyRoots::zeta), dc = diff(&XyRoots::chi);
  const double dd = diff(&XyRoots::delta), dg = diff(&XyRoots::big_gamma);
  const double d2 = r.delta * r.delta, g2 = r.big_gamma * r.big_gamma;
  const double cross = r.zeta * dc - dz * r.chi;
  const double value =
      2.0 * (de * de + dz * dz + dc * dc) + dd * dd + dg * dg + (d2 + g2) * cross * cross / (d2 * g2);
  return {value, false};
}

}  // namespace metrokit
