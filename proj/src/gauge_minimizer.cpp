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

#include "metrokit/gauge_minimizer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "metrokit/error.h"

namespace metrokit {
namespace {

constexpr double kValueFloor = 1e-300;

double max_abs(const RVector& x) { return x.size() ? x.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

double NormalStream::uniform() {
  // 53 random bits mapped into the open interval (0, 1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * M_PI * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

SimplexResult nelder_mead(const VectorObjective& f, const RVector& x0, double step, double tol,
                          long max_evals) {
  const Eigen::Index n = x0.size();
  SimplexResult out;
  if (n == 0) {
    out.x = x0;
    out.value = f(x0);
    out.evals = 1;
    out.converged = true;
    return out;
  }
  const double dn = static_cast<double>(n);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / dn;
  const double contract = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  std::vector<RVector> pts(static_cast<size_t>(n + 1), x0);
  std::vector<double> val(static_cast<size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) pts[static_cast<size_t>(i + 1)](i) += step;
  long evals = 0;
  auto eval = [&](const RVector& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (size_t i = 0; i < pts.size(); ++i) val[i] = eval(pts[i]);

  std::vector<size_t> order(pts.size());
  while (true) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return val[a] < val[b]; });
    const size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    const double spread = val[worst] - val[best];
    double diameter = 0.0;
    for (size_t i : order) diameter = std::max(diameter, max_abs(pts[i] - pts[best]));
    if (spread <= tol * std::max(std::abs(val[best]), kValueFloor) ||
        diameter <= 1e-14 * (1.0 + max_abs(pts[best]))) {
      out.converged = std::isfinite(val[best]);
      break;
    }
    if (evals >= max_evals) break;

    RVector centroid = RVector::Zero(n);
    for (size_t i : order) {
      if (i != worst) centroid += pts[i];
    }
    centroid /= dn;
    const RVector xr = centroid + reflect * (centroid - pts[worst]);
    const double fr = eval(xr);
    if (fr < val[best]) {
      const RVector xe = centroid + expand * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        val[worst] = fe;
      } else {
        pts[worst] = xr;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = xr;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const RVector xc = outside ? RVector(centroid + contract * (xr - centroid))
                               : RVector(centroid - contract * (centroid - pts[worst]));
    const double fc = eval(xc);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = xc;
      val[worst] = fc;
      continue;
    }
    for (size_t i : order) {
      if (i == best) continue;
      pts[i] = pts[best] + shrink * (pts[i] - pts[best]);
      val[i] = eval(pts[i]);
    }
  }
  const size_t best = static_cast<size_t>(std::min_element(val.begin(), val.end()) - val.begin());
  out.x = pts[best];
  out.value = val[best];
  out.evals = evals;
  return out;
}

SimplexResult refine(const VectorObjective& f, const RVector& x0, double step, double tol,
                     long max_evals) {
  SimplexResult best = nelder_mead(f, x0, step, tol, max_evals);
  long evals = best.evals;
  for (int restart = 0; restart < 40 && evals < max_evals; ++restart) {
    const double restart_step = std::max(0.01 * (max_abs(best.x) + step), 1e-7 * step);
    SimplexResult next = nelder_mead(f, best.x, restart_step, tol, max_evals - evals);
    evals += next.evals;
    const double gain = best.value - next.value;
    const bool improved = next.value < best.value;
    if (improved) {
      next.converged = next.converged || best.converged;
      best = next;
    }
    if (!improved || gain <= tol * std::max(std::abs(best.value), kValueFloor)) {
      best.converged = best.converged && next.converged;
      break;
    }
  }
  best.evals = evals;
  return best;
}

std::vector<CMatrix> hermitian_basis(int dim) {
  std::vector<CMatrix> basis;
  for (int i = 0; i < dim; ++i) {
    CMatrix e = CMatrix::Zero(dim, dim);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      CMatrix re = CMatrix::Zero(dim, dim);
      re(i, j) = 1.0;
      re(j, i) = 1.0;
      basis.push_back(re);
      CMatrix im = CMatrix::Zero(dim, dim);
      im(i, j) = kI;
      im(j, i) = -kI;
      basis.push_back(im);
    }
  }
  return basis;
}

CMatrix combine(const std::vector<CMatrix>& basis, const RVector& x) {
  if (basis.empty()) return CMatrix();
  CMatrix h = CMatrix::Zero(basis[0].rows(), basis[0].cols());
  for (size_t a = 0; a < basis.size(); ++a) h += x(static_cast<Eigen::Index>(a)) * basis[a];
  return h;
}

RVector coordinates(const std::vector<CMatrix>& basis, const CMatrix& h) {
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  if (n == 0) return RVector();
  const Eigen::Index m = h.size();
  RMatrix b(2 * m, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const CMatrix& e = basis[static_cast<size_t>(a)];
    for (Eigen::Index i = 0; i < m; ++i) {
      b(2 * i, a) = e(i).real();
      b(2 * i + 1, a) = e(i).imag();
    }
  }
  RVector v(2 * m);
  for (Eigen::Index i = 0; i < m; ++i) {
    v(2 * i) = h(i).real();
    v(2 * i + 1) = h(i).imag();
  }
  return b.colPivHouseholderQr().solve(v);
}

BoundResult minimize_in_basis(const VectorObjective& objective,
                              const std::vector<CMatrix>& basis, const MinimizeOptions& options) {
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  std::vector<RVector> starts;
  for (const CMatrix& seed : options.seeds) {
    if (seed.size() == 0) continue;
    starts.push_back(n ? coordinates(basis, seed) : RVector());
  }
  starts.push_back(RVector::Zero(n));
  NormalStream normals(options.rng_seed);
  while (static_cast<int>(starts.size()) < std::max(options.starts, 1)) {
    RVector x(n);
    for (Eigen::Index a = 0; a < n; ++a) x(a) = options.scale * normals.next();
    starts.push_back(x);
  }

  BoundResult result;
  double best_norm = std::numeric_limits<double>::infinity();
  for (const RVector& x0 : starts) {
    const double step = std::max(options.scale, 1e-3 * max_abs(x0));
    const SimplexResult r = refine(objective, x0, step, options.tol, options.max_evals_per_start);
    result.iterations += r.evals;
    if (!std::isfinite(r.value)) continue;
    const CMatrix h = n ? combine(basis, r.x) : CMatrix();
    const double norm = h.size() ? h.norm() : 0.0;
    const double tie = 1e-12 * std::max(std::abs(result.value), kValueFloor);
    const bool better = r.value < result.value - tie;
    const bool tied = std::abs(r.value - result.value) <= tie && norm < best_norm;
    if (!std::isfinite(result.value) || better || tied) {
      result.value = r.value;
      result.h_opt = h;
      result.converged = r.converged;
      best_norm = norm;
    }
  }
  if (!std::isfinite(result.value)) {
    throw Error(ErrorKind::kNumericalFailure, "objective was not finite at any start");
  }
  return result;
}

BoundResult minimize_over_h(const std::function<double(const CMatrix&)>& objective, int dim,
                            const MinimizeOptions& options) {
  const std::vector<CMatrix> basis = options.basis.empty() ? hermitian_basis(dim) : options.basis;
  BoundResult r = minimize_in_basis(
      [&](const RVector& x) { return objective(combine(basis, x)); }, basis, options);
  if (r.h_opt.size() == 0) r.h_opt = CMatrix::Zero(dim, dim);
  return r;
}

}  // namespace metrokit
