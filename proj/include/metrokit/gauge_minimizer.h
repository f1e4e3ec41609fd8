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

// Derivative-free minimization over Hermitian gauge matrices h.
//
// Starts are refined by adaptive Nelder-Mead (Gao & Han 2012 coefficients)
// with restarts from the best vertex until a restart no longer improves the
// value. Objectives in this library are convex in h, so agreement between
// starts doubles as a convergence check.

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "metrokit/matcore.h"

namespace metrokit {

struct BoundResult {
  double value = std::numeric_limits<double>::infinity();
  CMatrix h_opt;
  double t_opt = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  long iterations = 0;  // objective evaluations
};

struct MinimizeOptions {
  int starts = 20;                 // total starts, warm seeds included
  std::vector<CMatrix> seeds;      // analytic or warm-start points, tried first
  double scale = 1.0;              // standard deviation of random starts
  std::uint64_t rng_seed = 0x6d6574726fULL;
  double tol = 1e-9;               // relative spread of simplex values
  long max_evals_per_start = 400000;
  // Optional real-linear basis of the search space; the full Hermitian basis
  // of size dim^2 is used when empty.
  std::vector<CMatrix> basis;
};

struct SimplexResult {
  RVector x;
  double value = 0.0;
  long evals = 0;
  bool converged = false;
};

using VectorObjective = std::function<double(const RVector&)>;

SimplexResult nelder_mead(const VectorObjective& f, const RVector& x0, double step, double tol,
                          long max_evals);

// Nelder-Mead with restarts at the best point until improvement stalls.
SimplexResult refine(const VectorObjective& f, const RVector& x0, double step, double tol,
                     long max_evals);

// Real-linear basis of dim x dim Hermitian matrices: diagonal units, then
// (E_ij + E_ji) and i(E_ij - E_ji) for i < j.
std::vector<CMatrix> hermitian_basis(int dim);

CMatrix combine(const std::vector<CMatrix>& basis, const RVector& x);

// Least-squares coordinates of h in `basis`.
RVector coordinates(const std::vector<CMatrix>& basis, const CMatrix& h);

// Generic entry point: minimizes objective(h) over Hermitian h.
BoundResult minimize_over_h(const std::function<double(const CMatrix&)>& objective, int dim,
                            const MinimizeOptions& options = {});

// Same search over coordinates of an explicit basis. Ties within 1e-12
// relative are broken by the smallest Frobenius norm of the combined matrix.
BoundResult minimize_in_basis(const VectorObjective& objective,
                              const std::vector<CMatrix>& basis, const MinimizeOptions& options);

// Standard normals via Box-Muller on raw mt19937_64 output. The engine's
// sequence is fixed by the standard while std::normal_distribution is not,
// so this keeps random starts identical across toolchains.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();
  double uniform();  // in (0, 1)

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace metrokit
