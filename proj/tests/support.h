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

// Seeded generators and property batteries shared by the unit tests and the
// acceptance runner.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "metrokit/ce_bounds.h"
#include "metrokit/channels.h"
#include "metrokit/qfi.h"

namespace metrokit::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  int integer(int lo, int hi);  // inclusive

  CMatrix ginibre(int rows, int cols);
  CMatrix hermitian(int dim);
  CMatrix unitary(int dim);
  CMatrix density(int dim);  // full rank with probability one
  CVector unit_vector(int dim);
  std::array<double, 3> direction();
  NoiseModel model(double omega_max = 2.0);

 private:
  std::mt19937_64 engine_;
};

struct PropertyOutcome {
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  // largest observed violation
  std::string first_failure;
  bool ok() const { return failures == 0; }
};

// Sum over Kraus tuples of the N-fold product channel with one idle ancilla.
ParamState extended_output(const KrausSet& ks, int n_probes, const CVector& input);

// Largest QFI over `samples` random inputs (plus a GHZ-type input).
double sampled_max_qfi(const KrausSet& ks, int n_probes, int samples, Rng& rng);

PropertyOutcome property_gauge_invariance(int cases, std::uint64_t seed);
PropertyOutcome property_trace_preservation(int cases, std::uint64_t seed);
PropertyOutcome property_choi(int cases, std::uint64_t seed);
PropertyOutcome property_qfi_additivity(int cases, std::uint64_t seed);
PropertyOutcome property_bound_validity(int cases, int inputs, std::uint64_t seed);
PropertyOutcome property_semigroup(int cases, std::uint64_t seed);

}  // namespace metrokit::testing
