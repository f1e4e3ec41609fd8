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

// Command-line front end: configuration, grids, tabular output and the
// worker pool shared by the subcommands and figure generators.

#pragma once

#include <array>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "metrokit/channels.h"

namespace metrokit::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;   // channel, bound, alpha, simulate, threshold, phase, singleshot, figure
  std::string target;    // figure name
  std::string noise = "xy";
  double gamma = 1.0;
  double p = 0.5;
  double omega = 1.0;
  std::array<double, 3> n{0.0, 0.0, 1.0};
  std::array<double, 6> r{0.0, 0.0, 0.0, 0.0, 1.0, 0.0};  // re/im pairs
  double phi = 0.0, theta = 0.0, xi = 0.0;
  double gamma1 = 1.0, gamma2 = 1.0;
  double t = 1.0;
  long N = 1;
  // Grids are "lo:hi:count", "lo:hi:count:log" or a comma list; a nonempty
  // grid overrides the matching scalar.
  std::string t_grid;
  std::string n_grid;
  std::string p_grid;
  std::string gamma_grid;
  bool optimize_t = false;
  bool keep_register = true;
  std::string protocol = "rank1";  // simulate: rank1 | xy
  std::string mode = "analytic";   // xy simulate: analytic | simulated
  double dt = 0.0;
  double ratio = 0.33;             // single shot prior half-width in units of pi
  long n_max = 100000;
  std::string out;
  std::string format = "csv";
  int jobs = 0;
  std::uint64_t seed = 0x6d6574726fULL;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json config_to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

// Throws Error(kInvalidInput) on malformed grids or out-of-range settings.
void validate(const RunConfig& c);

std::vector<double> parse_grid(const std::string& text);
// Rounded to integers, deduplicated, increasing.
std::vector<long> parse_integer_grid(const std::string& text);

std::vector<double> t_values(const RunConfig& c);
std::vector<double> p_values(const RunConfig& c);
std::vector<double> gamma_values(const RunConfig& c);
std::vector<long> n_values(const RunConfig& c);

// Fills figure-specific defaults for every setting `given` reports unset.
void apply_figure_defaults(RunConfig& c, const std::function<bool(const std::string&)>& given);

NoiseModel build_model(const RunConfig& c);
int resolve_jobs(int requested);

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json extra = nlohmann::json::object();  // JSON-only payload
};

std::string format_double(double v);
void write_csv(std::ostream& os, const RunConfig& c, const Table& t);
nlohmann::json table_json(const Table& t);

// Runs fn(i) for i in [0, n) on `jobs` threads; results keep index order.
// The first exception thrown by a task is rethrown after all threads join.
template <class R>
std::vector<R> parallel_map(size_t n, int jobs, const std::function<R(size_t)>& fn) {
  std::vector<R> out(n);
  std::exception_ptr error;
  std::mutex mu;
  size_t next = 0;
  auto worker = [&] {
    while (true) {
      size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= n || error) return;
        i = next++;
      }
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  const size_t threads = std::min<size_t>(n, static_cast<size_t>(std::max(jobs, 1)));
  std::vector<std::thread> pool;
  for (size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

// Computes the tables for a parsed configuration (no I/O).
std::vector<Table> execute(const RunConfig& c);

// Full entry point: parses argv, runs, writes output; returns the exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace metrokit::cli
