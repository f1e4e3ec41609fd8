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

#include "cli_app.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "figures.h"
#include "metrokit/asymptotics.h"
#include "metrokit/ce_bounds.h"
#include "metrokit/error.h"
#include "metrokit/protocols.h"

namespace metrokit::cli {

namespace {

const std::vector<std::string> kCommands = {"channel", "bound",     "alpha",      "simulate",
                                            "threshold", "phase", "singleshot", "figure"};
const std::vector<std::string> kNoises = {"dephasing", "rank1-pauli", "rank1-general",
                                          "rank2-pauli", "xy"};
const std::vector<std::string> kFigures = {"fig2", "fig3", "fig4", "fig5"};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::kInvalidInput, msg); }

bool one_of(const std::string& v, const std::vector<std::string>& set) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

double parse_number(const std::string& s) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    invalid("not a number: '" + s + "'");
  }
  if (used != s.size()) invalid("not a number: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

template <size_t K>
std::array<double, K> parse_fixed(const std::string& s, const char* what) {
  const auto parts = split(s, ',');
  if (parts.size() != K) invalid(std::string(what) + " needs " + std::to_string(K) + " values");
  std::array<double, K> a{};
  for (size_t i = 0; i < K; ++i) a[i] = parse_number(parts[i]);
  return a;
}

template <size_t K>
std::string join(const std::array<double, K>& a) {
  std::string s;
  for (size_t i = 0; i < K; ++i) s += (i ? "," : "") + format_double(a[i]);
  return s;
}

nlohmann::json matrix_json(const CMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json cell_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    return std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(nullptr);
  }
  if (const long* l = std::get_if<long>(&c)) return *l;
  return std::get<std::string>(c);
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

MinimizeOptions seeded(const RunConfig& c) {
  MinimizeOptions mo;
  mo.rng_seed = c.seed;
  return mo;
}

double default_dt(const RunConfig& c) {
  if (c.dt > 0.0) return c.dt;
  return 1e-3 * std::min(1.0 / c.gamma, c.omega > 0.0 ? 1.0 / c.omega : 1.0 / c.gamma);
}

// ---- subcommands ----

Table run_channel(const RunConfig& c) {
  const NoiseModel model = build_model(c);
  const Lindbladian lind = build_lindbladian(model);
  Table t{"channel", {"t", "object", "row", "col", "re", "im"}, {}, {}};
  nlohmann::json mats = nlohmann::json::array();
  for (double tv : t_values(c)) {
    const DynamicalMatrix s = propagate(lind, tv);
    const ChoiMatrix ch = choi_from_dynamical(s);
    for (const auto& [name, m] : {std::pair<std::string, const CMatrix*>{"S", &s.s},
                                  std::pair<std::string, const CMatrix*>{"choi", &ch.p}}) {
      for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
          t.rows.push_back({tv, name, long(i), long(j), (*m)(i, j).real(), (*m)(i, j).imag()});
        }
      }
    }
    nlohmann::json kraus = nlohmann::json::array();
    for (const Mat2& k : canonical_kraus_operators(s)) kraus.push_back(matrix_json(k));
    mats.push_back({{"t", tv}, {"S", matrix_json(s.s)}, {"choi", matrix_json(ch.p)}, {"kraus", kraus}});
  }
  if (mats.size() == 1) {
    t.extra = mats[0];
  } else {
    t.extra["channels"] = mats;
  }
  return t;
}

Table run_bound(const RunConfig& c) {
  const NoiseModel model = build_model(c);
  const auto ns = n_values(c);
  Table t;
  t.name = "bound";
  if (c.optimize_t) {
    t.columns = {"N", "rate", "t_opt", "converged"};
    RateOptions ro;
    ro.bound.minimize.rng_seed = c.seed;
    const auto res = parallel_map<BoundResult>(ns.size(), c.jobs, [&](size_t i) {
      return qfi_rate_bound(model, ns[i], ro);
    });
    for (size_t i = 0; i < ns.size(); ++i) {
      t.rows.push_back({ns[i], res[i].value, res[i].t_opt, long(res[i].converged)});
    }
    return t;
  }
  t.columns = {"N", "t", "bound", "rate", "converged"};
  const auto ts = t_values(c);
  BoundOptions bo;
  bo.minimize = seeded(c);
  const size_t total = ns.size() * ts.size();
  const auto res = parallel_map<BoundResult>(total, c.jobs, [&](size_t k) {
    const long n = ns[k / ts.size()];
    const double tv = ts[k % ts.size()];
    return ce_parallel(differentiate_kraus(kraus_builder(model, tv), model.omega), n, bo);
  });
  for (size_t k = 0; k < total; ++k) {
    const long n = ns[k / ts.size()];
    const double tv = ts[k % ts.size()];
    t.rows.push_back({n, tv, res[k].value, res[k].value / (double(n) * tv), long(res[k].converged)});
  }
  return t;
}

Table run_alpha(const RunConfig& c) {
  const NoiseModel model = build_model(c);
  const NoiseClassification cls = classify_noise(model);
  double analytic = nan(), numeric = nan(), dual = nan();
  try {
    analytic = analytic_alpha(model);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNotApplicable) throw;
  }
  try {
    const NumericAlpha na = numeric_alpha(model);
    numeric = na.value;
    dual = na.dual;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInfeasible) throw;
  }
  Table t{"alpha",
          {"noise", "verdict", "slowdown", "alpha_analytic", "alpha_numeric", "alpha_dual"},
          {},
          {}};
  t.rows.push_back({c.noise, std::string(verdict_name(cls.verdict)),
                    cls.verdict == Verdict::kHeisenbergRestorable ? cls.slowdown : nan(), analytic,
                    numeric, dual});
  return t;
}

Table run_simulate(const RunConfig& c) {
  const auto ts = t_values(c);
  Table t;
  t.name = "simulate";
  if (c.protocol == "rank1") {
    t.columns = {"t", "theta", "qfi", "noiseless_slowed", "dt"};
    const double dt = c.dt > 0.0 ? c.dt : 1e-3 * std::min(1.0 / c.gamma, 1.0 / c.omega);
    const auto res = parallel_map<CorrectionRun>(ts.size(), c.jobs, [&](size_t i) {
      return simulate_rank1_correction(c.theta, c.gamma, c.omega, ts[i], dt);
    });
    for (size_t i = 0; i < ts.size(); ++i) {
      const double s = std::sin(c.theta);
      t.rows.push_back({ts[i], c.theta, res[i].qfi, s * s * ts[i] * ts[i], dt});
    }
    return t;
  }
  t.columns = {"t", "p", "keep_register", "mode", "qfi", "analytic"};
  SequentialOptions so;
  so.mode = c.mode == "simulated" ? SequentialMode::kSimulated : SequentialMode::kAnalytic;
  so.dt = c.dt;
  const auto res = parallel_map<std::pair<double, double>>(ts.size(), c.jobs, [&](size_t i) {
    const double q = xy_sequential_qfi(c.gamma, c.p, c.omega, ts[i], c.keep_register, so);
    const double a = xy_sequential_qfi(c.gamma, c.p, c.omega, ts[i], c.keep_register, {});
    return std::make_pair(q, a);
  });
  for (size_t i = 0; i < ts.size(); ++i) {
    t.rows.push_back({ts[i], c.p, long(c.keep_register), c.mode, res[i].first, res[i].second});
  }
  return t;
}

Table run_threshold(const RunConfig& c) {
  const auto ps = p_values(c);
  ThresholdOptions to;
  to.rate.bound.minimize.rng_seed = c.seed;
  to.n_max = c.n_max;
  struct Row {
    ThresholdResult sn, s1;
  };
  const auto res = parallel_map<Row>(ps.size(), c.jobs, [&](size_t i) {
    Row r;
    r.sn = threshold_n(c.gamma, ps[i], c.omega, ThresholdMode::kSN, to);
    // The s1 bracket reuses nothing from sN, but its N range is far smaller.
    r.s1 = threshold_n(c.gamma, ps[i], c.omega, ThresholdMode::kS1, to);
    return r;
  });
  Table t{"threshold",
          {"p", "gamma", "n_th_sN", "saturated_sN", "n_th_s1", "saturated_s1", "sequential_rate"},
          {},
          {}};
  for (size_t i = 0; i < ps.size(); ++i) {
    t.rows.push_back({ps[i], c.gamma, res[i].sn.n_th, long(res[i].sn.saturated), res[i].s1.n_th,
                      long(res[i].s1.saturated), res[i].sn.sequential_rate});
  }
  return t;
}

Table run_phase(const RunConfig& c) {
  const auto ps = p_values(c);
  Table t{"phase",
          {"p", "F_i", "x_opt", "F_i_closed", "F_ii", "y_opt", "F_ii_closed", "gap"},
          {},
          {}};
  const auto res = parallel_map<std::pair<PhaseStrategyResult, PhaseStrategyResult>>(
      ps.size(), c.jobs,
      [&](size_t i) { return std::make_pair(phase_strategy_parallel(ps[i]), phase_strategy_sequential(ps[i])); });
  for (size_t i = 0; i < ps.size(); ++i) {
    const auto& [a, b] = res[i];
    t.rows.push_back({ps[i], a.qfi, a.param, phase_parallel_closed_form(ps[i]), b.qfi, b.param,
                      phase_sequential_closed_form(ps[i]), b.qfi - a.qfi});
  }
  return t;
}

Table run_singleshot(const RunConfig& c) {
  const auto ns = n_values(c);
  Table t{"singleshot",
          {"N", "cost", "cost_asymptote", "avg_mse", "mse_bound", "t", "t_prime", "freq_mse", "freq_bound"},
          {},
          {}};
  const auto res = parallel_map<std::pair<SingleShotResult, FrequencySingleShot>>(
      ns.size(), c.jobs, [&](size_t i) {
        return std::make_pair(berry_wiseman_single_shot(ns[i], c.ratio),
                              berry_wiseman_frequency(ns[i], c.omega, c.ratio));
      });
  for (size_t i = 0; i < ns.size(); ++i) {
    const double n = double(ns[i]);
    const auto& [s, f] = res[i];
    t.rows.push_back({ns[i], s.cost, std::numbers::pi * std::numbers::pi / (4.0 * n * n), s.avg_mse,
                      s.mse_bound, f.t, f.t_prime, f.mse, f.bound});
  }
  return t;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kInvalidInput:
    case ErrorKind::kInvalidModel:
    case ErrorKind::kInvalidState:
    case ErrorKind::kInvalidKraus:
    case ErrorKind::kInvalidGauge:
    case ErrorKind::kInvalidPrior:
    case ErrorKind::kDomainError:
    case ErrorKind::kNotApplicable:
    case ErrorKind::kStepTooLarge:
    case ErrorKind::kNotPsd:
      return 2;
    default:
      return 3;
  }
}

}  // namespace

// ---- configuration ----

nlohmann::json config_to_json(const RunConfig& c) {
  return {{"command", c.command},   {"target", c.target},       {"noise", c.noise},
          {"gamma", c.gamma},       {"p", c.p},                 {"omega", c.omega},
          {"n", c.n},               {"r", c.r},                 {"phi", c.phi},
          {"theta", c.theta},       {"xi", c.xi},               {"gamma1", c.gamma1},
          {"gamma2", c.gamma2},     {"t", c.t},                 {"N", c.N},
          {"t_grid", c.t_grid},     {"n_grid", c.n_grid},       {"p_grid", c.p_grid},
          {"gamma_grid", c.gamma_grid}, {"optimize_t", c.optimize_t},
          {"keep_register", c.keep_register}, {"protocol", c.protocol}, {"mode", c.mode},
          {"dt", c.dt},             {"ratio", c.ratio},         {"n_max", c.n_max},
          {"out", c.out},           {"format", c.format},       {"jobs", c.jobs},
          {"seed", c.seed}};
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("command", c.command);
  get("target", c.target);
  get("noise", c.noise);
  get("gamma", c.gamma);
  get("p", c.p);
  get("omega", c.omega);
  get("n", c.n);
  get("r", c.r);
  get("phi", c.phi);
  get("theta", c.theta);
  get("xi", c.xi);
  get("gamma1", c.gamma1);
  get("gamma2", c.gamma2);
  get("t", c.t);
  get("N", c.N);
  get("t_grid", c.t_grid);
  get("n_grid", c.n_grid);
  get("p_grid", c.p_grid);
  get("gamma_grid", c.gamma_grid);
  get("optimize_t", c.optimize_t);
  get("keep_register", c.keep_register);
  get("protocol", c.protocol);
  get("mode", c.mode);
  get("dt", c.dt);
  get("ratio", c.ratio);
  get("n_max", c.n_max);
  get("out", c.out);
  get("format", c.format);
  get("jobs", c.jobs);
  get("seed", c.seed);
  return c;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) invalid("empty grid");
  std::vector<double> v;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3 && parts.size() != 4) invalid("grid must be lo:hi:count[:log]");
    const double lo = parse_number(parts[0]), hi = parse_number(parts[1]);
    const double cnt = parse_number(parts[2]);
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log") invalid("grid spacing must be 'log'");
    if (!(cnt >= 1.0) || cnt != std::floor(cnt)) invalid("grid count must be a positive integer");
    const int count = static_cast<int>(cnt);
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) invalid("grid needs finite lo <= hi");
    if (count > 1 && !(hi > lo)) invalid("grid with several points needs lo < hi");
    if (log && !(lo > 0.0)) invalid("log grid needs lo > 0");
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : double(i) / (count - 1);
      v.push_back(log ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
    }
    if (count > 1) v.back() = hi;
    return v;
  }
  for (const auto& s : split(text, ',')) v.push_back(parse_number(s));
  for (size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1]) && !(v[i] < v[i - 1])) invalid("grid values must be distinct");
  }
  const bool up = std::is_sorted(v.begin(), v.end());
  const bool down = std::is_sorted(v.rbegin(), v.rend());
  if (!up && !down) invalid("grid values must be monotone");
  return v;
}

std::vector<long> parse_integer_grid(const std::string& text) {
  std::vector<long> out;
  for (double x : parse_grid(text)) {
    if (!std::isfinite(x) || x < 1.0 || x > 1e9) invalid("probe numbers must be in [1, 1e9]");
    out.push_back(std::lround(x));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> t_values(const RunConfig& c) {
  return c.t_grid.empty() ? std::vector<double>{c.t} : parse_grid(c.t_grid);
}
std::vector<double> p_values(const RunConfig& c) {
  return c.p_grid.empty() ? std::vector<double>{c.p} : parse_grid(c.p_grid);
}
std::vector<double> gamma_values(const RunConfig& c) {
  return c.gamma_grid.empty() ? std::vector<double>{c.gamma} : parse_grid(c.gamma_grid);
}
std::vector<long> n_values(const RunConfig& c) {
  return c.n_grid.empty() ? std::vector<long>{c.N} : parse_integer_grid(c.n_grid);
}

void validate(const RunConfig& c) {
  if (!one_of(c.command, kCommands)) invalid("unknown command '" + c.command + "'");
  if (!one_of(c.noise, kNoises)) invalid("unknown noise '" + c.noise + "'");
  if (c.format != "csv" && c.format != "json") invalid("format must be csv or json");
  if (c.command == "figure" && !one_of(c.target, kFigures)) {
    invalid("figure name must be one of fig2, fig3, fig4, fig5");
  }
  if (c.protocol != "rank1" && c.protocol != "xy") invalid("protocol must be rank1 or xy");
  if (c.mode != "analytic" && c.mode != "simulated") invalid("mode must be analytic or simulated");
  if (!(c.gamma >= 0.0) || !std::isfinite(c.gamma)) invalid("gamma must be >= 0");
  if (!std::isfinite(c.omega)) invalid("omega must be finite");
  if (c.N < 1) invalid("N must be >= 1");
  if (c.n_max < 1) invalid("n-max must be >= 1");
  if (!(c.t >= 0.0)) invalid("t must be >= 0");
  if (!(c.dt >= 0.0)) invalid("dt must be >= 0");
  if (!(c.ratio > 0.0 && c.ratio <= 1.0)) invalid("ratio must lie in (0, 1]");
  if (c.jobs < 0) invalid("jobs must be >= 0");
  for (const std::string* g : {&c.t_grid, &c.p_grid, &c.gamma_grid}) {
    if (!g->empty()) parse_grid(*g);
  }
  if (!c.n_grid.empty()) parse_integer_grid(c.n_grid);
  for (double tv : t_values(c)) {
    if (!(tv >= 0.0)) invalid("times must be >= 0");
  }
  for (double pv : p_values(c)) {
    if (!(pv >= 0.0 && pv <= 1.0)) invalid("p must lie in [0, 1]");
  }
  for (double gv : gamma_values(c)) {
    if (!(gv >= 0.0)) invalid("gamma must be >= 0");
  }
}

NoiseModel build_model(const RunConfig& c) {
  NoiseModel m;
  if (c.noise == "dephasing") {
    m = NoiseModel::dephasing(c.gamma, c.omega);
  } else if (c.noise == "rank1-pauli") {
    m = NoiseModel::rank1_pauli(c.gamma, c.n, c.omega);
  } else if (c.noise == "rank1-general") {
    m = NoiseModel::rank1_general(
        {Complex(c.r[0], c.r[1]), Complex(c.r[2], c.r[3]), Complex(c.r[4], c.r[5])}, c.omega);
  } else if (c.noise == "rank2-pauli") {
    m = NoiseModel::rank2_pauli(c.gamma1, c.gamma2, c.phi, c.theta, c.xi, c.omega);
  } else if (c.noise == "xy") {
    m = NoiseModel::xy(c.gamma, c.p, c.omega);
  } else {
    invalid("unknown noise '" + c.noise + "'");
  }
  m.validate();
  return m;
}

int resolve_jobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FFQC_METROKIT_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void apply_figure_defaults(RunConfig& c, const std::function<bool(const std::string&)>& given) {
  auto set = [&](const char* flag, auto& field, auto value) {
    if (!given(flag)) field = value;
  };
  if (c.target == "fig2") {
    set("--gamma", c.gamma, 0.1);
    set("--omega", c.omega, 1.0);
    set("--p", c.p, 0.1);
    set("--t-grid", c.t_grid, std::string("0.01:10:60:log"));
  } else if (c.target == "fig3") {
    set("--gamma", c.gamma, 0.05);
    set("--omega", c.omega, 1.0);
    set("--p-grid", c.p_grid, std::string("0.25,0.05"));
    set("--N-grid", c.n_grid, std::string("1:500:30:log"));
  } else if (c.target == "fig4") {
    if (!given("--gamma")) {
      set("--gamma-grid", c.gamma_grid, std::string("0.1,0.2,0.3"));
    } else if (!given("--gamma-grid")) {
      c.gamma_grid.clear();
    }
    set("--omega", c.omega, 1.0);
    set("--p-grid", c.p_grid, std::string("0.02:0.5:25"));
  } else if (c.target == "fig5") {
    set("--p-grid", c.p_grid, std::string("0:1:201"));
  }
}

// ---- output ----

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& os, const RunConfig& c, const Table& t) {
  os << "# ffqc-metrokit " << kVersion << "\n";
  os << "# dataset: " << t.name << "\n";
  os << "# config: " << config_to_json(c).dump() << "\n";
  for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, double>) {
              os << format_double(v);
            } else {
              os << v;
            }
          },
          row[i]);
    }
    os << "\n";
  }
}

nlohmann::json table_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = cell_json(row[i]);
    rows.push_back(obj);
  }
  nlohmann::json j = {{"name", t.name}, {"columns", t.columns}, {"rows", rows}};
  for (auto it = t.extra.begin(); it != t.extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::vector<Table> execute(const RunConfig& c) {
  validate(c);
  if (c.command == "channel") return {run_channel(c)};
  if (c.command == "bound") return {run_bound(c)};
  if (c.command == "alpha") return {run_alpha(c)};
  if (c.command == "simulate") return {run_simulate(c)};
  if (c.command == "threshold") return {run_threshold(c)};
  if (c.command == "phase") return {run_phase(c)};
  if (c.command == "singleshot") return {run_singleshot(c)};
  if (c.target == "fig2") return figure2(c);
  if (c.target == "fig3") return figure3(c);
  if (c.target == "fig4") return figure4(c);
  return figure5(c);
}

namespace {

void write_output(const RunConfig& c, const std::vector<Table>& tables, double wall,
                  std::ostream& out) {
  auto emit = [&](std::ostream& os, const std::vector<const Table*>& ts) {
    if (c.format == "csv") {
      for (size_t i = 0; i < ts.size(); ++i) {
        if (i) os << "\n";
        write_csv(os, c, *ts[i]);
      }
      return;
    }
    nlohmann::json doc;
    doc["meta"] = {{"version", kVersion}, {"config", config_to_json(c)}, {"wall_time_s", wall}};
    if (ts.size() == 1) {
      const nlohmann::json single = table_json(*ts[0]);
      for (auto it = single.begin(); it != single.end(); ++it) doc[it.key()] = it.value();
    } else {
      doc["datasets"] = nlohmann::json::array();
      for (const Table* t : ts) doc["datasets"].push_back(table_json(*t));
    }
    os << doc.dump(2) << "\n";
  };
  std::vector<const Table*> all;
  for (const auto& t : tables) all.push_back(&t);
  if (c.out.empty()) {
    emit(out, all);
    return;
  }
  if (c.command == "figure") {
    // One file per dataset inside the output directory.
    std::filesystem::create_directories(c.out);
    for (const Table& t : tables) {
      const auto path = std::filesystem::path(c.out) / (t.name + "." + c.format);
      std::ofstream f(path);
      if (!f) throw Error(ErrorKind::kInvalidInput, "cannot write " + path.string());
      emit(f, {&t});
    }
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(ErrorKind::kInvalidInput, "cannot write " + c.out);
  emit(f, all);
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum metrology bounds and protocol simulations", "ffqc-metrokit"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "key=value configuration file; flags override it");
  app.set_version_flag("--version", kVersion);

  RunConfig c;
  std::string n_text = "0,0,1", r_text = "0,0,0,0,1,0";
  std::string keep = "true";
  app.add_option("--noise", c.noise, "dephasing | rank1-pauli | rank1-general | rank2-pauli | xy");
  app.add_option("--gamma", c.gamma, "noise rate");
  app.add_option("--p", c.p, "X-Y asymmetry");
  app.add_option("--omega", c.omega, "frequency (omega_0 for singleshot)");
  app.add_option("--n", n_text, "rank-one Pauli direction x,y,z");
  app.add_option("--r", r_text, "rank-one vector as re,im,re,im,re,im");
  app.add_option("--phi", c.phi, "Euler angle");
  app.add_option("--theta", c.theta, "Euler angle; polar angle of the noise axis for simulate");
  app.add_option("--xi", c.xi, "Euler angle");
  app.add_option("--gamma1", c.gamma1, "rank-two rate");
  app.add_option("--gamma2", c.gamma2, "rank-two rate");
  app.add_option("--t", c.t, "evolution time");
  app.add_option("--N", c.N, "number of probes");
  app.add_option("--t-grid", c.t_grid, "time grid lo:hi:count[:log] or list");
  app.add_option("--N-grid", c.n_grid, "probe-number grid");
  app.add_option("--p-grid", c.p_grid, "asymmetry grid");
  app.add_option("--gamma-grid", c.gamma_grid, "noise-rate grid");
  app.add_flag("--optimize-t", c.optimize_t, "maximize the bound rate over t");
  app.add_option("--keep-register", keep, "keep the error register (true/false)");
  app.add_option("--protocol", c.protocol, "simulate: rank1 | xy");
  app.add_option("--mode", c.mode, "simulate xy: analytic | simulated");
  app.add_option("--dt", c.dt, "simulation step (0 = default)");
  app.add_option("--ratio", c.ratio, "single-shot prior half-width over pi");
  app.add_option("--n-max", c.n_max, "largest probe number scanned for thresholds");
  app.add_option("--out", c.out, "output file (directory for figure)");
  app.add_option("--format", c.format, "csv | json");
  app.add_option("--jobs", c.jobs, "worker threads (default: FFQC_METROKIT_JOBS or all cores)");
  app.add_option("--seed", c.seed, "seed for randomized multi-starts");

  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    if (name == "figure") sub->add_option("name", c.target, "fig2 | fig3 | fig4 | fig5")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    c.command = app.get_subcommands().front()->get_name();
    c.n = parse_fixed<3>(n_text, "--n");
    c.r = parse_fixed<6>(r_text, "--r");
    if (keep == "true" || keep == "1") {
      c.keep_register = true;
    } else if (keep == "false" || keep == "0") {
      c.keep_register = false;
    } else {
      invalid("--keep-register must be true or false");
    }
    if (c.command == "figure") {
      apply_figure_defaults(c, [&](const std::string& flag) { return app.count(flag) > 0; });
    }
    if (c.command == "phase" && app.count("--p-grid") == 0 && app.count("--p") == 0) {
      c.p_grid = "0:1:101";
    }
    validate(c);
    RunConfig effective = c;
    effective.jobs = resolve_jobs(c.jobs);
    const auto tables = execute(effective);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_output(c, tables, wall, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace metrokit::cli
