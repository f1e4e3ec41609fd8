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
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.h"
#include "figures.h"

using namespace metrokit;
using namespace metrokit::cli;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "ffqc-metrokit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// Everything after the metadata lines.
std::string csv_body(const std::string& csv) {
  std::istringstream is(csv);
  std::string line, body;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '#') continue;
    body += line + "\n";
  }
  return body;
}

std::vector<std::string> csv_row(const std::string& csv, int index) {
  std::istringstream is(csv_body(csv));
  std::string line;
  for (int i = 0; i <= index; ++i) std::getline(is, line);
  std::vector<std::string> cells;
  std::stringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("grids") {
  const auto lin = parse_grid("0:1:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin[2] == doctest::Approx(0.5));
  const auto lg = parse_grid("1:100:3:log");
  CHECK(lg[1] == doctest::Approx(10.0));
  CHECK(parse_grid("0.25,0.05").size() == 2);
  CHECK(parse_integer_grid("1:10:19") == std::vector<long>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK_THROWS(parse_grid(""));
  CHECK_THROWS(parse_grid("1:0:3"));
  CHECK_THROWS(parse_grid("0:1:0"));
  CHECK_THROWS(parse_grid("0:1:3:lin"));
  CHECK_THROWS(parse_grid("1,3,2"));
  CHECK_THROWS(parse_grid("0:1:x"));
}

TEST_CASE("config JSON round trip") {
  RunConfig c;
  c.command = "bound";
  c.noise = "rank2-pauli";
  c.gamma = 0.1234567890123456789;
  c.r = {0.1, -0.2, 0.3, 0.4, 1.0 / 3.0, 0.0};
  c.t_grid = "0.1:2:7:log";
  c.optimize_t = true;
  c.keep_register = false;
  c.seed = 0xfeedbeefcafeULL;
  const RunConfig back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  CHECK(back == c);

  const Outcome o = run_args({"alpha", "--noise", "dephasing", "--gamma", "0.7", "--format", "json"});
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(o.out);
  const RunConfig echoed = config_from_json(doc["meta"]["config"]);
  CHECK(config_to_json(echoed) == doc["meta"]["config"]);
  CHECK(echoed.gamma == 0.7);
  CHECK(doc["meta"]["version"] == kVersion);
  CHECK(doc["meta"].contains("wall_time_s"));
}

TEST_CASE("channel command at t = 0 emits the identity dynamical matrix") {
  const Outcome o = run_args({"channel", "--noise", "dephasing", "--gamma", "1", "--t", "0", "--format", "json"});
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(o.out);
  const auto& s = doc["S"];
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(s[i][j][0].get<double>() == doctest::Approx(i == 0 && j == 0 ? 1.0 : 0.0));
      CHECK(s[i][j][1].get<double>() == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("bound command with time optimization") {
  const Outcome o = run_args({"bound", "--noise", "xy", "--gamma", "0.05", "--p", "0.5", "--omega", "1", "--N", "2",
                              "--optimize-t"});
  REQUIRE(o.code == 0);
  const auto row = csv_row(o.out, 1);
  REQUIRE(row.size() == 4);
  CHECK(std::stod(row[1]) == doctest::Approx(14.715).epsilon(1e-4));
}

TEST_CASE("CSV formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(std::nan("")) == "nan");
  const Outcome o = run_args({"phase", "--p-grid", "0:1:3"});
  REQUIRE(o.code == 0);
  CHECK(o.out.rfind("# ffqc-metrokit", 0) == 0);
  CHECK(csv_row(o.out, 0)[0] == "p");
  CHECK(csv_row(o.out, 3)[0] == "1");
}

TEST_CASE("exit codes") {
  CHECK(run_args({"bogus"}).code == 2);
  CHECK(run_args({"bound", "--no-such-flag", "1"}).code == 2);
  CHECK(run_args({"bound", "--noise", "purple"}).code == 2);
  CHECK(run_args({"bound", "--format", "xml"}).code == 2);
  CHECK(run_args({"figure", "fig9"}).code == 2);
  CHECK(run_args({"bound", "--t-grid", "2:1:3"}).code == 2);
  CHECK(run_args({"simulate", "--protocol", "rank1", "--theta", "1", "--dt", "0.5"}).code == 2);
  CHECK(run_args({"--help"}).code == 0);
}

TEST_CASE("determinism across runs and worker counts") {
  const std::vector<std::string> base = {"bound", "--noise", "xy", "--gamma", "0.3", "--p", "0.2",
                                         "--N-grid", "1,2,3", "--t-grid", "0.5,1", "--seed", "7"};
  auto with_jobs = [&](const char* j) {
    auto a = base;
    a.push_back("--jobs");
    a.push_back(j);
    return run_args(a);
  };
  const Outcome a = with_jobs("1"), b = with_jobs("1"), c = with_jobs("3");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(csv_body(a.out) == csv_body(c.out));
}

TEST_CASE("config file with flag overrides") {
  const auto path = std::filesystem::temp_directory_path() / "metrokit_cli_test.conf";
  {
    std::ofstream f(path);
    f << "noise=dephasing\ngamma=2\nformat=json\n";
  }
  const Outcome o = run_args({"alpha", "--config", path.string(), "--gamma", "4"});
  REQUIRE(o.code == 0);
  const auto doc = nlohmann::json::parse(o.out);
  CHECK(doc["meta"]["config"]["noise"] == "dephasing");
  CHECK(doc["rows"][0]["alpha_analytic"].get<double>() == doctest::Approx(1.0 / 32));
  std::filesystem::remove(path);
}

TEST_CASE("environment supplies the default worker count") {
  setenv("FFQC_METROKIT_JOBS", "3", 1);
  CHECK(resolve_jobs(0) == 3);
  CHECK(resolve_jobs(2) == 2);
  setenv("FFQC_METROKIT_JOBS", "junk", 1);
  CHECK(resolve_jobs(0) >= 1);
  unsetenv("FFQC_METROKIT_JOBS");
}

TEST_CASE("worker pool keeps order and propagates errors") {
  const auto sq = parallel_map<long>(50, 4, [](size_t i) { return long(i * i); });
  for (size_t i = 0; i < 50; ++i) CHECK(sq[i] == long(i * i));
  CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                    [](size_t i) -> int {
                                      if (i == 7) throw std::runtime_error("boom");
                                      return 0;
                                    }),
                  std::runtime_error);
}

TEST_CASE("simulate, singleshot and threshold commands") {
  const Outcome s = run_args({"simulate", "--protocol", "xy", "--gamma", "0.05", "--p", "0.25", "--t", "10"});
  REQUIRE(s.code == 0);
  CHECK(std::stod(csv_row(s.out, 1)[4]) == doctest::Approx(100 * std::exp(-0.1875)).epsilon(1e-12));
  const Outcome ss = run_args({"singleshot", "--N", "100", "--format", "json"});
  REQUIRE(ss.code == 0);
  const auto doc = nlohmann::json::parse(ss.out);
  CHECK(doc["rows"][0]["avg_mse"].get<double>() <= 67 * doc["rows"][0]["cost"].get<double>());
  const Outcome th = run_args({"threshold", "--gamma", "0.05", "--omega", "1", "--p", "0.25"});
  REQUIRE(th.code == 0);
  CHECK(csv_row(th.out, 1)[2] == "5");
}

TEST_CASE("figure 5 dataset") {
  RunConfig c;
  c.command = "figure";
  c.target = "fig5";
  apply_figure_defaults(c, [](const std::string&) { return false; });
  const auto tables = execute(c);
  REQUIRE(tables.size() == 1);
  const Table& t = tables[0];
  REQUIRE(t.rows.size() == 201);
  CHECK(std::abs(std::get<double>(t.rows.front()[3])) < 1e-9);
  CHECK(std::abs(std::get<double>(t.rows.back()[3])) < 1e-9);
  for (size_t i = 1; i + 1 < t.rows.size(); ++i) CHECK(std::get<double>(t.rows[i][3]) > 0.0);
}

TEST_CASE("figure 2 dataset") {
  RunConfig c;
  c.command = "figure";
  c.target = "fig2";
  apply_figure_defaults(c, [](const std::string&) { return false; });
  c.t_grid = "0.05:5:6:log";
  const auto tables = execute(c);
  REQUIRE(tables.size() == 1);
  const Table& t = tables[0];
  REQUIRE(t.rows.size() == 6);
  for (const auto& row : t.rows) {
    // The fast-control bound always exceeds the parallel large-N bound.
    CHECK(std::get<double>(row[2]) >= std::get<double>(row[1]));
    CHECK(std::get<double>(row[2]) >= std::get<double>(row[3]));
  }
  // The X-noise parallel bound diverges as t -> 0.
  CHECK(std::get<double>(t.rows[0][5]) > std::get<double>(t.rows[2][5]));
}

TEST_CASE("figure output directory") {
  const auto dir = std::filesystem::temp_directory_path() / "metrokit_fig_test";
  std::filesystem::remove_all(dir);
  const Outcome o = run_args({"figure", "fig5", "--p-grid", "0:1:11", "--out", dir.string()});
  REQUIRE(o.code == 0);
  CHECK(std::filesystem::exists(dir / "fig5.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("installed binary answers --version") {
  const char* exe = std::getenv("FFQC_METROKIT_CLI");
  if (exe == nullptr) return;
  const std::string cmd = std::string(exe) + " --version";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[64] = {0};
  const size_t n = fread(buf, 1, sizeof buf - 1, pipe);
  const int status = pclose(pipe);
  CHECK(status == 0);
  CHECK(std::string(buf, n).find(kVersion) != std::string::npos);
}
