// Copyright 2026 The rsucoal Authors.
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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rsucoal/csv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CommandResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path log = dir / "cli_output.txt";
  const std::string command = std::string(RSUCOAL_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("rsucoal_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

const char* kTwoRsuScenario = R"({
  "positions": [[0.0, 0.0], [1.0, 0.0]],
  "traffic": {"per_rsu": [2, 2]},
  "class_weights": [0.6, 0.5],
  "beta": 1.0, "alpha": 0.0, "delta": 1.0,
  "chunks_per_vehicle": 1.0,
  "initial_partition": "singletons",
  "seed": 5
})";

}  // namespace

TEST_CASE("cli run reproduces the two-RSU example") {
  const fs::path dir = fresh_dir("run");
  write_file(dir / "scenario.json", kTwoRsuScenario);

  const auto result = run_cli("run --config " + (dir / "scenario.json").string() + " --out " + dir.string(), dir);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("seed: 5") != std::string::npos);

  std::ifstream in(dir / "partition.json");
  json partition;
  in >> partition;
  CHECK(partition["partition"].dump() == "[[0,1]]");
  CHECK(partition["converged"].get<bool>());

  std::ifstream cin(dir / "coalitions.json");
  json coalitions;
  cin >> coalitions;
  REQUIRE(coalitions.size() == 1);
  CHECK(coalitions[0]["payoffs"][0].get<double>() == doctest::Approx(2.2).epsilon(1e-9));
  CHECK(coalitions[0]["payoffs"][1].get<double>() == doctest::Approx(2.2).epsilon(1e-9));
  CHECK(coalitions[0]["value"].get<double>() == doctest::Approx(4.4).epsilon(1e-9));

  const rsucoal::CsvTable trace = rsucoal::read_csv(dir / "trace.csv");
  CHECK(trace.header == std::vector<std::string>{"round", "rsu", "from", "to"});
  CHECK(trace.rows.size() == 1);
}

TEST_CASE("cli run with zero meeting fraction stays non-cooperative") {
  const fs::path dir = fresh_dir("run_delta0");
  json doc = json::parse(kTwoRsuScenario);
  doc["delta"] = 0.0;
  doc["alpha"] = 10.0;
  write_file(dir / "scenario.json", doc.dump());

  const auto result = run_cli("run -c " + (dir / "scenario.json").string() + " -o " + dir.string(), dir);
  CHECK(result.exit_code == 0);
  std::ifstream in(dir / "partition.json");
  json partition;
  in >> partition;
  CHECK(partition["partition"].dump() == "[[0],[1]]");
}

TEST_CASE("cli rejects malformed configs with exit code 1") {
  const fs::path dir = fresh_dir("badcfg");
  json doc = json::parse(kTwoRsuScenario);
  doc["class_weights"] = {0.5, 0.6};  // not decreasing
  write_file(dir / "scenario.json", doc.dump());

  const auto result = run_cli("run -c " + (dir / "scenario.json").string() + " -o " + dir.string(), dir);
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("class_weights") != std::string::npos);
}

TEST_CASE("cli verify round-trips a formation result") {
  const fs::path dir = fresh_dir("verify");
  write_file(dir / "scenario.json", kTwoRsuScenario);
  auto run = run_cli("run -c " + (dir / "scenario.json").string() + " -o " + dir.string(), dir);
  REQUIRE(run.exit_code == 0);

  const auto ok = run_cli("verify --partition " + (dir / "partition.json").string() + " --config " +
                              (dir / "scenario.json").string(),
                          dir);
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("nash_stable: true") != std::string::npos);

  // A profitable welcome deviation is flagged with exit code 3.
  write_file(dir / "broken.json", "[[0],[1]]");
  const auto broken = run_cli("verify -p " + (dir / "broken.json").string() + " -c " +
                                  (dir / "scenario.json").string(),
                              dir);
  CHECK(broken.exit_code == 3);
  CHECK(broken.output.find("nash_stable: false") != std::string::npos);

  // A partition that does not cover the RSU set is a config error.
  write_file(dir / "gap.json", "[[0]]");
  const auto gap = run_cli("verify -p " + (dir / "gap.json").string() + " -c " +
                               (dir / "scenario.json").string(),
                           dir);
  CHECK(gap.exit_code == 1);
}

TEST_CASE("cli oracle finds the grand coalition of the example") {
  const fs::path dir = fresh_dir("oracle");
  write_file(dir / "scenario.json", kTwoRsuScenario);
  const auto result = run_cli("oracle -c " + (dir / "scenario.json").string() + " -o " + dir.string(), dir);
  CHECK(result.exit_code == 0);
  std::ifstream in(dir / "optimal.json");
  json doc;
  in >> doc;
  CHECK(doc["partition"].dump() == "[[0,1]]");
  CHECK(doc["total_value"].get<double>() == doctest::Approx(4.4).epsilon(1e-9));
}

TEST_CASE("cli sweep writes the csv table and config sidecar") {
  const fs::path dir = fresh_dir("sweep");
  write_file(dir / "sweep.json", R"({
    "n": 4, "instances": 8, "oracle": true, "threads": 2,
    "sweep": {"param": "n", "values": [2, 3, 4]},
    "seed": 11
  })");

  const auto result = run_cli("sweep -c " + (dir / "sweep.json").string() + " -o " + dir.string() + " --seed 99",
                              dir);
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("seed: 99") != std::string::npos);

  const rsucoal::CsvTable table = rsucoal::read_csv(dir / "sweep.csv");
  CHECK(table.header.size() == 11);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0][0] == "n");
  CHECK(table.rows[0][1] == "2");
  CHECK(table.rows[2][1] == "4");

  std::ifstream sidecar(dir / "sweep_config.json");
  json cfg;
  sidecar >> cfg;
  CHECK(cfg["seed"].get<std::uint64_t>() == 99);
}

TEST_CASE("cli dynamics writes one row per period") {
  const fs::path dir = fresh_dir("dynamics");
  write_file(dir / "dynamics.json", R"({
    "n": 5, "periods": 3, "seed": 21
  })");
  const auto result = run_cli("dynamics -c " + (dir / "dynamics.json").string() + " -o " + dir.string(), dir);
  CHECK(result.exit_code == 0);
  const rsucoal::CsvTable table = rsucoal::read_csv(dir / "dynamics.csv");
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0][0] == "0");
  CHECK(table.rows[2][0] == "2");
}

TEST_CASE("cli run can sample from an experiment config") {
  const fs::path dir = fresh_dir("run_sampled");
  write_file(dir / "experiment.json", R"({
    "n": 5, "seed": 31
  })");
  const auto result = run_cli("run -c " + (dir / "experiment.json").string() + " -o " + dir.string(), dir);
  CHECK(result.exit_code == 0);
  std::ifstream in(dir / "partition.json");
  json partition;
  in >> partition;
  CHECK(partition["n"].get<int>() == 5);
  CHECK(partition["converged"].get<bool>());
}
