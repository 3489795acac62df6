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

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rsucoal/csv.hpp"
#include "rsucoal/experiments.hpp"

using namespace rsucoal;

TEST_CASE("sampled scenarios respect the configured ranges") {
  ExperimentConfig cfg;
  cfg.n = 8;
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const Scenario s = sample_scenario(cfg, rng);
    CHECK(validate(s).empty());
    for (const auto& p : s.positions) {
      CHECK(p[0] >= 0.0);
      CHECK(p[0] <= 3.0);
      CHECK(p[1] >= 0.0);
      CHECK(p[1] <= 3.0);
    }
    for (int i = 0; i < cfg.n; ++i) {
      const double k = s.traffic[i][(i + 1) % cfg.n];
      CHECK(k >= 1.0);
      CHECK(k <= 25.0);
      CHECK(k == std::floor(k));
      for (int j = 0; j < cfg.n; ++j) {
        if (j == i) {
          CHECK(s.traffic[i][j] == 0.0);
        } else {
          CHECK(s.traffic[i][j] == k);  // replicated across directions
        }
      }
    }
  }
}

TEST_CASE("sampling is bit-reproducible for a fixed seed") {
  ExperimentConfig cfg;
  cfg.n = 6;
  Rng a(777);
  Rng b(777);
  const Scenario sa = sample_scenario(cfg, a);
  const Scenario sb = sample_scenario(cfg, b);
  CHECK(sa.positions == sb.positions);
  CHECK(sa.traffic == sb.traffic);
}

TEST_CASE("sampled traffic has the uniform-integer mean") {
  ExperimentConfig cfg;
  cfg.n = 2;
  Rng rng(2024);
  double sum = 0.0;
  const int draws = 10000;
  for (int rep = 0; rep < draws / 2; ++rep) {
    const Scenario s = sample_scenario(cfg, rng);
    sum += s.traffic[0][1] + s.traffic[1][0];
  }
  const double mean = sum / draws;
  CHECK(mean > 12.5);
  CHECK(mean < 13.5);
}

TEST_CASE("experiment config json round-trips and validates") {
  ExperimentConfig cfg;
  cfg.sweep.param = SweepSpec::Param::kDelta;
  cfg.sweep.values = {0.0, 0.5, 1.0};
  cfg.instances = 7;
  cfg.oracle = true;
  cfg.switch_rule = SwitchRule::kBestPayoff;
  cfg.initial_partition = InitialPartitionPolicy::kGrand;
  cfg.resample = {false, true, false, true, true};

  const auto doc = experiment_config_to_json(cfg);
  const ExperimentConfig back = experiment_config_from_json(doc);
  CHECK(back.sweep.values == cfg.sweep.values);
  CHECK(back.instances == 7);
  CHECK(back.oracle);
  CHECK(back.switch_rule == SwitchRule::kBestPayoff);
  CHECK(back.initial_partition == InitialPartitionPolicy::kGrand);
  CHECK(back.resample == cfg.resample);

  ExperimentConfig bad = cfg;
  bad.instances = 0;
  auto issues = validate(bad);
  REQUIRE(!issues.empty());
  CHECK(issues[0].find("instances") != std::string::npos);

  bad = cfg;
  bad.traffic_low = 0;
  issues = validate(bad);
  REQUIRE(!issues.empty());
  CHECK(issues[0].find("traffic_range") != std::string::npos);

  bad = cfg;
  bad.resample = {true};
  issues = validate(bad);
  REQUIRE(!issues.empty());
  CHECK(issues[0].find("resample") != std::string::npos);

  nlohmann::json junk = experiment_config_to_json(cfg);
  junk["switch_rule"] = "greedy";
  CHECK_THROWS_AS(experiment_config_from_json(junk), ScenarioError);
}

TEST_CASE("sweep metrics do not depend on the worker count") {
  ExperimentConfig cfg;
  cfg.n = 5;
  cfg.instances = 24;
  cfg.oracle = true;
  cfg.sweep.param = SweepSpec::Param::kRsuCount;
  cfg.sweep.values = {3, 5};

  cfg.threads = 1;
  const auto serial = run_sweep(cfg);
  cfg.threads = 2;
  const auto parallel = run_sweep(cfg);

  REQUIRE(serial.size() == parallel.size());
  for (std::size_t p = 0; p < serial.size(); ++p) {
    CHECK(serial[p].coop_mean == parallel[p].coop_mean);
    CHECK(serial[p].noncoop_mean == parallel[p].noncoop_mean);
    CHECK(serial[p].avg_switches == parallel[p].avg_switches);
    REQUIRE(serial[p].opt_mean.has_value());
    REQUIRE(parallel[p].opt_mean.has_value());
    CHECK(*serial[p].opt_mean == *parallel[p].opt_mean);
  }
}

TEST_CASE("a zero meeting fraction reduces to the non-cooperative scheme") {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.delta = 0.0;
  cfg.instances = 40;
  cfg.threads = 2;

  std::atomic<int> singleton_finals{0};
  const auto metrics = run_sweep(cfg, [&](const InstanceContext& ctx) {
    if (ctx.result.partition == Partition::singletons(ctx.model.size())) singleton_finals.fetch_add(1);
  });
  REQUIRE(metrics.size() == 1);
  CHECK(metrics[0].improvement_pct == 0.0);
  CHECK(metrics[0].coop_mean == metrics[0].noncoop_mean);
  CHECK(metrics[0].avg_size == 1.0);
  CHECK(singleton_finals.load() == 40);
}

TEST_CASE("per-instance outcomes satisfy rationality and the oracle sandwich") {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.instances = 30;
  cfg.oracle = true;
  cfg.threads = 2;

  std::mutex mu;
  std::vector<std::string> failures;
  const auto metrics = run_sweep(cfg, [&](const InstanceContext& ctx) {
    double coop = 0.0;
    for (const Coalition block : ctx.result.partition.coalitions()) coop += ctx.cache.value(block);
    const double noncoop = ctx.model.noncoop_total();
    const std::lock_guard<std::mutex> lock(mu);
    if (!(coop >= noncoop - 1e-9)) failures.push_back("coop below noncoop");
    for (RsuId i = 0; i < ctx.model.size(); ++i) {
      const double payoff = ctx.cache.evaluate(ctx.result.partition.coalition_of(i)).payoff_of(i);
      if (!(payoff >= ctx.model.noncoop(i) - 1e-9)) failures.push_back("payoff below standalone");
    }
    if (ctx.optimal.has_value() && !(ctx.optimal->total_value >= coop - 1e-9))
      failures.push_back("optimal below formation");
  });
  CHECK(failures.empty());
  REQUIRE(metrics.size() == 1);
  REQUIRE(metrics[0].opt_mean.has_value());
  CHECK(metrics[0].noncoop_mean <= metrics[0].coop_mean + 1e-9);
  CHECK(metrics[0].coop_mean <= *metrics[0].opt_mean + 1e-9);
  CHECK(metrics[0].gap_pct.has_value());
}

TEST_CASE("a run exceeding the round budget aborts the sweep with its seed") {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.instances = 5;
  cfg.max_rounds = 1;  // any instance that needs a switch cannot also certify quiet
  cfg.threads = 1;
  try {
    run_sweep(cfg);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(std::string(e.what()).find("seed") != std::string::npos);
  }
}

TEST_CASE("dynamics resample schedule and accounting") {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.periods = 5;
  cfg.resample = {false, true, false, true, false};
  cfg.seed = 99;

  const auto series = run_dynamics(cfg);
  REQUIRE(series.size() == 5);
  int cumulative = 0;
  for (const auto& p : series) {
    CHECK(validate(p.scenario).empty());
    cumulative += p.switches;
  }
  CHECK(cumulative >= series[0].switches);

  // Periods whose traffic is unchanged start from a partition that is
  // already stable, so nothing moves.
  CHECK(!series[2].resampled);
  CHECK(series[2].switches == 0);
  CHECK(!series[4].resampled);
  CHECK(series[4].switches == 0);
  CHECK(series[2].partition == series[1].partition);

  // Every period's partition is stable for its own scenario.
  for (const auto& p : series) {
    GameModel model(p.scenario);
    EvalCache cache(model);
    CHECK(is_nash_stable(p.partition, cache).stable);
  }
}

TEST_CASE("dynamics with static traffic settles after the first period") {
  ExperimentConfig cfg;
  cfg.n = 5;
  cfg.periods = 4;
  cfg.resample = {false, false, false, false};
  const auto series = run_dynamics(cfg);
  REQUIRE(series.size() == 4);
  for (std::size_t p = 1; p < series.size(); ++p) {
    CHECK(series[p].switches == 0);
    CHECK(series[p].partition == series[0].partition);
  }
}

TEST_CASE("sweep csv round-trips through the strict reader") {
  ExperimentConfig cfg;
  cfg.n = 4;
  cfg.instances = 10;
  cfg.oracle = true;
  cfg.sweep.param = SweepSpec::Param::kDelta;
  cfg.sweep.values = {0.0, 0.8};
  const auto metrics = run_sweep(cfg);

  std::ostringstream out;
  write_sweep_csv(out, metrics);
  const CsvTable table = parse_csv(out.str());
  CHECK(table.header.size() == 11);
  CHECK(table.header[0] == "param");
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0][0] == "delta");
  CHECK(table.rows[0][5] == "0");  // improvement at delta = 0
  CHECK(!table.rows[1][4].empty());  // opt_mean column filled when the oracle runs
}

TEST_CASE("dynamics csv quotes the partition field") {
  ExperimentConfig cfg;
  cfg.n = 4;
  cfg.periods = 2;
  const auto series = run_dynamics(cfg);
  std::ostringstream out;
  write_dynamics_csv(out, series);
  const CsvTable table = parse_csv(out.str());
  REQUIRE(table.rows.size() == 2);
  CHECK(table.header == std::vector<std::string>{"period", "switches", "partition"});
  CHECK(table.rows[0][2].front() == '[');
  CHECK_NOTHROW(Partition::from_text(table.rows[0][2], cfg.n));
}

TEST_CASE("csv escaping survives hostile fields") {
  std::ostringstream out;
  write_csv_row(out, {"a", "with,comma", "with\"quote", "with\nnewline", ""});
  write_csv_row(out, {"1", "2", "3", "4", "5"});
  const CsvTable table = parse_csv(out.str());
  CHECK(table.header ==
        std::vector<std::string>{"a", "with,comma", "with\"quote", "with\nnewline", ""});
  CHECK(table.rows[0][4] == "5");

  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), std::runtime_error);
}
