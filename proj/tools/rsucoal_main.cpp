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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rsucoal/csv.hpp"
#include "rsucoal/experiments.hpp"
#include "rsucoal/formation.hpp"
#include "rsucoal/model.hpp"
#include "rsucoal/oracle.hpp"
#include "rsucoal/partition.hpp"
#include "rsucoal/scenario.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitUnstable = 3;

json load_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("cannot parse " + path.string() + ": " + e.what());
  }
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
}

std::string join_members(rsucoal::Coalition c, char sep) {
  std::string out;
  for (const rsucoal::RsuId i : c.members()) {
    if (!out.empty()) out += sep;
    out += std::to_string(i);
  }
  return out;
}

json coalition_report(rsucoal::EvalCache& cache, const rsucoal::Partition& partition) {
  json report = json::array();
  for (const rsucoal::Coalition block : partition.canonical_coalitions()) {
    const auto& eval = cache.evaluate(block);
    json entry;
    entry["members"] = block.members();
    json classes = json::array();
    for (const auto c : eval.assignment.classes) classes.push_back(static_cast<int>(c) + 1);
    entry["classes"] = classes;
    entry["revenue"] = eval.revenue;
    entry["cost"] = eval.cost;
    entry["value"] = eval.value;
    entry["payoffs"] = eval.payoffs;
    report.push_back(std::move(entry));
  }
  return report;
}

void write_trace_csv(const fs::path& path, const rsucoal::RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  rsucoal::write_csv_row(out, {"round", "rsu", "from", "to"});
  for (const auto& e : trace.events)
    rsucoal::write_csv_row(out, {std::to_string(e.round), std::to_string(e.rsu), join_members(e.from, '|'),
                                 join_members(e.to, '|')});
}

struct RunSettings {
  rsucoal::Scenario scenario;
  rsucoal::Partition initial;
  std::uint64_t seed = 12345;
  int max_rounds = rsucoal::kDefaultMaxRounds;
  rsucoal::SwitchRule switch_rule = rsucoal::SwitchRule::kBestPayoff;
};

// A run config is either a scenario document (key "positions") with
// optional "seed" / "initial_partition" / "max_rounds", or an
// experiment config from which one scenario is sampled.
RunSettings resolve_run_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  RunSettings settings;
  if (doc.contains("positions")) {
    settings.scenario = rsucoal::scenario_from_json(doc);
    if (doc.contains("seed")) settings.seed = doc["seed"].get<std::uint64_t>();
    if (seed_override) settings.seed = *seed_override;
    if (doc.contains("max_rounds")) settings.max_rounds = doc["max_rounds"].get<int>();
    if (doc.contains("switch_rule"))
      settings.switch_rule = rsucoal::switch_rule_from_string(doc["switch_rule"].get<std::string>());
    const int n = settings.scenario.size();
    settings.initial = rsucoal::Partition::grand(n);
    if (doc.contains("initial_partition")) {
      const auto& init = doc["initial_partition"];
      if (init.is_string()) {
        settings.initial = rsucoal::initial_partition_policy_from_string(init.get<std::string>()) ==
                                   rsucoal::InitialPartitionPolicy::kGrand
                               ? rsucoal::Partition::grand(n)
                               : rsucoal::Partition::singletons(n);
      } else {
        settings.initial = rsucoal::Partition::from_text(init.dump(), n);
      }
    }
    return settings;
  }

  rsucoal::ExperimentConfig config = rsucoal::experiment_config_from_json(doc);
  if (seed_override) config.seed = *seed_override;
  settings.seed = rsucoal::derive_seed(config.seed, 0);
  rsucoal::Rng rng(settings.seed);
  settings.scenario = rsucoal::sample_scenario(config, rng);
  settings.max_rounds = config.max_rounds;
  settings.switch_rule = config.switch_rule;
  settings.initial = config.initial_partition == rsucoal::InitialPartitionPolicy::kGrand
                         ? rsucoal::Partition::grand(config.n)
                         : rsucoal::Partition::singletons(config.n);
  return settings;
}

int cmd_run(const fs::path& config_path, std::optional<std::uint64_t> seed, const fs::path& out_dir, bool quiet) {
  const RunSettings settings = resolve_run_config(load_json(config_path), seed);
  if (!quiet) std::cout << "seed: " << settings.seed << "\n";

  rsucoal::GameModel model(settings.scenario);
  rsucoal::EvalCache cache(model);
  const rsucoal::FormationResult result =
      rsucoal::run_formation(cache, settings.initial, settings.seed, settings.max_rounds, settings.switch_rule);

  fs::create_directories(out_dir);
  const int n = model.size();
  double total_value = 0.0;
  for (const rsucoal::Coalition block : result.partition.canonical_coalitions())
    total_value += cache.value(block);

  json summary;
  summary["n"] = n;
  summary["partition"] = json::parse(result.partition.to_text());
  summary["converged"] = result.trace.converged;
  summary["rounds"] = result.trace.rounds;
  summary["switches"] = result.trace.total_switches();
  summary["seed"] = settings.seed;
  summary["total_value"] = total_value;
  summary["noncoop_total"] = model.noncoop_total();
  write_text(out_dir / "partition.json", summary.dump(2) + "\n");
  write_text(out_dir / "coalitions.json", coalition_report(cache, result.partition).dump(2) + "\n");
  write_trace_csv(out_dir / "trace.csv", result.trace);

  if (!quiet) {
    std::cout << "partition: " << result.partition.to_text() << "\n";
    std::cout << "switches: " << result.trace.total_switches() << " in " << result.trace.rounds << " rounds\n";
    for (const rsucoal::Coalition block : result.partition.canonical_coalitions()) {
      const auto& eval = cache.evaluate(block);
      std::cout << "  " << rsucoal::to_string(block) << " value " << eval.value << " payoffs [";
      for (std::size_t k = 0; k < eval.payoffs.size(); ++k)
        std::cout << (k ? ", " : "") << eval.payoffs[k];
      std::cout << "]\n";
    }
    if (model.noncoop_total() > 0.0)
      std::cout << "improvement: " << 100.0 * (total_value - model.noncoop_total()) / model.noncoop_total()
                << "% over non-cooperative\n";
  }
  return result.trace.converged ? kExitOk : kExitNonConvergence;
}

int cmd_sweep(const fs::path& config_path, std::optional<std::uint64_t> seed, const fs::path& out_dir, bool quiet) {
  rsucoal::ExperimentConfig config = rsucoal::load_experiment_config(config_path);
  if (seed) config.seed = *seed;
  if (!quiet) std::cout << "seed: " << config.seed << "\n";

  const auto metrics = rsucoal::run_sweep(config);

  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "sweep.csv");
  rsucoal::write_sweep_csv(out, metrics);
  json sidecar = rsucoal::experiment_config_to_json(config);
  write_text(out_dir / "sweep_config.json", sidecar.dump(2) + "\n");

  if (!quiet) {
    for (const auto& m : metrics)
      std::cout << m.param << "=" << m.value << ": coop " << m.coop_mean << ", noncoop " << m.noncoop_mean
                << ", improvement " << m.improvement_pct << "%\n";
    std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
  }
  return kExitOk;
}

int cmd_dynamics(const fs::path& config_path, std::optional<std::uint64_t> seed, const fs::path& out_dir,
                 bool quiet) {
  rsucoal::ExperimentConfig config = rsucoal::load_experiment_config(config_path);
  if (seed) config.seed = *seed;
  if (!quiet) std::cout << "seed: " << config.seed << "\n";

  const auto series = rsucoal::run_dynamics(config);

  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "dynamics.csv");
  rsucoal::write_dynamics_csv(out, series);
  write_text(out_dir / "dynamics_config.json", rsucoal::experiment_config_to_json(config).dump(2) + "\n");

  if (!quiet) {
    for (const auto& p : series)
      std::cout << "period " << p.period << ": " << p.switches << " switches, partition "
                << p.partition.to_text() << "\n";
    std::cout << "wrote " << (out_dir / "dynamics.csv").string() << "\n";
  }
  return kExitOk;
}

int cmd_verify(const fs::path& partition_path, const fs::path& scenario_path, bool quiet) {
  const rsucoal::Scenario scenario = rsucoal::load_scenario(scenario_path);
  json doc = load_json(partition_path);
  if (doc.is_object() && doc.contains("partition")) doc = doc["partition"];
  const rsucoal::Partition partition = rsucoal::Partition::from_text(doc.dump(), scenario.size());

  rsucoal::GameModel model(scenario);
  rsucoal::EvalCache cache(model);
  const auto nash = rsucoal::is_nash_stable(partition, cache);
  const auto individual = rsucoal::is_individually_stable(partition, cache);

  if (!quiet) {
    std::cout << "nash_stable: " << (nash.stable ? "true" : "false") << "\n";
    std::cout << "individually_stable: " << (individual.stable ? "true" : "false") << "\n";
    for (const auto& [rsu, target] : nash.violations)
      std::cout << "  rsu " << rsu << " prefers "
                << (target.empty() ? std::string("acting alone") : "joining " + rsucoal::to_string(target)) << "\n";
  }
  return nash.stable ? kExitOk : kExitUnstable;
}

int cmd_oracle(const fs::path& scenario_path, const fs::path& out_dir, bool quiet) {
  const rsucoal::Scenario scenario = rsucoal::load_scenario(scenario_path);
  rsucoal::GameModel model(scenario);
  rsucoal::EvalCache cache(model);
  const auto result = rsucoal::optimal_partition(cache);

  fs::create_directories(out_dir);
  json doc;
  doc["n"] = scenario.size();
  doc["partition"] = json::parse(result.partition.to_text());
  doc["total_value"] = result.total_value;
  write_text(out_dir / "optimal.json", doc.dump(2) + "\n");

  if (!quiet) {
    std::cout << "optimal partition: " << result.partition.to_text() << "\n";
    std::cout << "total value: " << result.total_value << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coalition formation among roadside units: single runs, Monte-Carlo sweeps,\n"
               "traffic dynamics and stability verification."};
  app.require_subcommand(1);

  std::string config_path;
  std::string partition_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_flag("--quiet,-q", quiet, "suppress informational output");

  auto add_common = [&](CLI::App* cmd, bool with_seed) {
    cmd->add_option("--config,-c", config_path, "JSON config file")->required();
    cmd->add_option("--out,-o", out_dir, "output directory (default: .)");
    if (with_seed) cmd->add_option("--seed,-s", seed, "override the config's root seed");
  };

  CLI::App* run = app.add_subcommand("run", "run coalition formation on one scenario");
  add_common(run, true);
  CLI::App* sweep = app.add_subcommand("sweep", "run a Monte-Carlo parameter sweep");
  add_common(sweep, true);
  CLI::App* dynamics = app.add_subcommand("dynamics", "run periodic re-formation under varying traffic");
  add_common(dynamics, true);
  CLI::App* verify = app.add_subcommand("verify", "check a partition for stability");
  verify->add_option("--partition,-p", partition_path, "partition JSON file")->required();
  verify->add_option("--config,-c", config_path, "scenario JSON file")->required();
  CLI::App* oracle = app.add_subcommand("oracle", "exhaustive optimal partition for one scenario");
  add_common(oracle, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, seed, out_dir, quiet);
    if (sweep->parsed()) return cmd_sweep(config_path, seed, out_dir, quiet);
    if (dynamics->parsed()) return cmd_dynamics(config_path, seed, out_dir, quiet);
    if (verify->parsed()) return cmd_verify(partition_path, config_path, quiet);
    if (oracle->parsed()) return cmd_oracle(config_path, out_dir, quiet);
  } catch (const rsucoal::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
