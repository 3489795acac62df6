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

#ifndef RSUCOAL_EXPERIMENTS_HPP
#define RSUCOAL_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rsucoal/formation.hpp"
#include "rsucoal/model.hpp"
#include "rsucoal/oracle.hpp"
#include "rsucoal/rng.hpp"
#include "rsucoal/scenario.hpp"

namespace rsucoal {

struct SweepSpec {
  enum class Param { kRsuCount, kDelta };
  Param param = Param::kRsuCount;
  std::vector<double> values;  // empty = single point at the config's n/delta
};

enum class InitialPartitionPolicy { kGrand, kSingletons };

std::string to_string(InitialPartitionPolicy policy);
InitialPartitionPolicy initial_partition_policy_from_string(const std::string& name);

// Monte-Carlo setup: square deployment area, uniform integer traffic,
// and the game parameters shared by every sampled scenario.
struct ExperimentConfig {
  double area_km = 3.0;
  int n = 10;
  double delta = 0.8;
  int instances = 1000;
  int traffic_low = 1;
  int traffic_high = 25;
  std::vector<double> class_weights = {0.9, 0.8, 0.7};
  double alpha = 10.0;
  double beta = 1.0;
  double chunks_per_vehicle = 10.0;
  DuplicateClassPolicy duplicate_class_policy = DuplicateClassPolicy::kDiscount;
  std::uint64_t seed = 12345;
  InitialPartitionPolicy initial_partition = InitialPartitionPolicy::kSingletons;
  SwitchRule switch_rule = SwitchRule::kFirstImproving;
  int max_rounds = kDefaultMaxRounds;
  bool oracle = false;
  int oracle_max_n = 10;  // optimal column omitted beyond this size
  int threads = 0;        // 0 = hardware concurrency
  SweepSpec sweep;

  // Dynamics runs only: number of periods and which periods redraw the
  // traffic (entry 0 is ignored; empty = redraw every later period).
  int periods = 5;
  std::vector<bool> resample;
};

std::vector<std::string> validate(const ExperimentConfig& config);
void require_valid(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Draws one scenario: positions uniform over the square, per-RSU
// integer traffic K_i uniform in [traffic_low, traffic_high] replicated
// across all outgoing directions.
Scenario sample_scenario(const ExperimentConfig& config, Rng& rng);

struct SweepPointMetrics {
  std::string param;
  double value = 0.0;
  double coop_mean = 0.0;
  double noncoop_mean = 0.0;
  std::optional<double> opt_mean;
  double improvement_pct = 0.0;
  std::optional<double> gap_pct;
  double avg_size = 0.0;
  double avg_max_size = 0.0;
  double avg_switches = 0.0;
  int instances = 0;
};

// Everything one finished instance exposes to an observer. References
// stay valid only for the duration of the callback.
struct InstanceContext {
  int point_index;
  int instance_index;
  std::uint64_t seed;
  const ExperimentConfig& point_config;
  const GameModel& model;
  EvalCache& cache;
  const FormationResult& result;
  const std::optional<OptimalPartitionResult>& optimal;
};

// Observers run on worker threads; they must be thread-safe.
using InstanceObserver = std::function<void(const InstanceContext&)>;

// Runs `instances` independent scenario->formation(->oracle) evaluations
// per sweep point and aggregates them. Instance seeds derive from the
// root seed and the instance index alone, so results do not depend on
// the worker count and sweep points share common random scenarios.
// A non-converged run aborts with the offending seed in the message.
std::vector<SweepPointMetrics> run_sweep(const ExperimentConfig& config,
                                         const InstanceObserver& observer = {});

struct PeriodResult {
  int period = 0;
  Scenario scenario;
  Partition partition;
  int switches = 0;
  bool resampled = false;
};

// Periodic re-formation under time-varying traffic: each period after
// the first optionally redraws every K_i, resets all histories and
// reruns formation warm-started from the previous final partition.
std::vector<PeriodResult> run_dynamics(const ExperimentConfig& config);

void write_sweep_csv(std::ostream& out, const std::vector<SweepPointMetrics>& points);
void write_dynamics_csv(std::ostream& out, const std::vector<PeriodResult>& periods);

}  // namespace rsucoal

#endif  // RSUCOAL_EXPERIMENTS_HPP
