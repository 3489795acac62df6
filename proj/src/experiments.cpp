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

#include "rsucoal/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "rsucoal/csv.hpp"

namespace rsucoal {

std::string to_string(InitialPartitionPolicy policy) {
  return policy == InitialPartitionPolicy::kGrand ? "grand" : "singletons";
}

InitialPartitionPolicy initial_partition_policy_from_string(const std::string& name) {
  if (name == "grand") return InitialPartitionPolicy::kGrand;
  if (name == "singletons") return InitialPartitionPolicy::kSingletons;
  throw std::invalid_argument("initial_partition: expected \"grand\" or \"singletons\", got \"" + name + "\"");
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> issues;
  if (!(c.area_km > 0.0)) issues.push_back("area_km: must be positive");
  if (c.n < 1 || c.n > Coalition::kMaxRsus) issues.push_back("n: must lie in [1, 64]");
  if (!(c.delta >= 0.0) || !(c.delta <= 1.0)) issues.push_back("delta: must lie in [0, 1]");
  if (c.instances < 1) issues.push_back("instances: must be at least 1");
  if (c.traffic_low < 1 || c.traffic_low > c.traffic_high)
    issues.push_back("traffic_range: requires 1 <= low <= high");
  if (c.class_weights.empty()) {
    issues.push_back("class_weights: at least one data class is required");
  } else {
    for (std::size_t l = 0; l < c.class_weights.size(); ++l) {
      if (!(c.class_weights[l] > 0.0) || c.class_weights[l] > 1.0)
        issues.push_back("class_weights: entry " + std::to_string(l) + " must lie in (0, 1]");
      if (l > 0 && !(c.class_weights[l] < c.class_weights[l - 1]))
        issues.push_back("class_weights: weights must be strictly decreasing (entry " + std::to_string(l) + ")");
    }
  }
  if (!(c.alpha >= 0.0)) issues.push_back("alpha: must be non-negative");
  if (!(c.beta > 0.0)) issues.push_back("beta: must be positive");
  if (!(c.chunks_per_vehicle > 0.0)) issues.push_back("chunks_per_vehicle: must be positive");
  if (c.max_rounds < 1) issues.push_back("max_rounds: must be at least 1");
  if (c.oracle_max_n < 1 || c.oracle_max_n > kMaxEnumerationRsus)
    issues.push_back("oracle_max_n: must lie in [1, " + std::to_string(kMaxEnumerationRsus) + "]");
  if (c.threads < 0) issues.push_back("threads: must be non-negative");
  for (const double v : c.sweep.values) {
    if (c.sweep.param == SweepSpec::Param::kRsuCount) {
      if (v < 1 || v > Coalition::kMaxRsus || v != std::floor(v))
        issues.push_back("sweep.values: RSU counts must be integers in [1, 64]");
    } else if (!(v >= 0.0) || !(v <= 1.0)) {
      issues.push_back("sweep.values: delta values must lie in [0, 1]");
    }
  }
  if (c.periods < 1) issues.push_back("periods: must be at least 1");
  if (!c.resample.empty() && static_cast<int>(c.resample.size()) != c.periods)
    issues.push_back("resample: must list one flag per period");
  return issues;
}

void require_valid(const ExperimentConfig& config) {
  auto issues = validate(config);
  if (!issues.empty()) throw ScenarioError(issues);
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc) {
  std::vector<std::string> issues;
  ExperimentConfig c;

  auto number = [&](const char* key, double* out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) {
      issues.push_back(std::string(key) + ": must be a number");
      return;
    }
    *out = doc[key].get<double>();
  };
  auto integer = [&](const char* key, int* out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer()) {
      issues.push_back(std::string(key) + ": must be an integer");
      return;
    }
    *out = doc[key].get<int>();
  };

  number("area_km", &c.area_km);
  integer("n", &c.n);
  number("delta", &c.delta);
  integer("instances", &c.instances);
  integer("max_rounds", &c.max_rounds);
  integer("oracle_max_n", &c.oracle_max_n);
  integer("threads", &c.threads);
  integer("periods", &c.periods);
  number("alpha", &c.alpha);
  number("beta", &c.beta);
  number("chunks_per_vehicle", &c.chunks_per_vehicle);

  if (doc.contains("traffic_range")) {
    const auto& r = doc["traffic_range"];
    if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer()) {
      issues.push_back("traffic_range: must be [low, high] integers");
    } else {
      c.traffic_low = r[0].get<int>();
      c.traffic_high = r[1].get<int>();
    }
  }
  if (doc.contains("class_weights")) {
    if (!doc["class_weights"].is_array()) {
      issues.push_back("class_weights: must be an array of numbers");
    } else {
      c.class_weights.clear();
      for (const auto& w : doc["class_weights"]) {
        if (!w.is_number()) {
          issues.push_back("class_weights: must be an array of numbers");
          break;
        }
        c.class_weights.push_back(w.get<double>());
      }
    }
  }
  if (doc.contains("duplicate_class_policy")) {
    try {
      c.duplicate_class_policy =
          duplicate_class_policy_from_string(doc["duplicate_class_policy"].get<std::string>());
    } catch (const std::exception& e) {
      issues.push_back(e.what());
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      issues.push_back("seed: must be an unsigned integer");
    } else {
      c.seed = doc["seed"].get<std::uint64_t>();
    }
  }
  if (doc.contains("initial_partition")) {
    try {
      c.initial_partition = initial_partition_policy_from_string(doc["initial_partition"].get<std::string>());
    } catch (const std::exception& e) {
      issues.push_back(e.what());
    }
  }
  if (doc.contains("switch_rule")) {
    try {
      c.switch_rule = switch_rule_from_string(doc["switch_rule"].get<std::string>());
    } catch (const std::exception& e) {
      issues.push_back(e.what());
    }
  }
  if (doc.contains("oracle")) {
    if (!doc["oracle"].is_boolean()) {
      issues.push_back("oracle: must be a boolean");
    } else {
      c.oracle = doc["oracle"].get<bool>();
    }
  }
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    if (!s.is_object() || !s.contains("param") || !s.contains("values") || !s["values"].is_array()) {
      issues.push_back("sweep: must be {\"param\": \"n\"|\"delta\", \"values\": [...]}");
    } else {
      const std::string param = s["param"].is_string() ? s["param"].get<std::string>() : "";
      if (param == "n") {
        c.sweep.param = SweepSpec::Param::kRsuCount;
      } else if (param == "delta") {
        c.sweep.param = SweepSpec::Param::kDelta;
      } else {
        issues.push_back("sweep.param: expected \"n\" or \"delta\"");
      }
      for (const auto& v : s["values"]) {
        if (!v.is_number()) {
          issues.push_back("sweep.values: must be numbers");
          break;
        }
        c.sweep.values.push_back(v.get<double>());
      }
    }
  }
  if (doc.contains("resample")) {
    if (!doc["resample"].is_array()) {
      issues.push_back("resample: must be an array of booleans");
    } else {
      for (const auto& b : doc["resample"]) {
        if (!b.is_boolean()) {
          issues.push_back("resample: must be an array of booleans");
          break;
        }
        c.resample.push_back(b.get<bool>());
      }
    }
  }

  if (!issues.empty()) throw ScenarioError(issues);
  require_valid(c);
  return c;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& c) {
  nlohmann::json doc;
  doc["area_km"] = c.area_km;
  doc["n"] = c.n;
  doc["delta"] = c.delta;
  doc["instances"] = c.instances;
  doc["traffic_range"] = {c.traffic_low, c.traffic_high};
  doc["class_weights"] = c.class_weights;
  doc["alpha"] = c.alpha;
  doc["beta"] = c.beta;
  doc["chunks_per_vehicle"] = c.chunks_per_vehicle;
  doc["duplicate_class_policy"] = to_string(c.duplicate_class_policy);
  doc["seed"] = c.seed;
  doc["initial_partition"] = to_string(c.initial_partition);
  doc["switch_rule"] = to_string(c.switch_rule);
  doc["max_rounds"] = c.max_rounds;
  doc["oracle"] = c.oracle;
  doc["oracle_max_n"] = c.oracle_max_n;
  doc["threads"] = c.threads;
  if (!c.sweep.values.empty()) {
    doc["sweep"]["param"] = c.sweep.param == SweepSpec::Param::kRsuCount ? "n" : "delta";
    doc["sweep"]["values"] = c.sweep.values;
  }
  doc["periods"] = c.periods;
  if (!c.resample.empty()) doc["resample"] = c.resample;
  return doc;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("cannot parse config file " + path.string() + ": " + e.what());
  }
  return experiment_config_from_json(doc);
}

Scenario sample_scenario(const ExperimentConfig& config, Rng& rng) {
  Scenario s;
  s.positions.reserve(static_cast<std::size_t>(config.n));
  for (int i = 0; i < config.n; ++i) {
    const double x = config.area_km * rng.next_unit();
    const double y = config.area_km * rng.next_unit();
    s.positions.push_back({x, y});
  }
  s.traffic.assign(static_cast<std::size_t>(config.n), std::vector<double>(static_cast<std::size_t>(config.n), 0.0));
  for (int i = 0; i < config.n; ++i) {
    const int k = rng.next_int(config.traffic_low, config.traffic_high);
    for (int j = 0; j < config.n; ++j)
      if (j != i) s.traffic[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = k;
  }
  s.class_weights = config.class_weights;
  s.alpha = config.alpha;
  s.beta = config.beta;
  s.delta = config.delta;
  s.chunks_per_vehicle = config.chunks_per_vehicle;
  s.duplicate_class_policy = config.duplicate_class_policy;
  return s;
}

namespace {

struct InstanceOutcome {
  double coop_per_rsu = 0.0;
  double noncoop_per_rsu = 0.0;
  std::optional<double> opt_per_rsu;
  double mean_size = 0.0;
  double max_size = 0.0;
  double switches = 0.0;
};

Partition initial_partition_for(const ExperimentConfig& config) {
  return config.initial_partition == InitialPartitionPolicy::kGrand ? Partition::grand(config.n)
                                                                    : Partition::singletons(config.n);
}

InstanceOutcome run_instance(const ExperimentConfig& point, int point_index, int instance_index,
                             const InstanceObserver& observer) {
  const std::uint64_t seed = derive_seed(point.seed, static_cast<std::uint64_t>(instance_index));
  Rng rng(seed);
  const Scenario scenario = sample_scenario(point, rng);
  const GameModel model(scenario);
  EvalCache cache(model);

  const std::uint64_t formation_seed = rng.next_u64();
  FormationResult result =
      run_formation(cache, initial_partition_for(point), formation_seed, point.max_rounds, point.switch_rule);
  if (!result.trace.converged)
    throw NonConvergenceError("formation did not converge within " + std::to_string(point.max_rounds) +
                               " rounds (instance " + std::to_string(instance_index) + ", seed " +
                               std::to_string(seed) + ")");

  InstanceOutcome out;
  const int n = model.size();
  double coop_total = 0.0;
  int max_size = 0;
  for (const Coalition block : result.partition.canonical_coalitions()) {
    coop_total += cache.value(block);
    max_size = std::max(max_size, block.size());
  }
  out.coop_per_rsu = coop_total / n;
  out.noncoop_per_rsu = model.noncoop_total() / n;
  out.mean_size = static_cast<double>(n) / result.partition.size();
  out.max_size = max_size;
  out.switches = result.trace.total_switches();

  std::optional<OptimalPartitionResult> optimal;
  if (point.oracle && n <= point.oracle_max_n) {
    optimal = optimal_partition(cache);
    out.opt_per_rsu = optimal->total_value / n;
  }

  if (observer) observer({point_index, instance_index, seed, point, model, cache, result, optimal});
  return out;
}

SweepPointMetrics aggregate(const ExperimentConfig& point, const std::vector<InstanceOutcome>& outcomes) {
  SweepPointMetrics m;
  m.param = point.sweep.param == SweepSpec::Param::kRsuCount ? "n" : "delta";
  m.value = point.sweep.param == SweepSpec::Param::kRsuCount ? point.n : point.delta;
  m.instances = static_cast<int>(outcomes.size());

  double coop = 0.0, noncoop = 0.0, opt = 0.0, size = 0.0, max_size = 0.0, switches = 0.0;
  bool have_opt = !outcomes.empty();
  for (const auto& o : outcomes) {
    coop += o.coop_per_rsu;
    noncoop += o.noncoop_per_rsu;
    size += o.mean_size;
    max_size += o.max_size;
    switches += o.switches;
    if (o.opt_per_rsu.has_value()) {
      opt += *o.opt_per_rsu;
    } else {
      have_opt = false;
    }
  }
  const double count = static_cast<double>(outcomes.size());
  m.coop_mean = coop / count;
  m.noncoop_mean = noncoop / count;
  m.avg_size = size / count;
  m.avg_max_size = max_size / count;
  m.avg_switches = switches / count;
  m.improvement_pct = m.noncoop_mean != 0.0 ? 100.0 * (m.coop_mean - m.noncoop_mean) / m.noncoop_mean : 0.0;
  if (have_opt) {
    m.opt_mean = opt / count;
    m.gap_pct = *m.opt_mean != 0.0 ? 100.0 * (*m.opt_mean - m.coop_mean) / *m.opt_mean : 0.0;
  }
  return m;
}

}  // namespace

std::vector<SweepPointMetrics> run_sweep(const ExperimentConfig& config, const InstanceObserver& observer) {
  require_valid(config);

  std::vector<ExperimentConfig> points;
  if (config.sweep.values.empty()) {
    points.push_back(config);
  } else {
    for (const double v : config.sweep.values) {
      ExperimentConfig point = config;
      if (config.sweep.param == SweepSpec::Param::kRsuCount) {
        point.n = static_cast<int>(v);
      } else {
        point.delta = v;
      }
      points.push_back(std::move(point));
    }
  }

  std::vector<SweepPointMetrics> metrics;
  metrics.reserve(points.size());

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const int workers = config.threads > 0 ? config.threads : static_cast<int>(hardware);

  for (std::size_t p = 0; p < points.size(); ++p) {
    const ExperimentConfig& point = points[p];
    std::vector<InstanceOutcome> outcomes(static_cast<std::size_t>(point.instances));

    if (workers <= 1 || point.instances == 1) {
      for (int k = 0; k < point.instances; ++k)
        outcomes[static_cast<std::size_t>(k)] = run_instance(point, static_cast<int>(p), k, observer);
    } else {
      std::atomic<int> next{0};
      std::mutex error_mutex;
      std::exception_ptr error;
      auto work = [&]() {
        try {
          for (int k = next.fetch_add(1); k < point.instances; k = next.fetch_add(1))
            outcomes[static_cast<std::size_t>(k)] = run_instance(point, static_cast<int>(p), k, observer);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      };
      std::vector<std::thread> pool;
      const int spawn = std::min(workers, point.instances);
      pool.reserve(static_cast<std::size_t>(spawn));
      for (int t = 0; t < spawn; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
    }

    metrics.push_back(aggregate(point, outcomes));
  }
  return metrics;
}

std::vector<PeriodResult> run_dynamics(const ExperimentConfig& config) {
  require_valid(config);

  Rng rng(config.seed);
  Scenario scenario = sample_scenario(config, rng);
  Partition partition = initial_partition_for(config);

  std::vector<PeriodResult> series;
  series.reserve(static_cast<std::size_t>(config.periods));
  for (int period = 0; period < config.periods; ++period) {
    const bool resampled =
        period > 0 && (config.resample.empty() || config.resample[static_cast<std::size_t>(period)]);
    if (resampled) {
      for (int i = 0; i < config.n; ++i) {
        const int k = rng.next_int(config.traffic_low, config.traffic_high);
        for (int j = 0; j < config.n; ++j)
          if (j != i) scenario.traffic[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = k;
      }
    }

    const GameModel model(scenario);
    EvalCache cache(model);
    const std::uint64_t formation_seed = rng.next_u64();
    FormationResult result = run_formation(cache, partition, formation_seed, config.max_rounds, config.switch_rule);
    if (!result.trace.converged)
      throw NonConvergenceError("dynamics period " + std::to_string(period) + " did not converge within " +
                                 std::to_string(config.max_rounds) + " rounds (seed " +
                                 std::to_string(formation_seed) + ")");

    partition = result.partition;
    series.push_back({period, scenario, result.partition, result.trace.total_switches(), resampled});
  }
  return series;
}

namespace {

std::string format_double(double v) {
  std::ostringstream oss;
  oss << std::setprecision(12) << v;
  return oss.str();
}

}  // namespace

void write_sweep_csv(std::ostream& out, const std::vector<SweepPointMetrics>& points) {
  write_csv_row(out, {"param", "value", "coop_mean", "noncoop_mean", "opt_mean", "improvement_pct", "gap_pct",
                      "avg_size", "avg_max_size", "avg_switches", "instances"});
  for (const auto& m : points) {
    write_csv_row(out, {m.param, format_double(m.value), format_double(m.coop_mean), format_double(m.noncoop_mean),
                        m.opt_mean ? format_double(*m.opt_mean) : "", format_double(m.improvement_pct),
                        m.gap_pct ? format_double(*m.gap_pct) : "", format_double(m.avg_size),
                        format_double(m.avg_max_size), format_double(m.avg_switches), std::to_string(m.instances)});
  }
}

void write_dynamics_csv(std::ostream& out, const std::vector<PeriodResult>& periods) {
  write_csv_row(out, {"period", "switches", "partition"});
  for (const auto& p : periods)
    write_csv_row(out, {std::to_string(p.period), std::to_string(p.switches), p.partition.to_text()});
}

}  // namespace rsucoal
