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

#include "rsucoal/formation.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

#include "rsucoal/rng.hpp"

namespace rsucoal {

void History::record_departure(RsuId i, Coalition left) {
  if (!left.contains(i)) throw std::invalid_argument("history: departed coalition must contain the RSU");
  if (static_cast<std::size_t>(i) >= visited_.size())
    throw std::logic_error("history: not sized for RSU " + std::to_string(i));
  if (left.size() < 2) return;
  visited_[static_cast<std::size_t>(i)].insert(left.mask());
}

bool History::blocked(RsuId i, Coalition candidate) const {
  if (static_cast<std::size_t>(i) >= visited_.size()) return false;  // unsized history blocks nothing
  return visited_[static_cast<std::size_t>(i)].count(candidate.mask()) > 0;
}

void History::reset() {
  for (auto& set : visited_) set.clear();
}

bool members_accept(EvalCache& cache, Coalition base, RsuId joiner) {
  const Coalition joined = base.with(joiner);
  return cache.extra_per_member(joined) >= cache.extra_per_member(base);
}

double preference_value(RsuId i, Coalition s, const History& history, EvalCache& cache,
                        PreferenceContext context) {
  if (!s.contains(i)) throw std::invalid_argument("preference_value: coalition must contain the RSU");
  if (context == PreferenceContext::kStaying) return cache.evaluate(s).payoff_of(i);
  if (s.size() == 1) return cache.evaluate(s).payoff_of(i);
  if (history.blocked(i, s)) return -std::numeric_limits<double>::infinity();
  if (!members_accept(cache, s.without(i), i)) return -std::numeric_limits<double>::infinity();
  return cache.evaluate(s).payoff_of(i);
}

SwitchSearch best_switch(RsuId i, const Partition& partition, const History& history, EvalCache& cache) {
  const Coalition current = partition.coalition_of(i);
  const double stay = preference_value(i, current, history, cache, PreferenceContext::kStaying);

  SwitchSearch result;
  double best = stay;
  Coalition best_candidate;  // joined set, for the lexicographic tie rule

  auto consider = [&](Coalition target) {
    const Coalition candidate = target.with(i);
    const double r = preference_value(i, candidate, history, cache, PreferenceContext::kJoining);
    ++result.candidates_evaluated;
    if (r < best) return;
    if (r > best || (result.target.has_value() && lex_less(candidate, best_candidate))) {
      best = r;
      best_candidate = candidate;
      result.target = target;
    }
  };

  for (const Coalition target : partition.coalitions())
    if (target != current) consider(target);
  consider(Coalition{});

  return result;
}

std::string to_string(SwitchRule rule) {
  return rule == SwitchRule::kBestPayoff ? "best" : "first_improving";
}

SwitchRule switch_rule_from_string(const std::string& name) {
  if (name == "best") return SwitchRule::kBestPayoff;
  if (name == "first_improving") return SwitchRule::kFirstImproving;
  throw std::invalid_argument("switch_rule: expected \"best\" or \"first_improving\", got \"" + name + "\"");
}

void apply_switch(Partition& partition, RsuId i, Coalition target, History& history) {
  const Coalition source = partition.coalition_of(i);
  if (target == source) throw std::invalid_argument("apply_switch: target equals the current coalition");
  history.record_departure(i, source);
  partition.move(i, target);
}

namespace {

// First admissible strictly improving candidate, investigated in a
// random order drawn from the run's generator.
std::optional<Coalition> first_improving_switch(RsuId i, const Partition& partition, const History& history,
                                                EvalCache& cache, Rng& rng,
                                                std::vector<Coalition>& scratch) {
  const Coalition current = partition.coalition_of(i);
  const double stay = preference_value(i, current, history, cache, PreferenceContext::kStaying);

  scratch.clear();
  for (const Coalition target : partition.coalitions())
    if (target != current) scratch.push_back(target);
  scratch.push_back(Coalition{});
  rng.shuffle(scratch);

  for (const Coalition target : scratch) {
    const double r = preference_value(i, target.with(i), history, cache, PreferenceContext::kJoining);
    if (r > stay) return target;
  }
  return std::nullopt;
}

}  // namespace

FormationResult run_formation(EvalCache& cache, Partition initial, std::uint64_t seed, int max_rounds,
                              SwitchRule rule) {
  if (max_rounds < 1) throw std::invalid_argument("run_formation: max_rounds must be at least 1");
  const int n = cache.model().size();
  if (initial.num_rsus() != n) throw std::invalid_argument("run_formation: partition size does not match scenario");

  FormationResult result;
  result.partition = std::move(initial);
  result.history = History(n);

  Rng rng(seed);
  std::vector<RsuId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::vector<Coalition> scratch;

  for (int round = 1; round <= max_rounds; ++round) {
    result.trace.rounds = round;
    rng.shuffle(order);
    int switches = 0;
    for (const RsuId i : order) {
      std::optional<Coalition> target;
      if (rule == SwitchRule::kBestPayoff) {
        target = best_switch(i, result.partition, result.history, cache).target;
      } else {
        target = first_improving_switch(i, result.partition, result.history, cache, rng, scratch);
      }
      if (!target.has_value()) continue;
      const Coalition source = result.partition.coalition_of(i);
      apply_switch(result.partition, i, *target, result.history);
      result.trace.events.push_back({round, i, source, *target});
      ++switches;
    }
    if (switches == 0) {
      result.trace.converged = true;
      break;
    }
  }
  return result;
}

FormationResult run_formation(const GameModel& model, Partition initial, std::uint64_t seed, int max_rounds,
                              SwitchRule rule) {
  EvalCache cache(model);
  return run_formation(cache, std::move(initial), seed, max_rounds, rule);
}

StabilityReport is_nash_stable(const Partition& partition, const History& history, EvalCache& cache) {
  StabilityReport report;
  for (RsuId i = 0; i < partition.num_rsus(); ++i) {
    const Coalition current = partition.coalition_of(i);
    const double stay = preference_value(i, current, history, cache, PreferenceContext::kStaying);
    auto consider = [&](Coalition target) {
      const double r = preference_value(i, target.with(i), history, cache, PreferenceContext::kJoining);
      if (r > stay) report.violations.emplace_back(i, target);
    };
    for (const Coalition target : partition.coalitions())
      if (target != current) consider(target);
    consider(Coalition{});
  }
  report.stable = report.violations.empty();
  return report;
}

StabilityReport is_nash_stable(const Partition& partition, EvalCache& cache) {
  const History empty(partition.num_rsus());
  return is_nash_stable(partition, empty, cache);
}

StabilityReport is_individually_stable(const Partition& partition, EvalCache& cache) {
  StabilityReport report;
  for (RsuId i = 0; i < partition.num_rsus(); ++i) {
    const Coalition current = partition.coalition_of(i);
    const double stay = cache.evaluate(current).payoff_of(i);
    auto consider = [&](Coalition target) {
      const double gain = cache.evaluate(target.with(i)).payoff_of(i);
      if (gain <= stay) return;
      if (target.empty() || members_accept(cache, target, i)) report.violations.emplace_back(i, target);
    };
    for (const Coalition target : partition.coalitions())
      if (target != current) consider(target);
    consider(Coalition{});
  }
  report.stable = report.violations.empty();
  return report;
}

}  // namespace rsucoal
