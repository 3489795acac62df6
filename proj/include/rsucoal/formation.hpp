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

#ifndef RSUCOAL_FORMATION_HPP
#define RSUCOAL_FORMATION_HPP

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "rsucoal/coalition.hpp"
#include "rsucoal/model.hpp"
#include "rsucoal/partition.hpp"

namespace rsucoal {

// Per-RSU record of the coalitions an RSU joined and later left.
// Singleton coalitions are never recorded: reverting to acting alone is
// always allowed.
class History {
 public:
  History() = default;
  explicit History(int n) : visited_(static_cast<std::size_t>(n)) {}

  // Records `left` (the coalition as it was, including `i`) as visited
  // and abandoned by i. Singleton sources are ignored.
  void record_departure(RsuId i, Coalition left);

  // True when `candidate` (a set containing i, size >= 2) was
  // previously joined and left by i.
  bool blocked(RsuId i, Coalition candidate) const;

  void reset();
  int num_rsus() const { return static_cast<int>(visited_.size()); }
  std::size_t entries(RsuId i) const { return visited_[static_cast<std::size_t>(i)].size(); }

 private:
  std::vector<std::unordered_set<std::uint64_t>> visited_;
};

enum class PreferenceContext { kStaying, kJoining };

// The preference an RSU attaches to being a member of S. When joining,
// the destination members' consent is required and previously abandoned
// coalitions are worth -infinity; singletons are always admissible. The
// current coalition (`kStaying`) is simply worth its payoff.
double preference_value(RsuId i, Coalition s, const History& history, EvalCache& cache,
                        PreferenceContext context);

// Do the members of `base` accept `joiner` forming base + {joiner}?
// Equivalent to every member's payoff not dropping: under egalitarian
// division that is one comparison of the per-member extra benefit.
bool members_accept(EvalCache& cache, Coalition base, RsuId joiner);

struct SwitchSearch {
  // Coalition to join (before i joins it); the empty coalition means
  // "leave and act alone". Absent when no admissible candidate strictly
  // beats staying.
  std::optional<Coalition> target;
  int candidates_evaluated = 0;
};

// Scans every other coalition of the partition plus the singleton
// deviation and returns the strictly best admissible move, ties going to
// the lexicographically smallest candidate member set.
SwitchSearch best_switch(RsuId i, const Partition& partition, const History& history, EvalCache& cache);

// How an RSU picks its move during a formation round: take the best of
// all |Pi| candidates, or the first strictly improving one in a random
// investigation order. Both converge to the same stability notion; the
// first-improving rule produces the more gradual self-organization the
// switch-count statistics reflect.
enum class SwitchRule { kBestPayoff, kFirstImproving };

std::string to_string(SwitchRule rule);
SwitchRule switch_rule_from_string(const std::string& name);

// Executes a switch admitted by best_switch: records the abandoned
// coalition in i's history (when its size was >= 2) and moves i.
void apply_switch(Partition& partition, RsuId i, Coalition target, History& history);

struct SwitchEvent {
  int round = 0;
  RsuId rsu = 0;
  Coalition from;  // source coalition, including the mover
  Coalition to;    // destination before joining; empty = went singleton
};

struct RunTrace {
  std::vector<SwitchEvent> events;
  int rounds = 0;
  bool converged = false;

  int total_switches() const { return static_cast<int>(events.size()); }
};

struct FormationResult {
  Partition partition;
  History history;
  RunTrace trace;
};

// Raised by the experiment drivers when a run exhausts its round budget.
class NonConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultMaxRounds = 1000;

// Runs rounds of switch operations, sweeping the RSUs in an order
// reshuffled each round from the seeded generator, until a full round
// passes with no switch. A run that exhausts max_rounds comes back with
// converged = false; it is a defect signal, not an expected outcome.
FormationResult run_formation(EvalCache& cache, Partition initial, std::uint64_t seed,
                              int max_rounds = kDefaultMaxRounds,
                              SwitchRule rule = SwitchRule::kBestPayoff);
FormationResult run_formation(const GameModel& model, Partition initial, std::uint64_t seed,
                              int max_rounds = kDefaultMaxRounds,
                              SwitchRule rule = SwitchRule::kBestPayoff);

struct StabilityReport {
  bool stable = true;
  // (rsu, coalition it profitably deviates to); the empty coalition
  // names the singleton deviation.
  std::vector<std::pair<RsuId, Coalition>> violations;
};

// No RSU prefers (per the consent- and history-guarded preference) any
// other coalition of the partition or the singleton deviation. With an
// empty history this is the history-free diagnostic.
StabilityReport is_nash_stable(const Partition& partition, const History& history, EvalCache& cache);
StabilityReport is_nash_stable(const Partition& partition, EvalCache& cache);

// No RSU has a strictly payoff-improving move that every destination
// member weakly accepts (history-free by definition).
StabilityReport is_individually_stable(const Partition& partition, EvalCache& cache);

}  // namespace rsucoal

#endif  // RSUCOAL_FORMATION_HPP
