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

#ifndef RSUCOAL_MODEL_HPP
#define RSUCOAL_MODEL_HPP

#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rsucoal/coalition.hpp"
#include "rsucoal/scenario.hpp"

namespace rsucoal {

// The data class transmitted by each member of one coalition on its
// internal links. Class indices are 0-based (0 is the highest-priority
// class); `classes` is aligned with Coalition::members().
struct ClassAssignment {
  Coalition coalition;
  std::vector<std::uint8_t> classes;

  static ClassAssignment uniform(Coalition coalition, std::uint8_t cls);
  int class_of(RsuId i) const;  // 0-based index; throws if i is not a member
};

// A fully evaluated coalition: revenue under the best class assignment,
// coordination cost, net value, and the egalitarian payoff division.
// `payoffs` is aligned with Coalition::members(); `extra` is the net
// value minus the members' standalone utilities (the benefit that the
// egalitarian rule splits equally).
struct CoalitionEvaluation {
  Coalition coalition;
  ClassAssignment assignment;
  double revenue = 0.0;
  double cost = 0.0;
  double value = 0.0;
  double extra = 0.0;
  std::vector<double> payoffs;

  double payoff_of(RsuId i) const;
  double extra_per_member() const { return extra / coalition.size(); }
};

// Precomputed tables for one immutable scenario: distances, expected
// V2V meeting pairs, and standalone utilities. All member functions are
// const and safe to call concurrently.
class GameModel {
 public:
  explicit GameModel(Scenario scenario);  // throws ScenarioError when invalid

  const Scenario& scenario() const { return scenario_; }
  int size() const { return n_; }
  int num_classes() const { return static_cast<int>(scenario_.class_weights.size()); }

  double distance(RsuId i, RsuId j) const { return dist_[idx(i, j)]; }
  // Expected vehicle pairs exchanging content between i and j; zero on
  // the diagonal.
  double meeting(RsuId i, RsuId j) const { return meet_[idx(i, j)]; }
  // Standalone (singleton-coalition) utility of RSU i.
  double noncoop(RsuId i) const { return noncoop_[static_cast<std::size_t>(i)]; }
  double noncoop_total() const { return noncoop_total_; }

  // Coalition revenue for a fixed class assignment. The assignment must
  // cover exactly `coalition`.
  double revenue(Coalition coalition, const ClassAssignment& assignment) const;

  // Revenue-maximizing class assignment and its revenue. Ties resolve
  // to the lexicographically smallest class tuple in ascending member
  // order, so results are reproducible.
  std::pair<ClassAssignment, double> maximize_revenue(Coalition coalition) const;

  double cost(Coalition coalition) const;

  CoalitionEvaluation evaluate(Coalition coalition) const;

 private:
  std::size_t idx(RsuId i, RsuId j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
  }
  void check_members(Coalition coalition) const;
  double revenue_raw(const std::vector<RsuId>& members, const std::vector<std::uint8_t>& classes) const;
  std::pair<ClassAssignment, double> maximize_by_tuples(Coalition coalition,
                                                        const std::vector<RsuId>& members) const;
  std::pair<ClassAssignment, double> maximize_by_grouping(Coalition coalition,
                                                          const std::vector<RsuId>& members) const;

  Scenario scenario_;
  int n_ = 0;
  std::vector<double> dist_;
  std::vector<double> meet_;
  std::vector<double> rowsum_;   // total traffic initiating at each RSU
  std::vector<double> noncoop_;
  double noncoop_total_ = 0.0;
};

// Memoizes coalition evaluations for one GameModel. Not thread-safe:
// give each worker its own cache.
class EvalCache {
 public:
  explicit EvalCache(const GameModel& model) : model_(&model) {}

  const CoalitionEvaluation& evaluate(Coalition coalition);
  double value(Coalition coalition) { return evaluate(coalition).value; }
  // extra / |S|; the quantity the consent comparison reduces to.
  double extra_per_member(Coalition coalition) { return evaluate(coalition).extra_per_member(); }

  const GameModel& model() const { return *model_; }
  std::size_t entries() const { return cache_.size(); }

 private:
  const GameModel* model_;
  std::unordered_map<std::uint64_t, CoalitionEvaluation> cache_;
};

// One-shot convenience wrappers over GameModel.

// Full symmetric Euclidean distance matrix in km.
std::vector<std::vector<double>> pairwise_distance(const Scenario& scenario);

// Expected content-sharing vehicle pairs between two distinct RSUs.
// Throws std::invalid_argument when i == j.
double meeting_pairs(RsuId i, RsuId j, const Scenario& scenario);

double noncoop_utility(RsuId i, const Scenario& scenario);
double coalition_revenue(Coalition coalition, const ClassAssignment& assignment, const Scenario& scenario);
std::pair<ClassAssignment, double> best_assignment(Coalition coalition, const Scenario& scenario);
double coalition_cost(Coalition coalition, const Scenario& scenario);
CoalitionEvaluation evaluate_coalition(Coalition coalition, const Scenario& scenario);

}  // namespace rsucoal

#endif  // RSUCOAL_MODEL_HPP
