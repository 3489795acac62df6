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

#include "rsucoal/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rsucoal {

ClassAssignment ClassAssignment::uniform(Coalition coalition, std::uint8_t cls) {
  ClassAssignment a;
  a.coalition = coalition;
  a.classes.assign(static_cast<std::size_t>(coalition.size()), cls);
  return a;
}

int ClassAssignment::class_of(RsuId i) const {
  if (!coalition.contains(i)) throw std::invalid_argument("class_of: RSU " + std::to_string(i) + " is not a member");
  // Rank of i among the members below it.
  const std::uint64_t below = coalition.mask() & ((std::uint64_t{1} << i) - 1);
  return classes[static_cast<std::size_t>(std::popcount(below))];
}

double CoalitionEvaluation::payoff_of(RsuId i) const {
  if (!coalition.contains(i)) throw std::invalid_argument("payoff_of: RSU " + std::to_string(i) + " is not a member");
  const std::uint64_t below = coalition.mask() & ((std::uint64_t{1} << i) - 1);
  return payoffs[static_cast<std::size_t>(std::popcount(below))];
}

GameModel::GameModel(Scenario scenario) : scenario_(std::move(scenario)) {
  require_valid(scenario_);
  n_ = scenario_.size();
  const std::size_t nn = static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
  dist_.assign(nn, 0.0);
  meet_.assign(nn, 0.0);
  rowsum_.assign(static_cast<std::size_t>(n_), 0.0);
  noncoop_.assign(static_cast<std::size_t>(n_), 0.0);

  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      const double dx = scenario_.positions[i][0] - scenario_.positions[j][0];
      const double dy = scenario_.positions[i][1] - scenario_.positions[j][1];
      dist_[idx(i, j)] = std::sqrt(dx * dx + dy * dy);
      rowsum_[static_cast<std::size_t>(i)] += scenario_.traffic[i][j];
    }
  }
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      if (i == j) continue;
      const double low = std::min(scenario_.traffic[i][j], scenario_.traffic[j][i]);
      meet_[idx(i, j)] = std::pow(scenario_.delta, dist_[idx(i, j)]) * low;
    }
  }

  const std::vector<std::uint8_t> top_class{0};
  for (int i = 0; i < n_; ++i) {
    const std::vector<RsuId> self{i};
    noncoop_[static_cast<std::size_t>(i)] = revenue_raw(self, top_class);
    noncoop_total_ += noncoop_[static_cast<std::size_t>(i)];
  }
}

void GameModel::check_members(Coalition coalition) const {
  const std::uint64_t known = Coalition::all(n_).mask();
  if ((coalition.mask() & ~known) != 0)
    throw std::invalid_argument("coalition " + to_string(coalition) + " references RSUs outside the scenario");
}

double GameModel::revenue_raw(const std::vector<RsuId>& members,
                              const std::vector<std::uint8_t>& classes) const {
  const auto& weights = scenario_.class_weights;
  const double w_top = weights[0];
  const bool discount = scenario_.duplicate_class_policy == DuplicateClassPolicy::kDiscount;
  const std::size_t s = members.size();

  double acc = 0.0;
  for (std::size_t ii = 0; ii < s; ++ii) {
    const RsuId i = members[ii];
    const double w_i = weights[classes[ii]];
    double in_traffic = 0.0;
    double internal = 0.0;
    for (std::size_t jj = 0; jj < s; ++jj) {
      if (jj == ii) continue;
      const RsuId j = members[jj];
      const double k = scenario_.traffic[i][j];
      const double m = meet_[idx(i, j)];
      const double w_j = weights[classes[jj]];
      const double worth = (classes[ii] == classes[jj] && discount) ? w_i : w_i + w_j;
      in_traffic += k;
      internal += (k - m) * w_i + m * worth;
    }
    acc += w_top * (rowsum_[static_cast<std::size_t>(i)] - in_traffic) + internal;
  }
  return scenario_.beta * scenario_.chunks_per_vehicle * acc;
}

double GameModel::revenue(Coalition coalition, const ClassAssignment& assignment) const {
  check_members(coalition);
  if (coalition.empty()) throw std::invalid_argument("revenue: empty coalition");
  if (assignment.coalition != coalition)
    throw std::invalid_argument("revenue: assignment covers " + to_string(assignment.coalition) +
                                ", expected " + to_string(coalition));
  const auto members = coalition.members();
  if (assignment.classes.size() != members.size())
    throw std::invalid_argument("revenue: assignment size does not match coalition size");
  for (const std::uint8_t c : assignment.classes)
    if (c >= num_classes()) throw std::invalid_argument("revenue: class index out of range");
  return revenue_raw(members, assignment.classes);
}

namespace {

// Advances a class tuple in lexicographic order (first member most
// significant). Returns false once all tuples have been emitted.
bool next_tuple(std::vector<std::uint8_t>& classes, int num_classes) {
  for (std::size_t p = classes.size(); p-- > 0;) {
    if (classes[p] + 1 < num_classes) {
      ++classes[p];
      std::fill(classes.begin() + static_cast<std::ptrdiff_t>(p) + 1, classes.end(), std::uint8_t{0});
      return true;
    }
  }
  return false;
}

}  // namespace

std::pair<ClassAssignment, double> GameModel::maximize_by_tuples(Coalition coalition,
                                                                 const std::vector<RsuId>& members) const {
  const int L = num_classes();
  std::vector<std::uint8_t> classes(members.size(), 0);
  std::vector<std::uint8_t> best_classes = classes;
  double best = revenue_raw(members, classes);
  while (next_tuple(classes, L)) {
    const double r = revenue_raw(members, classes);
    if (r > best) {
      best = r;
      best_classes = classes;
    }
  }
  ClassAssignment a;
  a.coalition = coalition;
  a.classes = std::move(best_classes);
  return {std::move(a), best};
}

// Exact branch-and-bound search used beyond the exhaustive-tuple budget.
// Under the discount policy the internal revenue depends only on how the
// members are grouped by equal class: a group G contributes
// g(G) = sum_i a_i - 2 * sum_{i<j in G} m_ij with a_i the member's total
// internal traffic-plus-meeting mass, and the best labeling matches the
// largest group masses to the largest weights.
std::pair<ClassAssignment, double> GameModel::maximize_by_grouping(Coalition coalition,
                                                                   const std::vector<RsuId>& members) const {
  const int L = num_classes();
  const int s = static_cast<int>(members.size());
  const auto& weights = scenario_.class_weights;
  const double w_top = weights[0];

  std::vector<double> mass(static_cast<std::size_t>(s), 0.0);
  for (int ii = 0; ii < s; ++ii) {
    for (int jj = 0; jj < s; ++jj) {
      if (jj == ii) continue;
      mass[static_cast<std::size_t>(ii)] +=
          scenario_.traffic[members[ii]][members[jj]] + meet_[idx(members[ii], members[jj])];
    }
  }

  std::vector<int> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (mass[static_cast<std::size_t>(a)] != mass[static_cast<std::size_t>(b)])
      return mass[static_cast<std::size_t>(a)] > mass[static_cast<std::size_t>(b)];
    return a < b;
  });

  std::vector<double> suffix(static_cast<std::size_t>(s) + 1, 0.0);
  for (int t = s - 1; t >= 0; --t)
    suffix[static_cast<std::size_t>(t)] =
        suffix[static_cast<std::size_t>(t) + 1] + mass[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])];

  const int max_groups = std::min(L, s);
  std::vector<double> group_mass(static_cast<std::size_t>(max_groups), 0.0);
  std::vector<RsuId> group_min(static_cast<std::size_t>(max_groups), 0);
  std::vector<std::vector<int>> group_members(static_cast<std::size_t>(max_groups));
  std::vector<int> group_of(static_cast<std::size_t>(s), -1);

  double best_internal = -std::numeric_limits<double>::infinity();
  std::vector<std::uint8_t> best_classes(static_cast<std::size_t>(s), 0);

  struct Ranked {
    double mass;
    RsuId min_member;
    int group;
  };

  int used = 0;
  double mass_sum = 0.0;

  auto record_leaf = [&]() {
    Ranked ranked[Coalition::kMaxRsus];
    for (int g = 0; g < used; ++g)
      ranked[g] = {group_mass[static_cast<std::size_t>(g)], group_min[static_cast<std::size_t>(g)], g};
    std::sort(ranked, ranked + used, [](const Ranked& a, const Ranked& b) {
      if (a.mass != b.mass) return a.mass > b.mass;
      return a.min_member < b.min_member;
    });
    double total = 0.0;
    for (int r = 0; r < used; ++r) total += weights[static_cast<std::size_t>(r)] * ranked[r].mass;
    if (total > best_internal) {
      best_internal = total;
      std::uint8_t class_of_group[Coalition::kMaxRsus];
      for (int r = 0; r < used; ++r) class_of_group[ranked[r].group] = static_cast<std::uint8_t>(r);
      for (int t = 0; t < s; ++t)
        best_classes[static_cast<std::size_t>(t)] = class_of_group[group_of[static_cast<std::size_t>(t)]];
    }
  };

  auto dfs = [&](auto&& self, int t) -> void {
    if (t == s) {
      record_leaf();
      return;
    }
    if ((mass_sum + suffix[static_cast<std::size_t>(t)]) * w_top <= best_internal) return;
    const int x = order[static_cast<std::size_t>(t)];
    const RsuId rsu = members[static_cast<std::size_t>(x)];

    for (int g = 0; g < used; ++g) {
      double pair_sum = 0.0;
      for (const int y : group_members[static_cast<std::size_t>(g)])
        pair_sum += meet_[idx(rsu, members[static_cast<std::size_t>(y)])];
      const double delta = mass[static_cast<std::size_t>(x)] - 2.0 * pair_sum;

      const double saved_mass = group_mass[static_cast<std::size_t>(g)];
      const RsuId saved_min = group_min[static_cast<std::size_t>(g)];
      const double saved_sum = mass_sum;
      group_mass[static_cast<std::size_t>(g)] = saved_mass + delta;
      group_min[static_cast<std::size_t>(g)] = std::min(saved_min, rsu);
      mass_sum = saved_sum + delta;
      group_members[static_cast<std::size_t>(g)].push_back(x);
      group_of[static_cast<std::size_t>(x)] = g;

      self(self, t + 1);

      group_members[static_cast<std::size_t>(g)].pop_back();
      group_mass[static_cast<std::size_t>(g)] = saved_mass;
      group_min[static_cast<std::size_t>(g)] = saved_min;
      mass_sum = saved_sum;
    }

    if (used < max_groups) {
      const int g = used;
      const double saved_sum = mass_sum;
      group_mass[static_cast<std::size_t>(g)] = mass[static_cast<std::size_t>(x)];
      group_min[static_cast<std::size_t>(g)] = rsu;
      mass_sum = saved_sum + mass[static_cast<std::size_t>(x)];
      group_members[static_cast<std::size_t>(g)].push_back(x);
      group_of[static_cast<std::size_t>(x)] = g;
      ++used;

      self(self, t + 1);

      --used;
      group_members[static_cast<std::size_t>(g)].pop_back();
      mass_sum = saved_sum;
    }
  };
  dfs(dfs, 0);

  ClassAssignment a;
  a.coalition = coalition;
  a.classes = std::move(best_classes);
  const double rev = revenue_raw(members, a.classes);
  return {std::move(a), rev};
}

std::pair<ClassAssignment, double> GameModel::maximize_revenue(Coalition coalition) const {
  check_members(coalition);
  if (coalition.empty()) throw std::invalid_argument("maximize_revenue: empty coalition");
  const auto members = coalition.members();
  const int L = num_classes();

  // Counting a duplicated class twice makes the revenue separable per
  // member, so everyone transmits the top class.
  if (scenario_.duplicate_class_policy == DuplicateClassPolicy::kLiteral || L == 1) {
    ClassAssignment a = ClassAssignment::uniform(coalition, 0);
    const double rev = revenue_raw(members, a.classes);
    return {std::move(a), rev};
  }

  std::uint64_t tuples = 1;
  bool small = true;
  for (std::size_t k = 0; k < members.size() && small; ++k) {
    tuples *= static_cast<std::uint64_t>(L);
    if (tuples > 2048) small = false;
  }
  if (small) return maximize_by_tuples(coalition, members);
  return maximize_by_grouping(coalition, members);
}

double GameModel::cost(Coalition coalition) const {
  check_members(coalition);
  if (coalition.empty()) throw std::invalid_argument("cost: empty coalition");
  const int s = coalition.size();
  return s > 1 ? scenario_.alpha * s : 0.0;
}

CoalitionEvaluation GameModel::evaluate(Coalition coalition) const {
  check_members(coalition);
  if (coalition.empty()) throw std::invalid_argument("evaluate: empty coalition");

  CoalitionEvaluation eval;
  eval.coalition = coalition;
  auto [assignment, rev] = maximize_revenue(coalition);
  eval.assignment = std::move(assignment);
  eval.revenue = rev;
  eval.cost = cost(coalition);
  eval.value = eval.revenue - eval.cost;

  const auto members = coalition.members();
  double standalone = 0.0;
  for (const RsuId i : members) standalone += noncoop_[static_cast<std::size_t>(i)];
  eval.extra = eval.value - standalone;

  const double share = eval.extra / static_cast<double>(members.size());
  eval.payoffs.reserve(members.size());
  for (const RsuId i : members) eval.payoffs.push_back(share + noncoop_[static_cast<std::size_t>(i)]);
  return eval;
}

const CoalitionEvaluation& EvalCache::evaluate(Coalition coalition) {
  const auto it = cache_.find(coalition.mask());
  if (it != cache_.end()) return it->second;
  return cache_.emplace(coalition.mask(), model_->evaluate(coalition)).first->second;
}

std::vector<std::vector<double>> pairwise_distance(const Scenario& scenario) {
  require_valid(scenario);
  const int n = scenario.size();
  std::vector<std::vector<double>> d(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dx = scenario.positions[i][0] - scenario.positions[j][0];
      const double dy = scenario.positions[i][1] - scenario.positions[j][1];
      const double dist = std::sqrt(dx * dx + dy * dy);
      d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = dist;
      d[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = dist;
    }
  }
  return d;
}

double meeting_pairs(RsuId i, RsuId j, const Scenario& scenario) {
  if (i == j) throw std::invalid_argument("meeting_pairs: i and j must be distinct RSUs");
  const int n = scenario.size();
  if (i < 0 || j < 0 || i >= n || j >= n) throw std::invalid_argument("meeting_pairs: RSU id out of range");
  const double dx = scenario.positions[i][0] - scenario.positions[j][0];
  const double dy = scenario.positions[i][1] - scenario.positions[j][1];
  const double dist = std::sqrt(dx * dx + dy * dy);
  return std::pow(scenario.delta, dist) * std::min(scenario.traffic[i][j], scenario.traffic[j][i]);
}

double noncoop_utility(RsuId i, const Scenario& scenario) { return GameModel(scenario).noncoop(i); }

double coalition_revenue(Coalition coalition, const ClassAssignment& assignment, const Scenario& scenario) {
  return GameModel(scenario).revenue(coalition, assignment);
}

std::pair<ClassAssignment, double> best_assignment(Coalition coalition, const Scenario& scenario) {
  return GameModel(scenario).maximize_revenue(coalition);
}

double coalition_cost(Coalition coalition, const Scenario& scenario) { return GameModel(scenario).cost(coalition); }

CoalitionEvaluation evaluate_coalition(Coalition coalition, const Scenario& scenario) {
  return GameModel(scenario).evaluate(coalition);
}

}  // namespace rsucoal
