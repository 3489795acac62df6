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

#ifndef RSUCOAL_ORACLE_HPP
#define RSUCOAL_ORACLE_HPP

#include <optional>

#include "rsucoal/model.hpp"
#include "rsucoal/partition.hpp"

namespace rsucoal {

// Exhaustive enumeration is capped here; the partition count grows with
// the Bell numbers (B(12) = 4,213,597).
inline constexpr int kMaxEnumerationRsus = 12;

// Streams every set partition of {0..n-1} exactly once, in lexicographic
// restricted-growth-string order.
class PartitionEnumerator {
 public:
  explicit PartitionEnumerator(int n);  // throws std::invalid_argument outside 1..12

  std::optional<Partition> next();

 private:
  Partition current() const;

  int n_;
  bool exhausted_ = false;
  bool first_ = true;
  std::vector<int> growth_;
  std::vector<int> prefix_max_;
};

struct OptimalPartitionResult {
  Partition partition;
  double total_value = 0.0;
};

// Centralized baseline: the partition maximizing the total coalition
// value (equivalently the average payoff per RSU), found by scanning
// every partition. Ties keep the first partition in enumeration order.
OptimalPartitionResult optimal_partition(EvalCache& cache);
OptimalPartitionResult optimal_partition(const Scenario& scenario);

}  // namespace rsucoal

#endif  // RSUCOAL_ORACLE_HPP
