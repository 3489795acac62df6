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

#include "rsucoal/oracle.hpp"

#include <stdexcept>
#include <string>

namespace rsucoal {

PartitionEnumerator::PartitionEnumerator(int n) : n_(n) {
  if (n < 1 || n > kMaxEnumerationRsus)
    throw std::invalid_argument("partition enumeration supports 1.." + std::to_string(kMaxEnumerationRsus) +
                                " RSUs, got " + std::to_string(n));
  growth_.assign(static_cast<std::size_t>(n), 0);
  prefix_max_.assign(static_cast<std::size_t>(n), 0);
}

Partition PartitionEnumerator::current() const {
  std::vector<Coalition> blocks(static_cast<std::size_t>(prefix_max_[static_cast<std::size_t>(n_ - 1)]) + 1);
  for (int i = 0; i < n_; ++i) {
    auto& block = blocks[static_cast<std::size_t>(growth_[static_cast<std::size_t>(i)])];
    block = block.with(i);
  }
  return Partition::from_coalitions(n_, std::move(blocks));
}

std::optional<Partition> PartitionEnumerator::next() {
  if (exhausted_) return std::nullopt;
  if (first_) {
    first_ = false;
    return current();
  }
  // Standard restricted-growth increment: bump the rightmost digit that
  // may still grow, reset everything after it to zero.
  for (int i = n_ - 1; i > 0; --i) {
    if (growth_[static_cast<std::size_t>(i)] <= prefix_max_[static_cast<std::size_t>(i - 1)]) {
      ++growth_[static_cast<std::size_t>(i)];
      prefix_max_[static_cast<std::size_t>(i)] =
          std::max(prefix_max_[static_cast<std::size_t>(i - 1)], growth_[static_cast<std::size_t>(i)]);
      for (int j = i + 1; j < n_; ++j) {
        growth_[static_cast<std::size_t>(j)] = 0;
        prefix_max_[static_cast<std::size_t>(j)] = prefix_max_[static_cast<std::size_t>(i)];
      }
      return current();
    }
  }
  exhausted_ = true;
  return std::nullopt;
}

OptimalPartitionResult optimal_partition(EvalCache& cache) {
  const int n = cache.model().size();
  if (n > kMaxEnumerationRsus)
    throw std::invalid_argument("optimal_partition: exhaustive search supports at most " +
                                std::to_string(kMaxEnumerationRsus) + " RSUs, got " + std::to_string(n));

  // Evaluate every non-empty subset once; partitions then only sum
  // cached values.
  const std::uint64_t full = Coalition::all(n).mask();
  std::vector<double> value_by_mask(full + 1, 0.0);
  for (std::uint64_t mask = 1; mask <= full; ++mask)
    value_by_mask[mask] = cache.value(Coalition(mask));

  PartitionEnumerator enumerator(n);
  std::optional<Partition> best;
  double best_total = 0.0;
  while (auto partition = enumerator.next()) {
    double total = 0.0;
    for (const Coalition block : partition->coalitions()) total += value_by_mask[block.mask()];
    if (!best.has_value() || total > best_total) {
      best = std::move(partition);
      best_total = total;
    }
  }
  return {std::move(*best), best_total};
}

OptimalPartitionResult optimal_partition(const Scenario& scenario) {
  GameModel model(scenario);
  EvalCache cache(model);
  return optimal_partition(cache);
}

}  // namespace rsucoal
