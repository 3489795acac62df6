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

#ifndef RSUCOAL_PARTITION_HPP
#define RSUCOAL_PARTITION_HPP

#include <string>
#include <vector>

#include "rsucoal/coalition.hpp"

namespace rsucoal {

// A disjoint cover of the RSU set {0..n-1} by non-empty coalitions,
// with a membership index for O(1) lookup of an RSU's coalition.
class Partition {
 public:
  Partition() = default;

  static Partition singletons(int n);
  static Partition grand(int n);
  // Validates disjointness, cover and non-emptiness; throws
  // std::invalid_argument otherwise.
  static Partition from_coalitions(int n, std::vector<Coalition> coalitions);

  int num_rsus() const { return n_; }
  int size() const { return static_cast<int>(coalitions_.size()); }
  const std::vector<Coalition>& coalitions() const { return coalitions_; }
  Coalition coalition_of(RsuId i) const;

  // Moves RSU i into `target` (a coalition of this partition, or the
  // empty coalition for a fresh singleton), erasing the source
  // coalition when it empties. The target must differ from i's current
  // coalition.
  void move(RsuId i, Coalition target);

  // Coalitions ordered by smallest member, members ascending:
  // the canonical "[[0,3],[1],[2,4,5]]" form.
  std::vector<Coalition> canonical_coalitions() const;
  std::string to_text() const;
  static Partition from_text(const std::string& text, int n);

  friend bool operator==(const Partition& a, const Partition& b);

 private:
  void rebuild_index();

  int n_ = 0;
  std::vector<Coalition> coalitions_;
  std::vector<int> index_;  // RSU id -> position in coalitions_
};

}  // namespace rsucoal

#endif  // RSUCOAL_PARTITION_HPP
