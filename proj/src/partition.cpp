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

#include "rsucoal/partition.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rsucoal {

Partition Partition::singletons(int n) {
  std::vector<Coalition> cs;
  cs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) cs.push_back(Coalition::single(i));
  return from_coalitions(n, std::move(cs));
}

Partition Partition::grand(int n) { return from_coalitions(n, {Coalition::all(n)}); }

Partition Partition::from_coalitions(int n, std::vector<Coalition> coalitions) {
  if (n < 1 || n > Coalition::kMaxRsus) throw std::invalid_argument("partition: RSU count out of range");
  std::uint64_t seen = 0;
  for (const Coalition c : coalitions) {
    if (c.empty()) throw std::invalid_argument("partition: empty coalition");
    if ((seen & c.mask()) != 0) throw std::invalid_argument("partition: coalitions overlap at " + to_string(c));
    seen |= c.mask();
  }
  if (seen != Coalition::all(n).mask())
    throw std::invalid_argument("partition: coalitions do not cover all " + std::to_string(n) + " RSUs");

  Partition p;
  p.n_ = n;
  p.coalitions_ = std::move(coalitions);
  p.rebuild_index();
  return p;
}

void Partition::rebuild_index() {
  index_.assign(static_cast<std::size_t>(n_), -1);
  for (std::size_t k = 0; k < coalitions_.size(); ++k)
    for (const RsuId i : coalitions_[k].members()) index_[static_cast<std::size_t>(i)] = static_cast<int>(k);
}

Coalition Partition::coalition_of(RsuId i) const {
  if (i < 0 || i >= n_) throw std::invalid_argument("partition: RSU id out of range");
  return coalitions_[static_cast<std::size_t>(index_[static_cast<std::size_t>(i)])];
}

void Partition::move(RsuId i, Coalition target) {
  const Coalition source = coalition_of(i);
  if (target == source) throw std::invalid_argument("partition: move target equals the current coalition");
  if (!target.empty()) {
    const auto it = std::find(coalitions_.begin(), coalitions_.end(), target);
    if (it == coalitions_.end())
      throw std::invalid_argument("partition: move target " + to_string(target) + " is not a coalition");
    *it = it->with(i);
  } else {
    coalitions_.push_back(Coalition::single(i));
  }
  const auto src = std::find(coalitions_.begin(), coalitions_.end(), source);
  *src = src->without(i);
  if (src->empty()) coalitions_.erase(src);
  rebuild_index();
}

std::vector<Coalition> Partition::canonical_coalitions() const {
  std::vector<Coalition> cs = coalitions_;
  std::sort(cs.begin(), cs.end(),
            [](Coalition a, Coalition b) { return a.lowest_member() < b.lowest_member(); });
  return cs;
}

std::string Partition::to_text() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const Coalition c : canonical_coalitions()) doc.push_back(c.members());
  return doc.dump();
}

Partition Partition::from_text(const std::string& text, int n) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("partition: cannot parse text form: ") + e.what());
  }
  if (!doc.is_array()) throw std::invalid_argument("partition: text form must be an array of member lists");
  std::vector<Coalition> cs;
  for (const auto& block : doc) {
    if (!block.is_array()) throw std::invalid_argument("partition: text form must be an array of member lists");
    Coalition c;
    for (const auto& m : block) {
      if (!m.is_number_integer()) throw std::invalid_argument("partition: member ids must be integers");
      const int id = m.get<int>();
      if (id < 0 || id >= n) throw std::invalid_argument("partition: member id " + std::to_string(id) + " out of range");
      if (c.contains(id)) throw std::invalid_argument("partition: duplicate member " + std::to_string(id));
      c = c.with(id);
    }
    cs.push_back(c);
  }
  return from_coalitions(n, std::move(cs));
}

bool operator==(const Partition& a, const Partition& b) {
  return a.n_ == b.n_ && a.canonical_coalitions() == b.canonical_coalitions();
}

}  // namespace rsucoal
