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

#ifndef RSUCOAL_COALITION_HPP
#define RSUCOAL_COALITION_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsucoal {

using RsuId = int;

// A coalition is a set of RSU ids, stored as a 64-bit membership mask.
// The empty coalition is a valid value (it names the "deviate and act
// alone" target of a switch operation).
class Coalition {
 public:
  constexpr Coalition() = default;
  constexpr explicit Coalition(std::uint64_t mask) : mask_(mask) {}

  static constexpr int kMaxRsus = 64;

  static Coalition single(RsuId i) {
    check_id(i);
    return Coalition(std::uint64_t{1} << i);
  }

  static Coalition all(int n) {
    if (n < 0 || n > kMaxRsus) throw std::invalid_argument("coalition: RSU count out of range");
    if (n == kMaxRsus) return Coalition(~std::uint64_t{0});
    return Coalition((std::uint64_t{1} << n) - 1);
  }

  static Coalition from_members(const std::vector<RsuId>& members) {
    Coalition c;
    for (RsuId i : members) c = c.with(i);
    return c;
  }

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }

  bool contains(RsuId i) const {
    check_id(i);
    return (mask_ >> i) & 1u;
  }

  Coalition with(RsuId i) const {
    check_id(i);
    return Coalition(mask_ | (std::uint64_t{1} << i));
  }

  Coalition without(RsuId i) const {
    check_id(i);
    return Coalition(mask_ & ~(std::uint64_t{1} << i));
  }

  // Members in ascending id order.
  std::vector<RsuId> members() const {
    std::vector<RsuId> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint64_t m = mask_; m != 0; m &= m - 1)
      out.push_back(std::countr_zero(m));
    return out;
  }

  RsuId lowest_member() const {
    if (empty()) throw std::logic_error("coalition: lowest_member of empty set");
    return std::countr_zero(mask_);
  }

  friend constexpr bool operator==(Coalition a, Coalition b) = default;

 private:
  static void check_id(RsuId i) {
    if (i < 0 || i >= kMaxRsus) throw std::invalid_argument("coalition: RSU id out of range");
  }

  std::uint64_t mask_ = 0;
};

// Compares coalitions the way their sorted member lists compare
// lexicographically, e.g. {0,3} < {1} < {1,3} and {} < anything.
inline bool lex_less(Coalition a, Coalition b) {
  const std::uint64_t diff = a.mask() ^ b.mask();
  if (diff == 0) return false;
  const std::uint64_t low = diff & (~diff + 1);  // lowest differing member
  const std::uint64_t above = ~((low << 1) - 1);
  // Members below `low` are shared. Whoever owns `low` has the smaller
  // element at the first differing position, unless the other list has
  // already ended there (a strict prefix precedes its extension).
  if (a.mask() & low) return (b.mask() & above) != 0;
  return (a.mask() & above) == 0;
}

// "{0,3}" style rendering for messages and traces.
inline std::string to_string(Coalition c) {
  std::string out = "{";
  bool first = true;
  for (RsuId i : c.members()) {
    if (!first) out += ",";
    first = false;
    out += std::to_string(i);
  }
  out += "}";
  return out;
}

}  // namespace rsucoal

#endif  // RSUCOAL_COALITION_HPP
