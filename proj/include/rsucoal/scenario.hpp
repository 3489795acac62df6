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

#ifndef RSUCOAL_SCENARIO_HPP
#define RSUCOAL_SCENARIO_HPP

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rsucoal {

// How the worth of a V2V-paired vehicle is counted when both endpoint
// RSUs transmit the same data class: `kDiscount` counts the duplicated
// class once, `kLiteral` counts it twice.
enum class DuplicateClassPolicy { kDiscount, kLiteral };

std::string to_string(DuplicateClassPolicy policy);
DuplicateClassPolicy duplicate_class_policy_from_string(const std::string& name);

// One immutable problem instance: RSU deployment, directed vehicle
// traffic, data-class weights and the pricing parameters.
struct Scenario {
  std::vector<std::array<double, 2>> positions;  // km
  std::vector<std::vector<double>> traffic;      // vehicles, K[i][j], zero diagonal
  double chunks_per_vehicle = 10.0;              // data chunks per vehicle per RSU
  std::vector<double> class_weights;             // strictly decreasing, each in (0, 1]
  double beta = 1.0;                             // price per unit of effective data
  double alpha = 10.0;                           // coordination cost per member
  double delta = 0.8;                            // meeting fraction at 1 km
  DuplicateClassPolicy duplicate_class_policy = DuplicateClassPolicy::kDiscount;

  int size() const { return static_cast<int>(positions.size()); }
  int num_classes() const { return static_cast<int>(class_weights.size()); }
};

// One message per violated invariant, each naming the offending key;
// empty when the scenario is well formed.
std::vector<std::string> validate(const Scenario& scenario);

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::vector<std::string>& issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

// Throws ScenarioError listing every violated invariant.
void require_valid(const Scenario& scenario);

// JSON document form. `traffic` is either {"matrix": n x n} or
// {"per_rsu": [K_i ...]} which expands to K[i][j] = K_i for all j != i.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace rsucoal

#endif  // RSUCOAL_SCENARIO_HPP
