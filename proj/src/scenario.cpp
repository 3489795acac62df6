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

#include "rsucoal/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rsucoal/coalition.hpp"

namespace rsucoal {

std::string to_string(DuplicateClassPolicy policy) {
  return policy == DuplicateClassPolicy::kDiscount ? "discount" : "literal";
}

DuplicateClassPolicy duplicate_class_policy_from_string(const std::string& name) {
  if (name == "discount") return DuplicateClassPolicy::kDiscount;
  if (name == "literal") return DuplicateClassPolicy::kLiteral;
  throw std::invalid_argument("duplicate_class_policy: expected \"discount\" or \"literal\", got \"" + name + "\"");
}

std::vector<std::string> validate(const Scenario& s) {
  std::vector<std::string> issues;
  const int n = s.size();

  if (n < 1) issues.push_back("positions: at least one RSU is required");
  if (n > Coalition::kMaxRsus)
    issues.push_back("positions: at most " + std::to_string(Coalition::kMaxRsus) + " RSUs are supported");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(s.positions[i][0]) || !std::isfinite(s.positions[i][1])) {
      issues.push_back("positions: entry " + std::to_string(i) + " is not finite");
      break;
    }
  }

  if (static_cast<int>(s.traffic.size()) != n) {
    issues.push_back("traffic: expected " + std::to_string(n) + " rows, got " + std::to_string(s.traffic.size()));
  } else {
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(s.traffic[i].size()) != n) {
        issues.push_back("traffic: row " + std::to_string(i) + " has " + std::to_string(s.traffic[i].size()) +
                         " entries, expected " + std::to_string(n));
        continue;
      }
      for (int j = 0; j < n; ++j) {
        const double k = s.traffic[i][j];
        if (!std::isfinite(k) || k < 0) {
          issues.push_back("traffic: entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") must be finite and non-negative");
        } else if (i == j && k != 0) {
          issues.push_back("traffic: diagonal entry (" + std::to_string(i) + "," + std::to_string(i) +
                           ") must be zero");
        }
      }
    }
  }

  if (s.class_weights.empty()) {
    issues.push_back("class_weights: at least one data class is required");
  } else {
    for (std::size_t l = 0; l < s.class_weights.size(); ++l) {
      const double w = s.class_weights[l];
      if (!(w > 0.0) || w > 1.0) {
        issues.push_back("class_weights: entry " + std::to_string(l) + " must lie in (0, 1]");
      }
      if (l > 0 && !(s.class_weights[l] < s.class_weights[l - 1])) {
        issues.push_back("class_weights: weights must be strictly decreasing (entry " + std::to_string(l) + ")");
      }
    }
  }

  if (!(s.beta > 0.0) || !std::isfinite(s.beta)) issues.push_back("beta: must be positive and finite");
  if (!(s.alpha >= 0.0) || !std::isfinite(s.alpha)) issues.push_back("alpha: must be non-negative and finite");
  if (!(s.delta >= 0.0) || !(s.delta <= 1.0)) issues.push_back("delta: must lie in [0, 1]");
  if (!(s.chunks_per_vehicle > 0.0) || !std::isfinite(s.chunks_per_vehicle))
    issues.push_back("chunks_per_vehicle: must be positive and finite");

  return issues;
}

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream oss;
  oss << "invalid scenario:";
  for (const auto& issue : issues) oss << "\n  - " << issue;
  return oss.str();
}

}  // namespace

ScenarioError::ScenarioError(const std::vector<std::string>& issues)
    : std::runtime_error(join_issues(issues)), issues_(issues) {}

void require_valid(const Scenario& scenario) {
  auto issues = validate(scenario);
  if (!issues.empty()) throw ScenarioError(issues);
}

Scenario scenario_from_json(const nlohmann::json& doc) {
  std::vector<std::string> issues;
  Scenario s;

  auto fetch_number = [&](const char* key, double fallback, double* out) {
    if (!doc.contains(key)) {
      *out = fallback;
      return;
    }
    if (!doc[key].is_number()) {
      issues.push_back(std::string(key) + ": must be a number");
      return;
    }
    *out = doc[key].get<double>();
  };

  if (!doc.contains("positions") || !doc["positions"].is_array()) {
    issues.push_back("positions: required array of [x, y] pairs");
  } else {
    for (const auto& p : doc["positions"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        issues.push_back("positions: every entry must be an [x, y] pair of numbers");
        break;
      }
      s.positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  const int n = s.size();

  if (!doc.contains("traffic") || !doc["traffic"].is_object()) {
    issues.push_back("traffic: required object with key \"matrix\" or \"per_rsu\"");
  } else {
    const auto& t = doc["traffic"];
    if (t.contains("matrix")) {
      if (!t["matrix"].is_array()) {
        issues.push_back("traffic.matrix: must be an n x n array");
      } else {
        for (const auto& row : t["matrix"]) {
          std::vector<double> r;
          for (const auto& v : row) {
            if (!v.is_number()) {
              issues.push_back("traffic.matrix: entries must be numbers");
              break;
            }
            r.push_back(v.get<double>());
          }
          s.traffic.push_back(std::move(r));
        }
      }
    } else if (t.contains("per_rsu")) {
      if (!t["per_rsu"].is_array() || static_cast<int>(t["per_rsu"].size()) != n) {
        issues.push_back("traffic.per_rsu: must be an array with one entry per RSU");
      } else {
        s.traffic.assign(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i) {
          const auto& v = t["per_rsu"][i];
          if (!v.is_number()) {
            issues.push_back("traffic.per_rsu: entries must be numbers");
            break;
          }
          for (int j = 0; j < n; ++j)
            if (j != i) s.traffic[i][j] = v.get<double>();
        }
      }
    } else {
      issues.push_back("traffic: expected key \"matrix\" or \"per_rsu\"");
    }
  }

  if (!doc.contains("class_weights") || !doc["class_weights"].is_array()) {
    issues.push_back("class_weights: required array of weights");
  } else {
    for (const auto& w : doc["class_weights"]) {
      if (!w.is_number()) {
        issues.push_back("class_weights: entries must be numbers");
        break;
      }
      s.class_weights.push_back(w.get<double>());
    }
  }

  fetch_number("beta", s.beta, &s.beta);
  fetch_number("alpha", s.alpha, &s.alpha);
  fetch_number("delta", s.delta, &s.delta);
  fetch_number("chunks_per_vehicle", s.chunks_per_vehicle, &s.chunks_per_vehicle);

  if (doc.contains("duplicate_class_policy")) {
    if (!doc["duplicate_class_policy"].is_string()) {
      issues.push_back("duplicate_class_policy: must be \"discount\" or \"literal\"");
    } else {
      try {
        s.duplicate_class_policy = duplicate_class_policy_from_string(doc["duplicate_class_policy"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        issues.push_back(e.what());
      }
    }
  }

  if (!issues.empty()) throw ScenarioError(issues);
  require_valid(s);
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json doc;
  doc["positions"] = nlohmann::json::array();
  for (const auto& p : s.positions) doc["positions"].push_back({p[0], p[1]});
  doc["traffic"]["matrix"] = s.traffic;
  doc["class_weights"] = s.class_weights;
  doc["beta"] = s.beta;
  doc["alpha"] = s.alpha;
  doc["delta"] = s.delta;
  doc["chunks_per_vehicle"] = s.chunks_per_vehicle;
  doc["duplicate_class_policy"] = to_string(s.duplicate_class_policy);
  return doc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("cannot parse scenario file " + path.string() + ": " + e.what());
  }
  return scenario_from_json(doc);
}

}  // namespace rsucoal
